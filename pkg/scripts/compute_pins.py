"""Regenerate the closed-form regression pins with 50-digit arithmetic.

The formulas are transcribed here directly from their printed form and do not
import haarlab, so the pins are an independent oracle for the float
evaluators. Writes ``src/haarlab/pins.py``.

    python3 scripts/compute_pins.py
"""
from __future__ import annotations

import pathlib

from mpmath import mp, mpf, exp, log, sqrt, pi, e

mp.dps = 50


def low_complexity(kind, n, r, delta, G):
    D = mpf(2) ** n
    pre = 4 * D * (n + 1) ** r * mpf(G) ** r
    if kind == "SO":
        return pre * exp(mpf(9) / 64) * exp(-(D - 2) * (1 - delta) ** 2 / 32)
    if kind == "Sp":
        return pre * exp(mpf(7) / 32) * exp(-D * (1 - delta) ** 2 / 16)
    return pre * exp(mpf(3) / 32) * exp(-D * (1 - delta) ** 2 / 16)


def design_low_complexity(kind, n, r, delta, G, k, eps):
    D = mpf(2) ** n
    k = mpf(k)
    lead = mpf(2) ** (2 * k / 3)
    pre = 4 * mpf(G) ** r * (n + 1) ** r * D
    if kind == "SO":
        core = pre * (32 * k / 3) ** (k / 3) * (D - 2) ** (-k / 3)
    elif kind == "Sp":
        core = pre * (16 * k / 3) ** (k / 3) * (D + 2) ** (-k / 3)
    else:
        core = pre * (16 * k / 3) ** (k / 3) * D ** (-k / 3)
    return lead * (core + eps)


def packing(kind, D, Delta):
    D, Delta = mpf(D), mpf(Delta)
    if kind == "SO":
        return exp(-mpf(29) / 64) * exp(D * Delta ** 4 / 32) / 4
    if kind == "Sp":
        return exp(-1) * exp(D * Delta ** 4 / 8) / 4
    return exp(-mpf(1) / 4) * exp(D * Delta ** 4 / 16) / 4


def design_packing(kind, D, Delta, k, eps):
    D, Delta = mpf(D), mpf(Delta)
    x = (2 - Delta) * Delta - 1 / D
    ratio = {"SO": 16 * k / (D - 2), "Sp": 8 * k / (D + 2), "SU": 8 * k / D}[kind]
    return x ** k / 2 / (2 * ratio ** (mpf(k) / 2) + mpf(2) ** k * eps)


def sq(kind, n, tau, eps, beta):
    D = mpf(2) ** n
    if kind == "SO":
        M, Dl = sqrt(2 / (pi * e)), 1 / sqrt(2 * D)
        xi = M - Dl - (eps + tau)
        return (beta - 2 * exp(-(D - 2) * xi ** 2 / 8)) / (2 * exp(-(D - 2) * tau ** 2 / 32)) - 1
    M, Dl = 1 / e, mpf(2) ** (-mpf(n) / 2 - 1)
    xi = M - Dl - (eps + tau)
    if kind == "Sp":
        return (beta - 2 * exp(-(D / 2 + 1) * xi ** 2 / 2)) / (2 * exp(-(D / 2 + 1) * tau ** 2 / 8)) - 1
    return (beta - 2 * exp(-D * xi ** 2 / 4)) / (2 * exp(-D * tau ** 2 / 16)) - 1


def measurement_class(n, r, G):
    return 2 * mpf(2) ** n * (n + 1) ** r * mpf(G) ** r


CASES = [
    ("measurement_class", ("-", 3, 2, 2), measurement_class(3, 2, 2)),
    ("low_complexity", ("SU", 10, 1, 0.5, 2), low_complexity("SU", 10, 1, mpf("0.5"), 2)),
    ("low_complexity", ("SO", 10, 1, 0.5, 2), low_complexity("SO", 10, 1, mpf("0.5"), 2)),
    ("low_complexity", ("Sp", 10, 1, 0.5, 2), low_complexity("Sp", 10, 1, mpf("0.5"), 2)),
    ("low_complexity", ("SU", 20, 50, 0.25, 16), low_complexity("SU", 20, 50, mpf("0.25"), 16)),
    ("design_low_complexity", ("SU", 8, 2, 0.1, 2, 6, 0.0),
     design_low_complexity("SU", 8, 2, mpf("0.1"), 2, 6, 0)),
    ("design_low_complexity", ("SO", 8, 2, 0.1, 2, 6, 0.0),
     design_low_complexity("SO", 8, 2, mpf("0.1"), 2, 6, 0)),
    ("design_low_complexity", ("Sp", 12, 3, 0.2, 4, 30, 1e-3),
     design_low_complexity("Sp", 12, 3, mpf("0.2"), 4, 30, mpf("1e-3"))),
    ("packing", ("SO", 1024, 0.5), packing("SO", 1024, "0.5")),
    ("packing", ("Sp", 1024, 0.5), packing("Sp", 1024, "0.5")),
    ("packing", ("SU", 4096, 0.3), packing("SU", 4096, "0.3")),
    ("design_packing", ("SU", 256, 0.5, 8, 0.0), design_packing("SU", 256, "0.5", 8, 0)),
    ("design_packing", ("SO", 256, 0.5, 8, 1e-4), design_packing("SO", 256, "0.5", 8, mpf("1e-4"))),
    ("design_packing", ("Sp", 1024, 0.4, 12, 2.0 ** -12),
     design_packing("Sp", 1024, "0.4", 12, mpf(2) ** -12)),
    ("sq", ("SU", 10, 0.1, 0.1, 0.5), sq("SU", 10, mpf("0.1"), mpf("0.1"), mpf("0.5"))),
    ("sq", ("SO", 14, 0.1, 0.1, 0.9), sq("SO", 14, mpf("0.1"), mpf("0.1"), mpf("0.9"))),
    ("sq", ("Sp", 14, 0.1, 0.1, 0.9), sq("Sp", 14, mpf("0.1"), mpf("0.1"), mpf("0.9"))),
]


def main() -> None:
    lines = [
        '"""Regression pins for the closed-form calculators.',
        "",
        "Generated by scripts/compute_pins.py with 50-digit arithmetic; do not edit.",
        "Each entry: (formula, arguments, sign, natural log of |value|).",
        '"""',
        "",
        "PINS = [",
    ]
    for name, args, val in CASES:
        sign = 1 if val > 0 else -1
        lines.append(f"    ({name!r}, {args!r}, {sign}, {mp.nstr(log(abs(val)), 30)!r}),")
    lines.append("]")
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "haarlab" / "pins.py"
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {len(CASES)} pins to {out}")


if __name__ == "__main__":
    main()
