"""Expected TV distance between Born distributions and uniform, across n.

Prints the estimate, its standard error and the band M_G +/- Delta_G per
group, using direct state sampling (same law as the first column of U).

    python3 scripts/tv_experiment.py --qubits 4 6 8 10 --samples 2000
"""
from __future__ import annotations

import argparse

from haarlab.born import estimate_expected_tv, tv_band
from haarlab.numerics import RngStream


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[4, 6, 8, 10])
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--method", choices=["qr", "state"], default="state")
    args = ap.parse_args()
    print(f"{'group':>5} {'n':>3} {'estimate':>10} {'se':>9} {'M':>9} {'Delta':>9} inside")
    for i, kind in enumerate(("SO", "SU", "Sp")):
        for n in args.qubits:
            est = estimate_expected_tv(kind, n, args.samples, RngStream(args.seed, i, (n,)), method=args.method)
            b = tv_band(kind, n, est)
            print(f"{kind:>5} {n:>3} {est.value:10.5f} {est.std_error:9.2e} {b['M']:9.5f} "
                  f"{b['Delta']:9.5f} {b['inside']}")


if __name__ == "__main__":
    main()
