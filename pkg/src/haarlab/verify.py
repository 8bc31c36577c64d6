"""Acceptance suite shared by ``haarlab verify`` and the test-suite.

Each check returns a :class:`CriterionResult`. ``scale="full"`` uses the
sample sizes the criteria are stated at; ``"quick"`` shrinks them so the whole
suite runs in well under two minutes.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from . import born, commutant, complexity, concentration, moments
from .errors import DomainError
from .groups import GroupId, sample_states
from .numerics import RngStream, map_shards
from .pins import PINS

KINDS = ("SO", "SU", "Sp")

_SCALES = {
    "full": dict(c1=100_000, c2=100_000, c2_polys=20, c3=100_000, c4=200, c4_method="qr",
                 c5=10_000, c6=100_000, c7=100_000, c8=100),
    "quick": dict(c1=20_000, c2=20_000, c2_polys=3, c3=40_000, c4=200, c4_method="state",
                  c5=10_000, c6=20_000, c7=40_000, c8=100),
}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "seconds": self.seconds, "details": self.details}


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, dict]]) -> CriterionResult:
    t0 = time.perf_counter()
    ok, details = fn()
    return CriterionResult(number, name, bool(ok), details, time.perf_counter() - t0)


def _group_for_hilbert(kind: str, h: int) -> GroupId:
    return GroupId(kind, h // 2 if kind == "Sp" else h)


# -- 1 ----------------------------------------------------------------------------------

def criterion_1(seed: int = 1, scale: str = "full") -> CriterionResult:
    """Mean Born distribution of Haar states is uniform (D = Hilbert dimension 4, 8, 16)."""
    n = _SCALES[scale]["c1"]

    def run():
        worst, cells = 0.0, []
        for ki, kind in enumerate(KINDS):
            for h in (4, 8, 16):
                g = _group_for_hilbert(kind, h)
                p = np.concatenate(map_shards(lambda s, gen: np.abs(sample_states(g, s, gen)) ** 2,
                                              n, RngStream(seed, 1, (ki, h))))
                se = p.std(axis=0, ddof=1) / math.sqrt(n)
                z = float(np.max(np.abs(p.mean(axis=0) - 1 / h) / se))
                worst = max(worst, z)
                cells.append({"group": str(g), "D": h, "max_z": z})
        return worst <= 5.0, {"max_z": worst, "cells": cells, "n_samples": n}

    return _timed(1, "average Born distribution is uniform", run)


# -- 2 ----------------------------------------------------------------------------------

def criterion_2(seed: int = 1, scale: str = "full") -> CriterionResult:
    """Gaussian integration agrees with direct averaging on random polynomials.

    Both estimators use the same Gaussian draws (common random numbers); the
    direct one normalises each draw. The combined SE is still the
    independent-sample one, so the test is conservative.
    """
    cfg = _SCALES[scale]
    n, n_polys = cfg["c2"], cfg["c2_polys"]

    def run():
        worst, fails, count = 0.0, [], 0
        for ki, kind in enumerate(KINDS):
            for d in (2, 4, 8):
                g = GroupId(kind, d)
                for k in (1, 2, 3):
                    for p in range(n_polys):
                        f = moments.random_homogeneous_polynomial(g, k, RngStream(seed, 21, (ki, d, k, p)))
                        stream = RngStream(seed, 22, (ki, d, k, p))
                        a = moments.haar_expect_gaussian(g, f, n, stream)
                        b = moments.haar_expect_direct(g, f, n, stream)
                        z = abs(a.value - b.value) / math.hypot(a.std_error, b.std_error)
                        worst = max(worst, z)
                        count += 1
                        if z > 3:
                            fails.append({"group": str(g), "k": k, "poly": p, "z": z})
        return not fails, {"cells": count, "max_z": worst, "failures": fails, "n_samples": n}

    return _timed(2, "Gaussian-integration oracle equivalence", run)


# -- 3 ----------------------------------------------------------------------------------

def criterion_3(seed: int = 1, scale: str = "full") -> CriterionResult:
    n = _SCALES[scale]["c3"]

    def run():
        rows, ok = [], True
        for d in (4, 8, 16):
            g = GroupId("SO", d)
            est = moments.haar_expect_gaussian(g, moments.coordinate_power(g, 0, 2), n, RngStream(seed, 31, (d,)))
            exact = 3 / (d * (d + 2))
            z = abs(est.value - exact) / est.std_error
            ok &= z <= 5
            rows.append({"check": "x1^4", "D": d, "estimate": est.value, "exact": exact, "z": z})
        for dof in (2, 4, 8):
            r2 = np.concatenate(map_shards(
                lambda s, gen: (gen.standard_normal((s, dof)) ** 2).sum(axis=1), n, RngStream(seed, 32, (dof,))))
            for k in (1, 2, 3):
                v = r2 ** k
                exact = moments.chi_square_moment(dof, k)
                z = abs(v.mean() - exact) / (v.std(ddof=1) / math.sqrt(n))
                ok &= z <= 5
                rows.append({"check": "chi2", "dof": dof, "k": k, "estimate": float(v.mean()),
                             "exact": exact, "z": float(z)})
        return ok, {"rows": rows, "n_samples": n}

    return _timed(3, "exact moment pins", run)


# -- 4 ----------------------------------------------------------------------------------

def criterion_4(seed: int = 1, scale: str = "full") -> CriterionResult:
    cfg = _SCALES[scale]

    def run():
        rows = []
        for ki, kind in enumerate(KINDS):
            est = born.estimate_expected_tv(kind, 10, cfg["c4"], RngStream(seed, 41, (ki,)), method=cfg["c4_method"])
            band = born.tv_band(kind, 10, est)
            rows.append({"group": kind, **band})
        return all(r["inside"] for r in rows), {"rows": rows, "method": cfg["c4_method"]}

    return _timed(4, "expected TV distance to uniform", run)


# -- 5 ----------------------------------------------------------------------------------

def criterion_5(seed: int = 1, scale: str = "full") -> CriterionResult:
    n = _SCALES[scale]["c5"]
    taus = np.round(np.arange(1, 11) * 0.05, 10)

    def run():
        rows, ok = [], True
        for ki, kind in enumerate(KINDS):
            for d in (16, 64):
                g = GroupId(kind, d)
                gen = np.random.default_rng([seed, 51, ki, d])
                phi = sample_states(g, 1, gen)[0]
                rep = concentration.empirical_tail(g, concentration.projector_functional(phi), taus, n,
                                                   RngStream(seed, 52, (ki, d)), exact_mean=1 / g.hilbert_dim)
                bad = rep.violations(3.0)
                ok &= not bad
                rows.append({"group": str(g), "violations": bad,
                             "max_excess": max(e - b for e, b in zip(rep.empirical_tail, rep.analytic_bound))})
        return ok, {"rows": rows, "n_samples": n}

    return _timed(5, "Levy bound never violated", run)


# -- 6 ----------------------------------------------------------------------------------

def criterion_6(seed: int = 1, scale: str = "full") -> CriterionResult:
    n = _SCALES[scale]["c6"]

    def run():
        rows, ok = [], True
        for ki, kind in enumerate(KINDS):
            g = GroupId(kind, 2)
            for k in (1, 2):
                d = g.hilbert_dim ** k
                gen = np.random.default_rng([seed, 61, ki, k])
                rhos = np.array([commutant.random_density_matrix(d, gen) for _ in range(10)])
                basis = commutant.commutant_basis(g, k)
                exact = commutant.twirl(g, rhos, basis)
                est = commutant.mc_twirl(g, k, rhos, n, RngStream(seed, 62, (ki, k)))
                z = float(est.zscores(exact).max())
                idem = float(np.abs(commutant.twirl(g, exact, basis) - exact).max())
                trace = float(np.abs(np.trace(exact, axis1=1, axis2=2) - 1).max())
                cell_ok = z <= 5 and idem <= 1e-10 and trace <= 1e-10
                ok &= cell_ok
                rows.append({"group": str(g), "k": k, "max_z": z, "idempotence_err": idem,
                             "trace_err": trace, "passed": cell_ok})
        return ok, {"rows": rows, "n_samples": n}

    return _timed(6, "commutant twirl equals Monte Carlo twirl", run)


# -- 7 ----------------------------------------------------------------------------------

def criterion_7(seed: int = 1, scale: str = "full") -> CriterionResult:
    """Sp states at complex dimension 16 reproduce the unitary first and second moments."""
    n = _SCALES[scale]["c7"]
    h = 16

    def run():
        su = GroupId("SU", h)
        oracle = moments.haar_expect_gaussian(su, moments.coordinate_power(su, 0, 2), n, RngStream(seed, 71))
        closed = 2 / (h * (h + 1))
        z_ref = abs(oracle.value - closed) / oracle.std_error
        sp = GroupId("Sp", h // 2)
        p = np.concatenate(map_shards(lambda s, gen: np.abs(sample_states(sp, s, gen)) ** 2, n,
                                      RngStream(seed, 72)))
        sqrt_n = math.sqrt(n)
        z1 = float(np.max(np.abs(p.mean(0) - 1 / h) / (p.std(0, ddof=1) / sqrt_n)))
        p2 = p ** 2
        z2 = float(np.max(np.abs(p2.mean(0) - closed) / (p2.std(0, ddof=1) / sqrt_n)))
        ok = z_ref <= 5 and z1 <= 5 and z2 <= 5
        return ok, {"reference": closed, "oracle": oracle.value, "oracle_z": z_ref,
                    "first_moment_max_z": z1, "second_moment_max_z": z2, "n_samples": n}

    return _timed(7, "Sp states form a complex 2-design", run)


# -- 8 ----------------------------------------------------------------------------------

FIDELITY_MAX = 0.05
TRACE_DISTANCE_MIN = 0.97


def separation_threshold_check(D: int = 1024, n_states: int = 100) -> dict:
    """Union bound on Pr[max pairwise fidelity > threshold].

    For a Haar state in real dimension D the fidelity with a fixed state is
    Beta(1/2, (D-1)/2).
    """
    pairs = n_states * (n_states - 1) // 2
    tail_f = float(stats.beta(0.5, (D - 1) / 2).sf(FIDELITY_MAX))
    tail_t = float(stats.beta(0.5, (D - 1) / 2).sf(1 - TRACE_DISTANCE_MIN ** 2))
    return {"pairs": pairs, "p_fail_fidelity": pairs * tail_f, "p_fail_trace": pairs * tail_t}


def criterion_8(seed: int = 1, scale: str = "full") -> CriterionResult:
    n = _SCALES[scale]["c8"]

    def run():
        oracle = separation_threshold_check(1024, n)
        rep = complexity.empirical_pairwise_fidelity(GroupId("SO", 1024), n, RngStream(seed, 81))
        ok = (rep["max_fidelity"] <= FIDELITY_MAX and rep["min_trace_distance"] >= TRACE_DISTANCE_MIN
              and oracle["p_fail_fidelity"] < 1e-6)
        return ok, {**rep, "oracle": oracle}

    return _timed(8, "pairwise separation of SO(1024) states", run)


# -- 9 ----------------------------------------------------------------------------------

def evaluate_pin(name: str, args: tuple):
    """Evaluate one pinned formula; returns (sign, log |value|)."""
    if name == "measurement_class":
        p = complexity.ComplexityParams(args[1], args[2], 0.5, args[3])
        return 1, complexity.log_measurement_class_size_bound(p)
    if name == "low_complexity":
        rep = complexity.low_complexity_prob_bound(args[0], complexity.ComplexityParams(*args[1:]))
    elif name == "design_low_complexity":
        rep = complexity.design_low_complexity_prob_bound(
            args[0], complexity.ComplexityParams(*args[1:5]), complexity.DesignParams(*args[5:]))
    elif name == "packing":
        rep = complexity.packing_count(*args)
    elif name == "design_packing":
        rep = complexity.design_packing_count(args[0], args[1], args[2], complexity.DesignParams(*args[3:]))
    elif name == "sq":
        rep = born.sq_lower_bound(args[0], born.SqParams(*args[1:]))
    else:
        raise KeyError(name)
    return rep.sign, rep.log_value


def _raises(fn) -> bool:
    try:
        fn()
    except DomainError:
        return True
    return False


def domain_window_checks() -> list[dict]:
    """Domain errors are raised exactly outside the stated windows."""
    out = []
    D = 2 ** 8
    hi = complexity.design_delta_window(D)[1]
    cp = lambda d: complexity.ComplexityParams(8, 2, d, 2)  # noqa: E731
    dp = complexity.DesignParams(6, 0.0)
    call = lambda d, des=dp: complexity.design_low_complexity_prob_bound("SU", cp(d), des)  # noqa: E731
    out.append({"check": "delta inside window", "ok": not _raises(lambda: call(np.nextafter(hi, 0)))})
    out.append({"check": "delta at upper edge", "ok": _raises(lambda: call(hi))})
    out.append({"check": "delta above window", "ok": _raises(lambda: call(0.499))})
    out.append({"check": "delta = 0 rejected", "ok": _raises(lambda: call(0.0))})
    out.append({"check": "k = 3 rejected", "ok": _raises(lambda: call(0.1, complexity.DesignParams(3)))})
    out.append({"check": "k = 4 accepted", "ok": not _raises(lambda: call(0.1, complexity.DesignParams(4)))})
    out.append({"check": "k = 3 rejected in packing", "ok": _raises(
        lambda: complexity.design_packing_count("SU", 256, 0.5, complexity.DesignParams(3)))})
    # xi_SU = 1/e - 2^{-6} - (eps + tau) at n = 10; boundary eps sits where xi = 0
    m, d = born.expected_tv_constants("SU", 10)
    eps0 = m - d - 0.1
    out.append({"check": "xi < 0 rejected", "ok": _raises(
        lambda: born.sq_lower_bound("SU", born.SqParams(10, 0.1, eps0 + 1e-9, 0.5)))})
    out.append({"check": "xi > 0 accepted", "ok": not _raises(
        lambda: born.sq_lower_bound("SU", born.SqParams(10, 0.1, eps0 - 1e-9, 0.5)))})
    return out


def criterion_9(seed: int = 1, scale: str = "full") -> CriterionResult:
    def run():
        rows, ok = [], True
        for name, args, sign, log_pin in PINS:
            s, lv = evaluate_pin(name, args)
            # |log a - log b| bounds the relative error of the values to first order
            err = abs(math.expm1(lv - float(log_pin)))
            good = s == sign and err <= 1e-10
            ok &= good
            rows.append({"formula": name, "args": args, "rel_err": err, "ok": good})
        windows = domain_window_checks()
        ok &= all(w["ok"] for w in windows)
        return ok, {"pins": rows, "n_pins": len(rows), "windows": windows}

    return _timed(9, "closed-form regression pins and domain windows", run)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def verify_all(seed: int = 1, scale: str = "quick", only: list[int] | None = None,
               echo: Callable[[str], None] | None = None) -> list[CriterionResult]:
    if scale not in _SCALES:
        raise ValueError(f"scale must be one of {sorted(_SCALES)}")
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        res = fn(seed, scale)
        if echo:
            echo(res.line())
        results.append(res)
    return results
