"""Born distributions, distance to uniform, expected-TV constants and SQ lower bounds."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
import numpy as np

from .errors import ContractError, DomainError, InvalidParameterError, ResourceError
from .groups import GroupElement, GroupId, normalize_kind, sample_matrices, sample_states
from .moments import MomentEstimate
from .numerics import map_shards
from .reports import BoundReport

MAX_TV_QUBITS = 11
PROB_SUM_TOL = 1e-12


@dataclass
class BornDistribution:
    probs: np.ndarray
    source: GroupId | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1:
            raise ContractError("probabilities must be a vector")
        if (p < -1e-15).any():
            raise ContractError(f"negative probability {p.min():.3e}")
        p = np.clip(p, 0.0, None)
        if abs(p.sum() - 1.0) > PROB_SUM_TOL * max(1, len(p)):
            raise ContractError(f"probabilities sum to {p.sum():.15f}")
        self.probs = p

    @property
    def D(self) -> int:
        return len(self.probs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x", "P"])
        for x, p in enumerate(self.probs):
            w.writerow([x, repr(float(p))])
        return buf.getvalue()


def born_distribution(element) -> BornDistribution:
    """|<x|U|0>|^2: squared magnitudes of the first column."""
    if isinstance(element, GroupElement):
        m, src = element.matrix, element.group
    else:
        m, src = np.asarray(element), None
    h = m.shape[-1]
    if m.ndim != 2 or m.shape[0] != h or h & (h - 1):
        raise ContractError(f"need a square matrix of power-of-two size, got {m.shape}")
    return BornDistribution(np.abs(m[:, 0]) ** 2, src)


def tv_to_uniform(p) -> float | np.ndarray:
    """1/2 sum_x |P(x) - 1/D|; accepts a BornDistribution or an (..., D) array of probabilities."""
    probs = p.probs if isinstance(p, BornDistribution) else np.asarray(p)
    d = probs.shape[-1]
    out = 0.5 * np.abs(probs - 1.0 / d).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def expected_tv_constants(group, n: int) -> tuple[float, float]:
    """(M_G, Delta_G): sqrt(2/(pi e)), 1/sqrt(2^{n+1}) for SO; 1/e, 2^{-n/2-1} for SU and Sp."""
    kind = group.kind if isinstance(group, GroupId) else normalize_kind(group)
    if n < 1:
        raise InvalidParameterError(f"need n >= 1, got {n}")
    if kind == "SO":
        return math.sqrt(2 / (math.pi * math.e)), 1 / math.sqrt(2 * 2 ** n)
    return 1 / math.e, 2.0 ** (-n / 2 - 1)


def estimate_expected_tv(group, n: int, n_samples: int, rng, method: str = "qr",
                         workers: int = 1) -> MomentEstimate:
    """Monte Carlo mean of the TV distance between P_U and uniform.

    ``method="qr"`` samples full group elements; ``"state"`` samples ``U|0>``
    directly, which has the same law and skips the QR.
    """
    kind = group.kind if isinstance(group, GroupId) else normalize_kind(group)
    if n > MAX_TV_QUBITS:
        raise ResourceError(f"estimate_expected_tv is limited to n <= {MAX_TV_QUBITS}, got {n}")
    if n_samples < 2:
        raise InvalidParameterError("need at least two samples")
    if method not in ("qr", "state"):
        raise InvalidParameterError(f"unknown method {method!r}")
    g = GroupId.for_qubits(kind, n)

    def shard(size, gen):
        if method == "qr":
            amps = sample_matrices(g, size, gen)[:, :, 0]
        else:
            amps = sample_states(g, size, gen)
        return tv_to_uniform(np.abs(amps) ** 2)

    vals = np.concatenate(map_shards(shard, n_samples, rng, workers=workers,
                                     shard_size=8 if method == "qr" else 1024))
    se = float(vals.std(ddof=1) / math.sqrt(len(vals)))
    return MomentEstimate(float(vals.mean()), se, len(vals), 1.0, kind, g.dim, None)


def tv_band(group, n: int, estimate: MomentEstimate, n_se: float = 3.0) -> dict:
    """Membership of an estimate in [M - Delta - n_se SE, M + Delta + n_se SE]."""
    m, d = expected_tv_constants(group, n)
    lo, hi = m - d - n_se * estimate.std_error, m + d + n_se * estimate.std_error
    return {"M": m, "Delta": d, "lower": lo, "upper": hi, "estimate": estimate.value,
            "std_error": estimate.std_error, "inside": bool(lo <= estimate.value <= hi)}


# -- statistical-query lower bounds ------------------------------------------------------

@dataclass(frozen=True)
class SqParams:
    n: int
    tau: float
    epsilon: float
    beta: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"need n >= 1, got {self.n}")
        for name in ("tau", "epsilon"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise InvalidParameterError(f"{name} must lie in (0, 1), got {v}")
        if not 0 < self.beta <= 1:
            raise InvalidParameterError(f"beta must lie in (0, 1], got {self.beta}")


# (xi rate, tau rate) multiplying xi^2 and tau^2 in the table exponents
def _table_rates(kind: str, n: int) -> tuple[float, float]:
    D = 2 ** n
    if kind == "SO":
        return (D - 2) / 8, (D - 2) / 32
    if kind == "Sp":
        return (D / 2 + 1) / 2, (D / 2 + 1) / 8
    return D / 4, D / 16


def _levy_c(kind: str, n: int) -> float:
    D = 2 ** n
    if kind == "SO":
        return 4 / (D - 2)
    if kind == "Sp":
        return 1 / (D / 2 + 1)
    return 2 / D


SQ_MODES = ("table", "lemma", "as_written")


def sq_lower_bound(group, params: SqParams, mode: str = "table") -> BoundReport:
    """Lower bound on q from q + 1 >= (beta - u) / f.

    Modes for the bounds on ``f`` and ``u``:

    * ``table``: exponents as printed in the per-group table.
    * ``lemma``: ``f <= 2 exp(-tau^2 / (8 C_G))``, ``u <= 2 exp(-xi^2 / (2 C_G))``,
      i.e. Levy's lemma with L = 2 and C_G at D = 2^n (Sp at 2^{n-1}).
    * ``as_written``: ``f <= 2 exp(-C_G tau^2 / 8)``, ``u <= 2 exp(-xi^2 C_G / 2)``
      with the constant multiplied in.

    The report carries the mismatch against the table mode.
    """
    kind = group.kind if isinstance(group, GroupId) else normalize_kind(group)
    if mode not in SQ_MODES:
        raise InvalidParameterError(f"mode must be one of {SQ_MODES}, got {mode!r}")
    n, tau, eps, beta = params.n, params.tau, params.epsilon, params.beta
    if kind == "SO" and n < 2:
        raise DomainError("SO bound needs n >= 2 (D - 2 > 0)")
    m, d = expected_tv_constants(kind, n)
    xi = m - d - (eps + tau)
    if xi < 0:
        raise DomainError(f"xi_G = M_G - Delta_G - (epsilon + tau) = {xi:.6g} < 0; the accuracy "
                          f"restriction epsilon <= M_G - Delta_G - 2 tau is violated")

    def rates(md):
        if md == "table":
            return _table_rates(kind, n)
        c = _levy_c(kind, n)
        if md == "lemma":
            return 1 / (2 * c), 1 / (8 * c)
        return c / 2, c / 8

    xi_rate, tau_rate = rates(mode)
    log_f = math.log(2) - tau_rate * tau ** 2
    log_u = math.log(2) - xi_rate * xi ** 2
    u = math.exp(log_u)
    numer = beta - u
    # q_lower = numer / f - 1 as sign * exp(log_q)
    if numer > 0:
        log_ratio = math.log(numer) - log_f
        if log_ratio > 0:
            sign, log_q = 1, log_ratio + math.log1p(-math.exp(-log_ratio))
        else:
            sign, log_q = -1, (math.log1p(-math.exp(log_ratio)) if log_ratio < 0 else -math.inf)
    else:
        log_ratio = -math.inf
        sign = -1
        log_q = float(np.logaddexp(0.0, math.log(-numer) - log_f)) if numer < 0 else 0.0
    q_lower = sign * (math.exp(log_q) if log_q < 709 else math.inf)
    nontrivial = q_lower > 0
    mismatch = {}
    if mode != "table":
        t_xi, t_tau = _table_rates(kind, n)
        mismatch = {"xi_rate_ratio": xi_rate / t_xi, "tau_rate_ratio": tau_rate / t_tau}
    details = {
        "M": m, "Delta": d, "xi": xi, "f_bound": math.exp(log_f), "log_f_bound": log_f,
        "u_bound": u, "log_u_bound": log_u, "numerator": numer, "log_q_plus_1": log_ratio,
        "q_lower": q_lower, "no_nontrivial_bound": not nontrivial, "mode": mode,
        "mismatch_vs_table": mismatch,
    }
    inputs = {"n": n, "tau": tau, "epsilon": eps, "beta": beta, "D": 2 ** n}
    return BoundReport(kind, f"average_case_hardness/{mode}", log_q, inputs,
                       vacuous=not nontrivial, details=details, sign=sign)


# -- distinguishability witnesses ------------------------------------------------------------

def parity(x: np.ndarray) -> np.ndarray:
    """(-1)^{popcount(x)}."""
    x = np.asarray(x, dtype=np.int64)
    bits = np.zeros_like(x)
    y = x.copy()
    while y.any():
        bits ^= y & 1
        y >>= 1
    return 1.0 - 2.0 * bits


def empirical_distinguishable_fraction(group, n: int, phi, tau: float, n_samples: int, rng,
                                       workers: int = 1) -> dict:
    """Fraction of Haar U with |E_{P_U} phi - E_uniform phi| >= tau for one fixed phi.

    A lower-bound witness for the maximally distinguishable fraction, not the
    maximum itself. ``phi`` is a callable on outcome indices or a length-2^n
    array with values in [-1, 1].
    """
    kind = group.kind if isinstance(group, GroupId) else normalize_kind(group)
    g = GroupId.for_qubits(kind, n)
    D = 2 ** n
    x = np.arange(D)
    vals = np.asarray(phi(x) if callable(phi) else phi, dtype=float)
    if vals.shape != (D,):
        raise ContractError(f"phi must give {D} values, got shape {vals.shape}")
    if not np.isfinite(vals).all() or np.abs(vals).max() > 1 + 1e-12:
        raise ContractError("phi must take values in [-1, 1]")
    if n_samples < 1:
        raise InvalidParameterError("need n_samples >= 1")
    ref = vals.mean()

    def shard(size, gen):
        p = np.abs(sample_states(g, size, gen)) ** 2
        return np.abs(p @ vals - ref)

    gaps = np.concatenate(map_shards(shard, n_samples, rng, workers=workers, shard_size=1024))
    frac = float(np.mean(gaps >= tau))
    return {"fraction": frac, "se": math.sqrt(frac * (1 - frac) / n_samples), "n_samples": n_samples,
            "tau": tau, "label": "lower-bound witness", "max_gap": float(gaps.max())}
