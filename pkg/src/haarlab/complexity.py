"""Closed-form bounds on strong state complexity and on near-orthogonal packings.

Every evaluator works in natural-log space and returns a :class:`BoundReport`.
``D`` is always the Hilbert-space dimension the formulas are written in
(``D = 2^n`` for n qubits), for Sp as well as SO and SU.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ContractError, DomainError, InvalidParameterError
from .groups import GroupId, normalize_kind, sample_states
from .reports import BoundReport


def _kind(group) -> str:
    return group.kind if isinstance(group, GroupId) else normalize_kind(group)


def _lse(*terms: float) -> float:
    return float(np.logaddexp.reduce([t for t in terms if t != -math.inf] or [-math.inf]))


@dataclass(frozen=True)
class ComplexityParams:
    """n qubits, circuit size r, distinguishing slack delta, gate-set size |G|."""

    n: int
    r: int
    delta: float
    gate_set_size: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"need n >= 1 qubits, got {self.n}")
        if self.r < 0:
            raise InvalidParameterError(f"circuit size r must be >= 0, got {self.r}")
        if self.gate_set_size < 1:
            raise InvalidParameterError("gate set must be nonempty")

    @property
    def D(self) -> int:
        return 2 ** self.n


@dataclass(frozen=True)
class DesignParams:
    k: int
    epsilon: float = 0.0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameterError(f"design order k must be >= 1, got {self.k}")
        if self.epsilon < 0:
            raise InvalidParameterError("epsilon must be nonnegative")


def _check_delta(delta):
    if not 0 < delta < 1:
        raise ContractError(f"delta must lie in (0, 1), got {delta}")


# -- measurement classes and exact-ensemble bounds ---------------------------------

def log_measurement_class_size_bound(p: ComplexityParams) -> float:
    return (math.log(2) + p.n * math.log(2) + p.r * math.log(p.n + 1)
            + p.r * math.log(p.gate_set_size))


def measurement_class_size_bound(p: ComplexityParams) -> float:
    """|M_r| <= 2 D (n+1)^r |G|^r."""
    return math.exp(log_measurement_class_size_bound(p))


# exponent pieces for the exact ensembles: (log prefactor constant, rate of (1-delta)^2)
_EXACT = {
    "SO": (9 / 64, lambda D: (D - 2) / 32),
    "Sp": (7 / 32, lambda D: D / 16),
    "SU": (3 / 32, lambda D: D / 16),
}

# before the final simplification: rate multiplying (1 - 1/D - delta)^2
_EXACT_UNSIMPLIFIED = {
    "SO": lambda D: (D - 2) / 32,
    "Sp": lambda D: (D / 2 + 1) / 8,
    "SU": lambda D: D / 16,
}


def low_complexity_prob_bound(group, params: ComplexityParams, simplified: bool = True) -> BoundReport:
    """Upper bound on Pr[strong delta-state complexity <= r] for Haar-random states.

    ``simplified=True`` evaluates the final form with the ``e^{9/64}``,
    ``e^{7/32}``, ``e^{3/32}`` prefactors; ``False`` evaluates the preceding
    line, with ``(1 - 1/D - delta)^2`` in the exponent.
    """
    kind = _kind(group)
    _check_delta(params.delta)
    D = params.D
    if kind == "SO" and D < 3:
        raise DomainError("SO bound needs D >= 3")
    log_count = math.log(2) + log_measurement_class_size_bound(params)  # 4 D (n+1)^r |G|^r
    if simplified:
        const, rate = _EXACT[kind]
        log_v = log_count + const - rate(D) * (1 - params.delta) ** 2
        fid = "high_complexity"
    else:
        gap = 1 - 1 / D - params.delta
        log_v = log_count - _EXACT_UNSIMPLIFIED[kind](D) * gap ** 2
        fid = "high_complexity/unsimplified"
    return BoundReport(kind, fid, log_v, {**asdict(params), "D": D}, vacuous=log_v >= 0)


def design_delta_window(D: int) -> tuple[float, float]:
    return 0.0, 0.5 - 1 / D - 1 / (2 * D ** 1.5)


_DESIGN_BASE = {"SO": 32, "Sp": 16, "SU": 16}


def _design_dim_log(kind, D):
    return {"SO": math.log(D - 2) if D > 2 else math.nan, "Sp": math.log(D + 2), "SU": math.log(D)}[kind]


def design_low_complexity_prob_bound(group, params: ComplexityParams, design: DesignParams,
                                     integer_m: bool = False) -> BoundReport:
    """Pr[strong complexity <= r] for states from an epsilon-approximate k-design.

    Default: the closed form obtained with ``m = k/3`` taken as a real exponent,

        2^{2k/3} ( 4 |G|^r (c k/3)^{k/3} (n+1)^r D X^{-k/3} + eps ),

    with ``(c, X) = (32, D-2), (16, D+2), (16, D)`` for SO, Sp, SU (the SU
    entry is written ``D^{1-k/3}``). ``integer_m=True`` evaluates the general
    bound with integer ``m = floor(k/3)``, as the large-deviation theorem
    requires.
    """
    kind = _kind(group)
    k, eps = design.k, design.epsilon
    D = params.D
    if k <= 3:
        raise DomainError(f"design bound needs k > 3, got k={k}")
    lo, hi = design_delta_window(D)
    if not lo < params.delta < hi:
        raise DomainError(f"delta={params.delta} outside the validity window ({lo}, {hi:.6g}) "
                          f"= (0, 1/2 - 1/D - 1/(2 D^(3/2)))")
    if kind == "SO" and D <= 2:
        raise DomainError("SO design bound needs D > 2")
    log_cnt = math.log(4) + params.r * math.log(params.gate_set_size) + params.r * math.log(params.n + 1)
    inputs = {**asdict(params), **asdict(design), "D": D, "integer_m": integer_m}
    if not integer_m:
        third = k / 3
        log_haar = (log_cnt + third * math.log(_DESIGN_BASE[kind] * k / 3) + math.log(D)
                    - third * _design_dim_log(kind, D))
        log_eps = math.log(eps) if eps > 0 else -math.inf
        log_v = (2 * k / 3) * math.log(2) + _lse(log_haar, log_eps)
        return BoundReport(kind, "design_bounds", log_v, inputs, vacuous=log_v >= 0,
                           details={"m": third})
    m = k // 3
    slope = {"SO": 32 * m / (D - 2), "Sp": 8 * m / (D / 2 + 1), "SU": 16 * m / D}[kind]
    gap = 1 - 1 / D - params.delta
    log_haar = log_cnt + math.log(D) + m * math.log(slope)
    log_eps = (math.log(eps) - k * math.log(D) + 2 * m * math.log(D ** 1.5 + 1)) if eps > 0 else -math.inf
    log_v = -2 * m * math.log(gap) + _lse(log_haar, log_eps)
    return BoundReport(kind, "high_complexity_designs/integer_m", log_v, inputs, vacuous=log_v >= 0,
                       details={"m": m})


# -- packings ------------------------------------------------------------------------

_PACK = {"SO": (29 / 64, 32), "Sp": (1.0, 8), "SU": (0.25, 16)}


def packing_count(group, D: int, Delta: float) -> BoundReport:
    """Number N of Haar states with pairwise trace distance >= 1 - Delta (exact ensembles).

    N = (1/4) e^{-c} exp(D Delta^4 / s) with (c, s) = (29/64, 32), (1, 8), (1/4, 16)
    for SO, Sp, SU.
    """
    kind = _kind(group)
    if not 0 < Delta < 1:
        raise InvalidParameterError(f"Delta must lie in (0, 1), got {Delta}")
    c, s = _PACK[kind]
    log_n = math.log(0.25) - c + D * Delta ** 4 / s
    return BoundReport(kind, "packing/exact", log_n, {"D": D, "Delta": Delta}, vacuous=log_n < math.log(2))


_PACK_DESIGN = {"SO": (16, lambda D: D - 2), "Sp": (8, lambda D: D + 2), "SU": (8, lambda D: D)}
_PACK_DESIGN_INT = {"SO": lambda m, D: 32 * m / (D - 2), "Sp": lambda m, D: 8 * m / (D / 2 + 1),
                    "SU": lambda m, D: 16 * m / D}


def design_packing_count(group, D: int, Delta: float, design: DesignParams,
                         integer_m: bool = False) -> BoundReport:
    """Packing size for epsilon-approximate k-designs.

    N = 1/2 ((2 - Delta) Delta - 1/D)^k / (2 (c k / X)^{k/2} + 2^k eps) with
    ``(c, X) = (16, D-2), (8, D+2), (8, D)`` for SO, Sp, SU. ``integer_m=True``
    uses the unsimplified tail with integer ``m = floor(k/2)``, N = 1/(2 p).
    """
    kind = _kind(group)
    k, eps = design.k, design.epsilon
    if not 0 < Delta < 1:
        raise InvalidParameterError(f"Delta must lie in (0, 1), got {Delta}")
    if k <= 3:
        raise DomainError(f"design packing needs k > 3, got k={k}")
    gap = (2 - Delta) * Delta - 1 / D
    if gap <= 0:
        raise DomainError(f"need (2 - Delta) Delta > 1/D; got {(2 - Delta) * Delta} <= {1 / D}")
    if kind == "SO" and D <= 2:
        raise DomainError("SO design packing needs D > 2")
    inputs = {"D": D, "Delta": Delta, **asdict(design), "integer_m": integer_m}
    log_eps = math.log(eps) if eps > 0 else -math.inf
    if not integer_m:
        c, x = _PACK_DESIGN[kind]
        log_den = _lse(math.log(2) + (k / 2) * math.log(c * k / x(D)), k * math.log(2) + log_eps)
        log_n = math.log(0.5) + k * math.log(gap) - log_den
        return BoundReport(kind, "thm-eps-k", log_n, inputs, vacuous=log_n < math.log(2),
                           details={"gap": gap, "eps_term": _finite(k * math.log(2) + log_eps)})
    m = k // 2
    log_p = -2 * m * math.log(gap) + _lse(
        math.log(2) + m * math.log(_PACK_DESIGN_INT[kind](m, D)),
        log_eps - k * math.log(D) + 2 * m * math.log(D + 1 / D))
    log_n = -math.log(2) - log_p
    return BoundReport(kind, "far_away_from_fixed_designs/integer_m", log_n, inputs,
                       vacuous=log_n < math.log(2), details={"m": m, "gap": gap})


def _finite(x):
    return 0.0 if x == -math.inf else math.exp(x)


def corollary_packing(group, D: int, k: int) -> BoundReport:
    """Design packing at eps = 2^{-k} D^{-k/2} and Delta = D^{-1/3}.

    ``details['scaling_exponent']`` is log N / log(D/k), the empirical
    exponent in N = (D/k)^{Omega(k)}.
    """
    eps = 2.0 ** (-k) * D ** (-k / 2)
    delta = D ** (-1 / 3)
    rep = design_packing_count(group, D, delta, DesignParams(k, eps))
    rep.formula_id = "corollary/thm-eps-k"
    rep.details["epsilon"] = eps
    rep.details["Delta"] = delta
    rep.details["scaling_exponent"] = rep.log_value / math.log(D / k) if D > k else math.nan
    return rep


# -- empirical separation -------------------------------------------------------------

def pairwise_fidelity_report(states: np.ndarray) -> dict:
    """Extremes of |<psi_i|psi_j>|^2 and of the pure-state trace distance over all pairs i < j."""
    states = np.asarray(states)
    n = states.shape[0]
    if n < 2:
        raise InvalidParameterError("need at least two states")
    gram = np.abs(states.conj() @ states.T) ** 2
    iu = np.triu_indices(n, 1)
    fid = gram[iu]
    td = np.sqrt(np.clip(1 - fid, 0.0, None))
    # disjoint pairs (0,1), (2,3), ... are independent -> honest standard error
    disjoint = np.abs(np.einsum("ij,ij->i", states[0:n - 1:2].conj(), states[1:n:2])) ** 2
    return {
        "n_states": n,
        "max_fidelity": float(fid.max()),
        "min_trace_distance": float(td.min()),
        "mean_fidelity": float(fid.mean()),
        "disjoint_mean_fidelity": float(disjoint.mean()),
        "disjoint_se": float(disjoint.std(ddof=1) / math.sqrt(len(disjoint))) if len(disjoint) > 1 else math.nan,
    }


def empirical_pairwise_fidelity(group: GroupId, n_states: int, rng) -> dict:
    if n_states < 2:
        raise InvalidParameterError("need at least two states")
    rep = pairwise_fidelity_report(sample_states(group, n_states, rng))
    rep["group"] = str(group)
    rep["D"] = group.hilbert_dim
    return rep
