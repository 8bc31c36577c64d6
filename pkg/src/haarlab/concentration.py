"""Levy concentration constants and bounds, the design large-deviation bound,
and empirical tail estimation against them."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError, DomainError, InvalidParameterError
from .groups import GroupId, sample_matrices, sample_states
from .numerics import as_generator, as_stream, map_shards


def levy_constant(group: GroupId) -> float:
    """C_G in the sub-Gaussian tail: 4/(D-2) for SO, 2/D for SU, 1/(D+1) for Sp (quaternionic D)."""
    d = group.dim
    if group.kind == "SO":
        if d <= 2:
            raise DomainError(f"Levy constant for SO(D) needs D >= 3, got D={d}")
        return 4.0 / (d - 2)
    if group.kind == "SU":
        return 2.0 / d
    return 1.0 / (d + 1)


def levy_rate(group: GroupId, lipschitz: float) -> float:
    """Exponent rate a = 1 / (2 L^2 C_G), so that the tail reads 2 exp(-a tau^2)."""
    return 1.0 / (2.0 * lipschitz ** 2 * levy_constant(group))


def levy_bound(group: GroupId, lipschitz: float, tau) -> float | np.ndarray:
    """2 exp(-tau^2 / (2 L^2 C_G))."""
    if lipschitz <= 0:
        raise InvalidParameterError("Lipschitz constant must be positive")
    tau = np.asarray(tau, dtype=float)
    out = 2.0 * np.exp(-levy_rate(group, lipschitz) * tau ** 2)
    return float(out) if out.ndim == 0 else out


def design_deviation_bound(group: GroupId, k: int, epsilon: float, K: int, alpha: float,
                           mean_abs: float, delta: float, m: int, a: float, C: float = 2.0) -> float:
    """Large-deviation bound for an epsilon-approximate k-design::

        delta^{-2m} ( C (m/a)^m + epsilon / D^k (alpha + |E f|)^{2m} )

    ``C`` and ``a`` are the Haar tail parameters ``Pr(|f - E f| >= delta) <= C exp(-a delta^2)``;
    for Levy's lemma ``C = 2`` and ``a = levy_rate(group, L)``. ``D`` is the
    Hilbert dimension of the group.
    """
    if int(m) != m or m < 1:
        raise ContractError(f"m must be a positive integer, got {m}")
    if 2 * m * K > k:
        raise ContractError(f"need 2 m K <= k, got 2*{m}*{K} > {k}")
    if delta <= 0 or a <= 0:
        raise InvalidParameterError("delta and a must be positive")
    if epsilon < 0:
        raise InvalidParameterError("epsilon must be nonnegative")
    m = int(m)
    d = group.hilbert_dim
    log_haar = math.log(C) + m * math.log(m / a)
    terms = [log_haar]
    if epsilon > 0:
        terms.append(math.log(epsilon) - k * math.log(d) + 2 * m * math.log(alpha + mean_abs))
    log_total = float(np.logaddexp.reduce(terms)) - 2 * m * math.log(delta)
    return math.exp(log_total)


@dataclass
class LipschitzFunctional:
    """Real function on the group with a Lipschitz bound in Hilbert-Schmidt distance.

    With ``on_states=True`` the function only depends on ``U|0>`` and
    ``evaluate`` receives an ``(n, H)`` array of states; a bound on the state
    space carries over to the group. Otherwise it receives ``(n, H, H)``
    matrices.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    lipschitz_bound: float
    on_states: bool = True
    name: str = "f"

    def lipschitz_ratio(self, group: GroupId, rng, n_pairs: int = 100) -> float:
        """Largest observed |f(x) - f(y)| / (L |x - y|_2) over random and nearby pairs."""
        gen = as_generator(rng)
        half = n_pairs // 2
        draw = sample_states if self.on_states else sample_matrices
        x = draw(group, n_pairs, gen)
        y = draw(group, n_pairs, gen)
        if self.on_states:
            # nearby pairs probe the local slope
            y[:half] = x[:half] + 1e-3 * y[:half]
            y[:half] /= np.linalg.norm(y[:half], axis=1, keepdims=True)
        diff = np.abs(self.evaluate(x) - self.evaluate(y))
        dist = np.linalg.norm((x - y).reshape(n_pairs, -1), axis=1)
        ok = dist > 0
        return float(np.max(diff[ok] / (self.lipschitz_bound * dist[ok]), initial=0.0))


def projector_functional(phi: np.ndarray) -> LipschitzFunctional:
    """f(U) = <0|U^dag M U|0> with M = |phi><phi|; Lipschitz constant 2 ||M||_inf = 2."""
    phi = np.asarray(phi) / np.linalg.norm(phi)
    return LipschitzFunctional(lambda psi: np.abs(psi @ phi.conj()) ** 2, 2.0, True, "projector")


@dataclass
class TailReport:
    tau_grid: list[float]
    empirical_tail: list[float]
    analytic_bound: list[float]
    n_samples: int
    empirical_mean: float
    exact_mean: float | None = None
    std_error: list[float] = field(default_factory=list)

    def violations(self, n_se: float = 3.0) -> list[float]:
        """Grid points where the empirical tail exceeds the bound by more than ``n_se`` binomial SE."""
        return [t for t, e, b, s in zip(self.tau_grid, self.empirical_tail, self.analytic_bound,
                                        self.std_error) if e > b + n_se * s]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["tau", "empirical", "bound", "se"])
        for row in zip(self.tau_grid, self.empirical_tail, self.analytic_bound, self.std_error):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()


def empirical_tail(group: GroupId, f: LipschitzFunctional, tau_grid: Sequence[float],
                   n_samples: int, rng, exact_mean: float | None = None,
                   workers: int = 1) -> TailReport:
    """Fraction of Haar samples with |f(U) - mean| >= tau, next to the Levy bound.

    The mean is the sample mean; a known exact mean can be passed along for
    reporting.
    """
    if n_samples < 1000:
        raise InvalidParameterError("empirical_tail needs n_samples >= 1000")
    probe_rng = rng if isinstance(rng, np.random.Generator) else as_stream(rng).child(1 << 20)
    ratio = f.lipschitz_ratio(group, probe_rng)
    if ratio > 1.0 + 1e-9:
        warnings.warn(f"{f.name}: observed slope exceeds the declared Lipschitz bound "
                      f"(ratio {ratio:.3f})", RuntimeWarning, stacklevel=2)
    draw = sample_states if f.on_states else sample_matrices
    values = np.concatenate(map_shards(lambda size, gen: np.asarray(f.evaluate(draw(group, size, gen)), float),
                                       n_samples, rng, workers=workers, shard_size=2048))
    mean = float(values.mean())
    dev = np.abs(values - mean)
    taus = [float(t) for t in tau_grid]
    tail = [float(np.mean(dev >= t)) for t in taus]
    se = [math.sqrt(max(p * (1 - p), 0.0) / n_samples) for p in tail]
    bound = [float(levy_bound(group, f.lipschitz_bound, t)) for t in taus]
    return TailReport(taus, tail, bound, n_samples, mean, exact_mean, se)
