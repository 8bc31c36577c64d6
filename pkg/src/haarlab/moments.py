"""Haar expectations of even-degree homogeneous functions via Gaussian integration.

For a function ``f`` homogeneous of degree ``2k`` the Haar average over pure
states equals the average of ``f`` over *unnormalised* standard Gaussian
vectors divided by ``E |g|^{2k}``, the k-th moment of a chi-square variable
with one degree of freedom per real component::

    SO(D):  k! 2^k binom(D/2  + k - 1, k)
    SU(D):  k! 2^k binom(D    + k - 1, k)
    Sp(D):  k! 2^k binom(2D   + k - 1, k)

``haar_expect_direct`` averages over normalised states instead and serves as
the brute-force cross-check.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import special, stats

from .errors import ContractError, DomainError, InvalidParameterError
from .groups import GroupId, gaussian_states
from .numerics import FieldTag, as_generator, map_shards, pooled_mean_var

_LOG_MAX = math.log(np.finfo(float).max)


# -- closed forms ---------------------------------------------------------------

def log_chi_square_moment(dof: int, k: int) -> float:
    if dof < 1:
        raise InvalidParameterError(f"dof must be >= 1, got {dof}")
    if k < 0:
        raise InvalidParameterError(f"k must be >= 0, got {k}")
    return k * math.log(2.0) + math.lgamma(k + dof / 2) - math.lgamma(dof / 2)


def chi_square_moment(dof: int, k: int) -> float:
    """E[X^k] for X ~ chi-square with ``dof`` degrees of freedom: 2^k Gamma(k + dof/2) / Gamma(dof/2)."""
    log_m = log_chi_square_moment(dof, k)
    if log_m > _LOG_MAX:
        raise DomainError(f"chi-square moment overflows double precision (log value {log_m:.1f})")
    return math.exp(log_m)


def generalized_binomial(x: float, k: int) -> float:
    """binom(x, k) for real ``x`` through log-Gamma."""
    return float(np.exp(special.gammaln(x + 1) - special.gammaln(k + 1) - special.gammaln(x - k + 1)))


def _base(group: GroupId) -> float:
    return {"SO": group.dim / 2, "SU": group.dim, "Sp": 2 * group.dim}[group.kind]


def normalization_constant(group: GroupId, k: int) -> float:
    """k! 2^k binom(base + k - 1, k) with base D/2, D, 2D for SO, SU, Sp."""
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    return math.factorial(k) * 2 ** k * generalized_binomial(_base(group) + k - 1, k)


# -- functionals and estimates --------------------------------------------------

@dataclass
class HomogeneousFunctional:
    """A scalar function of amplitudes, homogeneous of degree ``degree_2k``.

    ``evaluate`` is vectorised: it maps an ``(n, H)`` array of amplitude rows to
    ``n`` values. Symplectic functionals receive the complex 2D-dimensional
    ket expansion, never raw quaternions. ``dim`` is the amplitude count the
    function expects (probes use 4, or 8 for symplectic, when unset).
    Construction runs a homogeneity check on random probes unless
    ``check=False``.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    degree_2k: int
    field: FieldTag
    name: str = "f"
    dim: int | None = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.degree_2k < 2 or self.degree_2k % 2:
            raise ContractError(f"degree must be an even positive integer, got {self.degree_2k}")
        if self.check:
            self.verify_homogeneity(np.random.default_rng(0x5EED))

    @property
    def k(self) -> int:
        return self.degree_2k // 2

    def __call__(self, amps: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluate(np.atleast_2d(amps)))

    def verify_homogeneity(self, gen: np.random.Generator, probes: int = 8) -> None:
        width = self.dim or (8 if self.field is FieldTag.QUATERNION else 4)
        if self.field is FieldTag.REAL:
            x = gen.standard_normal((probes, width))
            a = gen.standard_normal(probes)
        else:
            x = gen.standard_normal((probes, width)) + 1j * gen.standard_normal((probes, width))
            a = gen.standard_normal(probes) + 1j * gen.standard_normal(probes)
        fx = self(x)
        fax = self(a[:, None] * x)
        err = np.abs(fax - np.abs(a) ** self.degree_2k * fx)
        bad = err > 1e-8 * (1 + np.abs(fx))
        if bad.any():
            raise ContractError(
                f"{self.name} is not homogeneous of degree {self.degree_2k} "
                f"(max deviation {err.max():.3e})")


@dataclass
class MomentEstimate:
    value: complex | float
    std_error: float
    n_samples: int
    normalization: float = 1.0
    group: str | None = None
    dim: int | None = None
    k: int | None = None

    def to_record(self) -> dict:
        rec = asdict(self)
        v = self.value
        rec["value"] = [v.real, v.imag] if isinstance(v, complex) else float(v)
        rec["D"] = rec.pop("dim")
        return rec

    def to_json(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def pool(cls, parts: list["MomentEstimate"]) -> "MomentEstimate":
        """Merge shard estimates by weighted pooling of means and variances."""
        counts = [p.n_samples for p in parts]
        means = [p.value for p in parts]
        variances = [p.std_error ** 2 * p.n_samples for p in parts]
        n, mean, var = _pool_complex(counts, means, variances)
        head = parts[0]
        return cls(mean, math.sqrt(var / n), n, head.normalization, head.group, head.dim, head.k)


def _pool_complex(counts, means, variances):
    if any(isinstance(m, complex) for m in means):
        n, re, _ = pooled_mean_var(counts, [m.real for m in means], [0.0] * len(means))
        _, im, _ = pooled_mean_var(counts, [m.imag for m in means], [0.0] * len(means))
        mean = complex(re, im)
        total = float(sum(counts))
        var = sum(c * (v + abs(m - mean) ** 2) for c, m, v in zip(counts, means, variances)) / total
        return n, mean, var
    return pooled_mean_var(counts, means, variances)


def _summarize(values: np.ndarray) -> tuple:
    values = np.asarray(values)
    mean = values.mean()
    var = float(np.mean(np.abs(values - mean) ** 2))
    if np.iscomplexobj(values):
        mean = complex(mean)
    else:
        mean = float(mean)
    return len(values), mean, var


def _estimate(group: GroupId, f: HomogeneousFunctional, n_samples: int, rng,
              normalized: bool, workers: int) -> MomentEstimate:
    if f.field is not group.field:
        raise ContractError(f"functional field {f.field.value} does not match {group} ({group.field.value})")
    if n_samples < 2:
        raise InvalidParameterError("need at least two samples")

    def shard(size, gen):
        g, psi = gaussian_states(group, size, gen)
        return _summarize(f(psi if normalized else g))

    parts = map_shards(shard, n_samples, rng, workers=workers)
    n, mean, var = _pool_complex(*zip(*parts))
    # population variance -> sample variance
    se = math.sqrt(var * n / (n - 1) / n)
    norm = 1.0 if normalized else normalization_constant(group, f.k)
    return MomentEstimate(mean / norm, se / norm, n, norm, group.kind, group.dim, f.k)


def haar_expect_gaussian(group: GroupId, f: HomogeneousFunctional, n_samples: int, rng,
                         workers: int = 1) -> MomentEstimate:
    """Gaussian-integration estimate of E_Haar f: mean of f(g) over Gaussian g, divided by the normalisation."""
    return _estimate(group, f, n_samples, rng, normalized=False, workers=workers)


def haar_expect_direct(group: GroupId, f: HomogeneousFunctional, n_samples: int, rng,
                       workers: int = 1) -> MomentEstimate:
    """Brute-force estimate of E_Haar f over normalised Haar states."""
    return _estimate(group, f, n_samples, rng, normalized=True, workers=workers)


# -- functional zoo ---------------------------------------------------------------

def coordinate_power(group: GroupId, index: int, k: int) -> HomogeneousFunctional:
    """|x_index|^{2k}."""
    return HomogeneousFunctional(lambda a: np.abs(a[:, index]) ** (2 * k), 2 * k, group.field,
                                 name=f"|x{index}|^{2 * k}", dim=group.hilbert_dim)


def random_homogeneous_polynomial(group: GroupId, k: int, rng, n_terms: int = 4) -> HomogeneousFunctional:
    """Random real-valued polynomial of degree 2k in the amplitudes.

    Real fields get monomials of 2k coordinates; complex and symplectic
    (embedded) fields get balanced monomials, k amplitudes times k conjugated
    amplitudes, and the real part is taken.
    """
    gen = as_generator(rng)
    width = group.hilbert_dim
    if group.field is FieldTag.REAL:
        idx = gen.integers(0, width, size=(n_terms, 2 * k))
        coef = gen.standard_normal(n_terms)

        def evaluate(a):
            out = np.zeros(a.shape[0])
            for c, row in zip(coef, idx):
                out += c * np.prod(a[:, row], axis=1)
            return out
    else:
        idx = gen.integers(0, width, size=(n_terms, k))
        jdx = gen.integers(0, width, size=(n_terms, k))
        coef = gen.standard_normal(n_terms) + 1j * gen.standard_normal(n_terms)

        def evaluate(a):
            out = np.zeros(a.shape[0], dtype=complex)
            for c, row, col in zip(coef, idx, jdx):
                out += c * np.prod(a[:, row], axis=1) * np.prod(a[:, col].conj(), axis=1)
            return out.real
    return HomogeneousFunctional(evaluate, 2 * k, group.field, name=f"poly(k={k})", dim=width)


# -- radius / direction independence --------------------------------------------

def radial_angular_independence(dof: int, n_samples: int, rng) -> dict:
    """Empirical check that |g| and g/|g| are independent for real Gaussian g.

    Reports the Pearson correlation of the radius with the first coordinate of
    the direction, and the KS p-value comparing that coordinate between samples
    whose radius lies below and above the median radius.
    """
    if n_samples < 10_000:
        raise InvalidParameterError("radial_angular_independence needs n_samples >= 1e4")
    gen = as_generator(rng)
    g = gen.standard_normal((n_samples, dof))
    r = np.linalg.norm(g, axis=1)
    u1 = g[:, 0] / r
    if dof == 1:
        # direction is a sign; independence is trivial, correlation ill-posed
        return {"dof": dof, "n_samples": n_samples, "correlation": 0.0, "ks_pvalue": 1.0,
                "degenerate": True}
    corr = float(np.corrcoef(r, u1)[0, 1])
    med = np.median(r)
    p = float(stats.ks_2samp(u1[r <= med], u1[r > med]).pvalue)
    return {"dof": dof, "n_samples": n_samples, "correlation": corr, "ks_pvalue": p,
            "degenerate": False}
