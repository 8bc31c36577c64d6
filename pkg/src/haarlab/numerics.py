"""Field-generic dense linear algebra, seeded random streams, norms and distances.

Matrices and vectors are plain numpy arrays. Real and complex data use the
native dtypes; quaternionic data is stored as real arrays with a trailing axis
of length 4 holding the (1, i, j, k) components.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidDimensionError, InvalidParameterError, NotNormalizedError

NORM_TOL = 1e-8

#: Monte Carlo work is cut into shards of this many samples. Each shard owns a
#: child stream, so results do not depend on how shards are scheduled.
SHARD_SIZE = 1 << 14


class FieldTag(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"
    QUATERNION = "quaternion"

    @property
    def components(self) -> int:
        """Number of real components per scalar."""
        return {FieldTag.REAL: 1, FieldTag.COMPLEX: 2, FieldTag.QUATERNION: 4}[self]


@dataclass(frozen=True)
class RngStream:
    """Reproducible, splittable random stream.

    Backed by the counter-based Philox generator keyed through a
    ``SeedSequence``. ``child(i)`` derives an independent sub-stream, which is
    how Monte Carlo shards and grid points get their own randomness.
    """

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = field(default=())

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *self.path))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, self.path + (int(index),))


def as_generator(rng) -> np.random.Generator:
    """Accept an ``RngStream``, a ``Generator`` or an integer seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator()


def as_stream(rng) -> RngStream:
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng))
    raise TypeError(f"expected RngStream or int seed, got {type(rng).__name__}")


def shard_sizes(n_samples: int, shard_size: int = SHARD_SIZE) -> list[int]:
    full, rest = divmod(int(n_samples), shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def map_shards(fn: Callable[[int, np.random.Generator], object], n_samples: int, rng,
               workers: int = 1, shard_size: int = SHARD_SIZE) -> list:
    """Run ``fn(size, generator)`` over fixed-size shards of ``n_samples``.

    Shard ``i`` always draws from ``stream.child(i)``; ``workers`` only changes
    scheduling, never the numbers produced.
    """
    stream = as_stream(rng)
    jobs = [(size, stream.child(i)) for i, size in enumerate(shard_sizes(n_samples, shard_size))]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(size, s.generator()) for size, s in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(job[0], job[1].generator()), jobs))


def gaussian_vector(dim: int, field: FieldTag, rng, size: int | None = None) -> np.ndarray:
    """Standard Gaussian vector over ``field``.

    Every real component of every entry is an independent N(0, 1) draw, so a
    complex entry is ``g + i h`` and a quaternionic entry ``g + i h + j l + k m``.

    Returns shape ``(dim,)`` (real/complex) or ``(dim, 4)`` (quaternion); with
    ``size`` a leading batch axis is added.
    """
    if int(dim) < 1:
        raise InvalidDimensionError(f"dim must be >= 1, got {dim}")
    gen = as_generator(rng)
    lead = () if size is None else (int(size),)
    if field is FieldTag.REAL:
        return gen.standard_normal(lead + (dim,))
    if field is FieldTag.COMPLEX:
        x = gen.standard_normal(lead + (dim, 2))
        return x[..., 0] + 1j * x[..., 1]
    return gen.standard_normal(lead + (dim, 4))


# -- quaternions ------------------------------------------------------------

def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays (broadcast over leading axes)."""
    a1, b1, c1, d1 = np.moveaxis(np.asarray(p, dtype=float), -1, 0)
    a2, b2, c2, d2 = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ], axis=-1)


def qconj(q: np.ndarray) -> np.ndarray:
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def qinner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Quaternionic inner product sum_i conj(u_i) v_i over axis -2."""
    return qmul(qconj(u), v).sum(axis=-2)


def quaternion_to_pair(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``q = z + j w`` into complex parts ``(z, w)``.

    With this split, left multiplication by a quaternion matrix is complex
    linear on ``(z, w)``, which is the layout used for group elements.
    """
    q = np.asarray(q, dtype=float)
    return q[..., 0] + 1j * q[..., 1], q[..., 2] - 1j * q[..., 3]


def pair_to_quaternion(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.stack([z.real, z.imag, w.real, -w.imag], axis=-1)


def quaternion_to_ket(q: np.ndarray) -> np.ndarray:
    """Complex amplitudes of a quaternionic vector in the interleaved ket layout.

    Entry ``l`` contributes ``q1 + i q2`` at position ``2l`` and ``q3 + i q4`` at
    position ``2l + 1``.
    """
    q = np.asarray(q, dtype=float)
    out = np.empty(q.shape[:-2] + (2 * q.shape[-2],), dtype=complex)
    out[..., 0::2] = q[..., 0] + 1j * q[..., 1]
    out[..., 1::2] = q[..., 2] + 1j * q[..., 3]
    return out


# -- norms and distances ----------------------------------------------------

def schatten_norm(a: np.ndarray, p: float) -> float:
    """Vector p-norm of the singular values of ``a`` (``p = inf`` gives the operator norm)."""
    if not p >= 1:
        raise InvalidParameterError(f"Schatten p must be >= 1, got {p}")
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError("matrix has non-finite entries")
    s = np.linalg.svd(a, compute_uv=False)
    if np.isinf(p):
        return float(s.max(initial=0.0))
    return float(np.linalg.norm(s, ord=p))


def _check_unit(v: np.ndarray, name: str) -> None:
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > NORM_TOL:
        raise NotNormalizedError(f"{name} has norm {nrm!r}, expected 1")


def trace_distance(psi: np.ndarray, phi: np.ndarray) -> float:
    """Trace distance between two pure states, sqrt(1 - |<psi|phi>|^2)."""
    psi = np.asarray(psi)
    phi = np.asarray(phi)
    if psi.shape != phi.shape or psi.ndim != 1:
        raise InvalidDimensionError(f"state shapes differ: {psi.shape} vs {phi.shape}")
    _check_unit(psi, "psi")
    _check_unit(phi, "phi")
    fid = abs(np.vdot(psi, phi)) ** 2
    return float(np.sqrt(max(0.0, 1.0 - fid)))


def entrywise_l1(a: np.ndarray) -> float:
    return float(np.abs(a).sum())


def pooled_mean_var(counts: Sequence[int], means: Sequence[float],
                    variances: Sequence[float]) -> tuple[int, float, float]:
    """Merge per-shard (count, mean, population variance) triples."""
    n = np.asarray(counts, dtype=float)
    mu = np.asarray(means, dtype=float)
    var = np.asarray(variances, dtype=float)
    total = n.sum()
    mean = float((n * mu).sum() / total)
    m2 = float((n * var).sum() + (n * (mu - mean) ** 2).sum())
    return int(total), mean, m2 / total
