"""First- and second-moment twirls through orthonormal commutant bases.

The twirl ``rho -> E_U U^{(x)k} rho U^{dag (x)k}`` is the Hilbert-Schmidt
projection onto the commutant of the k-fold tensor representation, so with a
Hermitian orthonormal basis ``B_eta`` of that commutant

    twirl(rho) = sum_eta Tr(B_eta rho) B_eta.

Spanning sets per group (k = 2):

* SU: identity and swap ``F``.
* SO: ``|phi+><phi+|``, ``(I - F)/2`` and ``(I + F)/2 - |phi+><phi+|``.
* Sp: identity, ``F`` and ``(I (x) Omega)|phi+><phi+|(I (x) Omega)^dag`` in the
  block layout of :mod:`haarlab.groups`.

These are Gram-Schmidt orthonormalised in the order listed; linearly dependent
operators (e.g. for Sp(1) = SU(2)) are dropped. SO(2) and SO(4) have invariants
built from the Levi-Civita tensor that the orthogonal group does not have; they
are added so that the projector really is the SO twirl in those dimensions.
SO(2) is also the only case with a nontrivial first-moment commutant (the
rotation generator commutes with every rotation).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InvalidParameterError, ResourceError
from .groups import GroupId, sample_matrices, symplectic_form
from .numerics import as_generator, map_shards, schatten_norm

RANK_TOL = 1e-10
MAX_TWIRL_DIM = 64


@dataclass
class CommutantBasis:
    group: GroupId
    order_k: int
    elements: list[np.ndarray]

    @property
    def space_dim(self) -> int:
        return self.group.hilbert_dim ** self.order_k

    def gram(self) -> np.ndarray:
        b = np.array(self.elements)
        return np.einsum("aij,bij->ab", b.conj(), b)

    def commutation_error(self, n_probes: int, rng) -> float:
        """Largest entrywise ``|[B, V^{(x)k}]|`` over random group elements ``V``."""
        vs = sample_matrices(self.group, n_probes, rng)
        worst = 0.0
        for v in vs:
            vk = _tensor_power(v, self.order_k)
            for b in self.elements:
                worst = max(worst, float(np.abs(vk @ b - b @ vk).max()))
        return worst


def _tensor_power(v, k):
    out = v
    for _ in range(k - 1):
        out = np.kron(out, v)
    return out


def swap(d: int) -> np.ndarray:
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def max_entangled(d: int) -> np.ndarray:
    return np.eye(d).reshape(d * d) / np.sqrt(d)


def _levi_civita(d: int) -> np.ndarray:
    eps = np.zeros((d,) * d)
    for perm in itertools.permutations(range(d)):
        inversions = sum(perm[a] > perm[b] for a in range(d) for b in range(a + 1, d))
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


def _so_extra_operators(d: int, k: int) -> list[np.ndarray]:
    """Levi-Civita invariants of SO(d) acting on (C^d)^{(x)k}, d in {2, 4}."""
    if k == 1:
        return [_levi_civita(2)] if d == 2 else []
    if d == 4:
        return [_levi_civita(4).reshape(16, 16)]
    if d != 2:
        return []
    eps, delta = _levi_civita(2), np.eye(2)
    ops = []
    # slots 0, 1 = row indices, 2, 3 = column indices
    for (a, b), (c, e) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        for t1, t2 in ((eps, delta), (delta, eps), (eps, eps)):
            tensor = np.einsum(f"{'abcd'[a]}{'abcd'[b]},{'abcd'[c]}{'abcd'[e]}->abcd", t1, t2)
            ops.append(tensor.reshape(4, 4))
    return ops


def _hermitian_parts(ops):
    out = []
    for x in ops:
        x = np.asarray(x, dtype=complex)
        out.append((x + x.conj().T) / 2)
        out.append((x - x.conj().T) / 2j)
    return out


def orthonormalize(ops: list[np.ndarray], tol: float = RANK_TOL) -> list[np.ndarray]:
    """Gram-Schmidt under <A, B> = Tr(A^dag B), keeping the listed order and dropping dependent operators."""
    basis: list[np.ndarray] = []
    for x in ops:
        v = np.asarray(x, dtype=complex).copy()
        for _ in range(2):  # reorthogonalise once for stability
            for b in basis:
                v -= np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > tol * max(1.0, np.linalg.norm(x)):
            basis.append(v / nrm)
    return basis


def first_moment_basis(group: GroupId) -> CommutantBasis:
    h = group.hilbert_dim
    ops = [np.eye(h)]
    if group.kind == "SO":
        ops += _hermitian_parts(_so_extra_operators(group.dim, 1))
    return CommutantBasis(group, 1, orthonormalize(ops))


def second_moment_basis(group: GroupId) -> CommutantBasis:
    h = group.hilbert_dim
    if h > 8:
        raise ResourceError(f"second-moment basis limited to Hilbert dimension <= 8, got {h}")
    eye, f = np.eye(h * h), swap(h)
    if group.kind == "SU":
        ops = [eye, f]
    elif group.kind == "SO":
        phi = max_entangled(h)
        p = np.outer(phi, phi)
        ops = [p, (eye - f) / 2, (eye + f) / 2 - p]
        ops += _hermitian_parts(_so_extra_operators(group.dim, 2))
    else:
        v = np.kron(np.eye(h), symplectic_form(h)) @ max_entangled(h)
        ops = [eye, f, h * np.outer(v, v.conj())]
    return CommutantBasis(group, 2, orthonormalize(ops))


def commutant_basis(group: GroupId, k: int) -> CommutantBasis:
    if k == 1:
        return first_moment_basis(group)
    if k == 2:
        return second_moment_basis(group)
    raise InvalidParameterError("only k = 1 and k = 2 commutants are available")


def _check_square(rho, d, what="rho"):
    rho = np.asarray(rho)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise ContractError(f"{what} must be square, got shape {rho.shape}")
    if d is not None and rho.shape[-1] != d:
        raise ContractError(f"{what} has dimension {rho.shape[-1]}, expected {d}")
    return rho


def first_moment_channel(group: GroupId, rho: np.ndarray) -> np.ndarray:
    """E_U U rho U^dag. Equals Tr(rho) I / D except on SO(2), whose rotation generator survives."""
    rho = _check_square(rho, group.hilbert_dim)
    if group.kind == "SO" and group.dim == 2:
        return twirl(group, rho, first_moment_basis(group))
    return np.trace(rho, axis1=-2, axis2=-1)[..., None, None] * np.eye(rho.shape[-1]) / rho.shape[-1]


def twirl(group: GroupId, rho: np.ndarray, basis: CommutantBasis) -> np.ndarray:
    """Projection of ``rho`` (or a stack of them) onto the span of ``basis``."""
    if basis.group != group:
        raise ContractError(f"basis belongs to {basis.group}, not {group}")
    rho = _check_square(rho, basis.space_dim)
    b = np.array(basis.elements)
    coeff = np.einsum("eij,...ji->...e", b, rho)
    return np.einsum("...e,eij->...ij", coeff, b)


@dataclass
class TwirlEstimate:
    """Monte Carlo twirl with entrywise standard errors of real and imaginary parts."""

    mean: np.ndarray
    se_real: np.ndarray
    se_imag: np.ndarray
    n_samples: int

    def zscores(self, exact: np.ndarray, floor: float = 1e-12) -> np.ndarray:
        """Entrywise max(|re diff| / (se_re + floor), |im diff| / (se_im + floor))."""
        d = self.mean - exact
        return np.maximum(np.abs(d.real) / (self.se_real + floor), np.abs(d.imag) / (self.se_imag + floor))


def _conjugate_batch(us, k, rho):
    """U^{(x)k} rho U^{dag(x)k} for a stack of U and a stack of rho -> (n_rho, n_U, d, d)."""
    if k == 1:
        kk = us
    else:
        n, h, _ = us.shape
        kk = np.einsum("nai,nbj->nabij", us, us).reshape(n, h * h, h * h)
    kh = kk.conj().transpose(0, 2, 1)
    return np.stack([kk @ r @ kh for r in rho])


def mc_twirl(group: GroupId, k: int, rho: np.ndarray, n_samples: int, rng,
             workers: int = 1) -> TwirlEstimate:
    """Monte Carlo average of U^{(x)k} rho U^{dag (x)k} over Haar samples.

    ``rho`` may carry a leading stack axis; the same group samples are reused
    for every input.
    """
    d = group.hilbert_dim ** k
    if d > MAX_TWIRL_DIM:
        raise ResourceError(f"D^k = {d} exceeds {MAX_TWIRL_DIM}")
    rho = _check_square(rho, d)
    single = rho.ndim == 2
    stack = rho[None] if single else rho

    def shard(size, gen):
        out = _conjugate_batch(sample_matrices(group, size, gen), k, stack)
        return size, out.sum(axis=1), (out.real ** 2).sum(axis=1), (out.imag ** 2).sum(axis=1)

    parts = map_shards(shard, n_samples, rng, workers=workers, shard_size=4096)
    n = sum(p[0] for p in parts)
    s = sum(p[1] for p in parts)
    s2r = sum(p[2] for p in parts)
    s2i = sum(p[3] for p in parts)
    mean = s / n
    var_r = np.maximum(s2r / n - mean.real ** 2, 0.0) * n / (n - 1)
    var_i = np.maximum(s2i / n - mean.imag ** 2, 0.0) * n / (n - 1)
    est = TwirlEstimate(mean, np.sqrt(var_r / n), np.sqrt(var_i / n), n)
    if single:
        est = TwirlEstimate(est.mean[0], est.se_real[0], est.se_imag[0], n)
    return est


def design_moment_deviation(ensemble_samples, reference_group: GroupId, k: int,
                            rho: np.ndarray) -> float:
    """Operator-norm distance between an ensemble's k-th moment twirl and the exact Haar twirl."""
    if k not in (1, 2):
        raise InvalidParameterError("k must be 1 or 2")
    us = [getattr(u, "matrix", u) for u in ensemble_samples]
    if not us:
        raise ContractError("ensemble is empty")
    us = np.asarray(us)
    if us.shape[-1] != reference_group.hilbert_dim:
        raise ContractError(
            f"ensemble acts on dimension {us.shape[-1]}, reference group on {reference_group.hilbert_dim}")
    rho = _check_square(rho, reference_group.hilbert_dim ** k)
    empirical = _conjugate_batch(us, k, rho[None])[0].mean(axis=0)
    exact = twirl(reference_group, rho, commutant_basis(reference_group, k))
    return schatten_norm(empirical - exact, np.inf)


def random_density_matrix(d: int, rng) -> np.ndarray:
    """Full-rank random density matrix (normalised Wishart)."""
    gen = as_generator(rng)
    g = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def numerical_commutant_dimension(group: GroupId, k: int, n_probes: int, rng) -> int:
    """Dimension of {X : [X, V^{(x)k}] = 0 for sampled V}, via a null-space computation.

    Independent of the spanning lists above; used to certify the bases.
    """
    d = group.hilbert_dim ** k
    rows = []
    for v in sample_matrices(group, n_probes, rng):
        vk = _tensor_power(v, k)
        # vec(V X - X V) = (I (x) V - V^T (x) I) vec(X) in column-major vec
        rows.append(np.kron(np.eye(d), vk) - np.kron(vk.T, np.eye(d)))
    s = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return int(np.sum(s < 1e-8 * s.max())) + max(0, d * d - len(s))
