"""Haar sampling of group elements and pure states for SO(D), SU(D) and Sp(D).

Group elements come from the Ginibre ensemble over the group's field followed
by a phase-fixed QR factorisation (real and complex case) or quaternionic
modified Gram-Schmidt (symplectic case, computed through a structured
complex QR, see :func:`structured_symplectic_qr`). Sp(D) acts on the quaternionic space
H^D and is returned in its 2D x 2D complex embedding

    U = [[X, -conj(Y)],
         [Y,  conj(X)]],      quaternion entries x + j y,

for which ``U @ omega @ U.T == omega`` with ``omega = [[0, I], [-I, 0]]``.

Pure states are normalised Gaussian vectors over the same field. Symplectic
states are expanded in the interleaved ket layout (``q1 + i q2`` then
``q3 + i q4`` per quaternionic amplitude). The two layouts differ by a fixed
permutation and conjugation of half the coordinates, neither of which changes
the uniform distribution on the sphere.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from .errors import InvalidDimensionError, InvalidParameterError
from .numerics import (FieldTag, as_generator, gaussian_vector, quaternion_to_ket,
                       quaternion_to_pair)

KINDS = ("SO", "SU", "Sp")

UNITARITY_TOL = 1e-10
DET_TOL = 1e-8
SYMPLECTIC_TOL = 1e-10


@dataclass(frozen=True)
class GroupId:
    """A classical compact group. ``dim`` is quaternionic for Sp."""

    kind: str
    dim: int

    def __post_init__(self):
        kind = normalize_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dim", int(self.dim))
        if kind in ("SO", "SU") and self.dim < 2:
            raise InvalidDimensionError(f"{kind} requires dim >= 2, got {self.dim}")
        if kind == "Sp" and self.dim < 1:
            raise InvalidDimensionError(f"Sp requires dim >= 1, got {self.dim}")

    @classmethod
    def for_qubits(cls, kind: str, n: int) -> "GroupId":
        """Group acting on n qubits; Sp(2^(n-1)) embeds into U(2^n)."""
        kind = normalize_kind(kind)
        if n < 1:
            raise InvalidDimensionError(f"need at least one qubit, got n={n}")
        return cls(kind, 2 ** (n - 1) if kind == "Sp" else 2 ** n)

    @property
    def field(self) -> FieldTag:
        return {"SO": FieldTag.REAL, "SU": FieldTag.COMPLEX, "Sp": FieldTag.QUATERNION}[self.kind]

    @property
    def hilbert_dim(self) -> int:
        """Dimension of the complex space the matrices act on."""
        return 2 * self.dim if self.kind == "Sp" else self.dim

    def __str__(self):
        return f"{self.kind}({self.dim})"


def normalize_kind(kind: str) -> str:
    k = str(kind).strip().lower()
    table = {"so": "SO", "su": "SU", "u": "SU", "sp": "Sp", "usp": "Sp"}
    if k not in table:
        raise InvalidParameterError(f"unknown group {kind!r}; expected one of so, su, sp")
    return table[k]


def as_group(group, dim: int | None = None) -> GroupId:
    if isinstance(group, GroupId):
        return group
    if dim is None:
        raise InvalidParameterError("dimension required when group is given by name")
    return GroupId(group, dim)


def symplectic_form(hilbert_dim: int) -> np.ndarray:
    """Block form [[0, I], [-I, 0]] on C^hilbert_dim."""
    if hilbert_dim % 2:
        raise InvalidDimensionError("symplectic form needs an even dimension")
    h = hilbert_dim // 2
    eye = np.eye(h)
    zero = np.zeros((h, h))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class GroupElement:
    group: GroupId
    matrix: np.ndarray

    def check(self) -> None:
        """Raise ``AssertionError`` if the defining constraints are violated."""
        for name, err, tol in constraint_errors(self.group, self.matrix):
            assert err <= tol, f"{self.group}: {name} violated by {err:.3e} (tol {tol:.0e})"


@dataclass(frozen=True)
class PureState:
    state: np.ndarray
    source_group: GroupId


def constraint_errors(group: GroupId, u: np.ndarray) -> list[tuple[str, float, float]]:
    """Max-entry deviations from unitarity, det = 1 and the symplectic condition."""
    u = np.asarray(u)
    eye = np.eye(u.shape[-1])
    out = [("unitarity", float(np.abs(u.conj().T @ u - eye).max()), UNITARITY_TOL)]
    if group.kind in ("SO", "SU"):
        out.append(("determinant", float(abs(np.linalg.det(u) - 1.0)), DET_TOL))
    else:
        om = symplectic_form(u.shape[-1])
        out.append(("symplectic", float(np.abs(u @ om @ u.T - om).max()), SYMPLECTIC_TOL))
    return out


# -- matrix samplers ----------------------------------------------------------

def _haar_orthogonal(gen, dim, size):
    a = gen.standard_normal((size, dim, dim))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[:, None, :]
    # det -1 coset -> SO by flipping the first column
    det = np.linalg.det(q)
    q[:, :, 0] *= np.sign(det)[:, None]
    return q


def _haar_unitary(gen, dim, size, special):
    x = gen.standard_normal((size, dim, dim, 2))
    a = x[..., 0] + 1j * x[..., 1]
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[:, None, :]
    if special:
        det = np.linalg.det(q)
        q = q / (det ** (1.0 / dim))[:, None, None]
    return q


def quaternion_gram_schmidt(z: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt on the columns of a quaternionic matrix ``Z + j W``.

    Works over a leading batch axis. Coefficients are quaternions multiplied
    from the right, and the inner product is sum conj(u_i) v_i, so the
    triangular factor has a positive real diagonal and the factorisation is
    unique. Returns the orthonormal factor in the same (Z, W) split.
    """
    z = np.array(z, dtype=complex, copy=True)
    w = np.array(w, dtype=complex, copy=True)
    n = z.shape[-1]
    for i in range(n):
        zi, wi = z[..., :, i], w[..., :, i]
        nrm = np.sqrt((np.abs(zi) ** 2 + np.abs(wi) ** 2).sum(axis=-1))
        zi /= nrm[..., None]
        wi /= nrm[..., None]
        if i + 1 == n:
            break
        zr, wr = z[..., :, i + 1:], w[..., :, i + 1:]
        # <u, v> = (z_u^H z_v + w_u^H w_v) + j (z_u^T w_v - w_u^T z_v)
        alpha = np.einsum("...k,...kj->...j", zi.conj(), zr) + np.einsum("...k,...kj->...j", wi.conj(), wr)
        beta = np.einsum("...k,...kj->...j", zi, wr) - np.einsum("...k,...kj->...j", wi, zr)
        # v <- v - u (alpha + j beta)
        zr -= zi[..., :, None] * alpha[..., None, :] - wi.conj()[..., :, None] * beta[..., None, :]
        wr -= wi[..., :, None] * alpha[..., None, :] + zi.conj()[..., :, None] * beta[..., None, :]
    return z, w


def embed_quaternion_matrix(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Complex 2D x 2D embedding [[Z, -conj(W)], [W, conj(Z)]]."""
    top = np.concatenate([z, -w.conj()], axis=-1)
    bottom = np.concatenate([w, z.conj()], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def structured_symplectic_qr(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Orthonormal factor of a quaternionic matrix via complex Householder QR.

    The embedded columns are ordered ``v_1, J v_1, v_2, J v_2, ...`` with the
    antiunitary ``J (z; w) = (-conj(w); conj(z))``. Every leading span is then
    J-invariant, so the phase-fixed complex QR returns ``J q_i`` right after
    ``q_i``: the same factor that :func:`quaternion_gram_schmidt` produces, at
    LAPACK speed. Returns the 2D x 2D embedding.
    """
    d = z.shape[-1]
    m = embed_quaternion_matrix(z, w)
    order = np.empty(2 * d, dtype=int)
    order[0::2] = np.arange(d)
    order[1::2] = np.arange(d, 2 * d)
    q, r = np.linalg.qr(m[..., order])
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[..., None, :]
    out = np.empty_like(q)
    out[..., order] = q
    return out


def _haar_symplectic(gen, dim, size):
    q = gen.standard_normal((size, dim, dim, 4))
    z, w = quaternion_to_pair(q)
    return structured_symplectic_qr(z, w)


def sample_matrices(group: GroupId, n: int, rng, special: bool = False) -> np.ndarray:
    """Stack of ``n`` Haar-distributed matrices, shape (n, H, H) with H the Hilbert dimension.

    For SU the sampler draws from U(D); ``special=True`` divides by a D-th root
    of the determinant so that det = 1 exactly. Conjugation channels are
    unaffected by the global phase.
    """
    gen = as_generator(rng)
    n = int(n)
    if group.kind == "SO":
        return _haar_orthogonal(gen, group.dim, n)
    if group.kind == "SU":
        return _haar_unitary(gen, group.dim, n, special)
    return _haar_symplectic(gen, group.dim, n)


def sample_group_element(group: GroupId, rng, special: bool = True) -> GroupElement:
    return GroupElement(group, sample_matrices(group, 1, rng, special=special)[0])


# -- state samplers -----------------------------------------------------------

def gaussian_states(group: GroupId, n: int, gen: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalised Gaussian amplitudes and their normalised versions.

    Returns ``(g, psi)`` with ``psi = g / |g|``, both in the complex/real
    amplitude layout used by :func:`sample_states`.
    """
    g = gaussian_vector(group.dim, group.field, gen, size=n)
    amps = quaternion_to_ket(g) if group.kind == "Sp" else g
    nrm = np.linalg.norm(amps, axis=1)
    while np.any(nrm < 1e-30):  # probability ~0
        bad = nrm < 1e-30
        redraw = gaussian_vector(group.dim, group.field, gen, size=int(bad.sum()))
        amps[bad] = quaternion_to_ket(redraw) if group.kind == "Sp" else redraw
        nrm = np.linalg.norm(amps, axis=1)
    return amps, amps / nrm[:, None]


def sample_states(group: GroupId, n: int, rng) -> np.ndarray:
    """``n`` Haar-random pure states as rows of an (n, H) array."""
    return gaussian_states(group, int(n), as_generator(rng))[1]


def sample_state(group: GroupId, rng) -> PureState:
    return PureState(sample_states(group, 1, rng)[0], group)


# -- self-certification -------------------------------------------------------

def _probe_statistics(u: np.ndarray) -> dict[str, np.ndarray]:
    return {
        "re_trace": np.trace(u, axis1=-2, axis2=-1).real,
        "re_entry01": u[:, 0, 1].real,
        "fidelity00": np.abs(u[:, 0, 0]) ** 2,
    }


def invariance_check(group: GroupId, n_samples: int, probe_count: int, rng,
                     probes: Iterable[np.ndarray] | None = None) -> list[dict]:
    """Two-sample KS tests of left and right Haar invariance.

    The sample is split into two independent halves ``A`` and ``B``. For each
    probe element ``V`` and each scalar statistic ``t`` the report holds the KS
    p-values of ``t(A)`` against ``t(V B)`` and against ``t(B V)``.
    """
    if n_samples < 1000:
        raise InvalidParameterError("invariance_check needs n_samples >= 1000")
    gen = as_generator(rng)
    if probes is None:
        probes = list(sample_matrices(group, probe_count, gen, special=True))
    else:
        probes = [np.asarray(v) for v in probes]
    half = n_samples // 2
    a = sample_matrices(group, half, gen)
    b = sample_matrices(group, half, gen)
    ref = _probe_statistics(a)
    report = []
    for idx, v in enumerate(probes):
        left = _probe_statistics(v @ b)
        right = _probe_statistics(b @ v)
        for name in ref:
            report.append({
                "probe": idx,
                "statistic": name,
                "p_left": float(stats.ks_2samp(ref[name], left[name]).pvalue),
                "p_right": float(stats.ks_2samp(ref[name], right[name]).pvalue),
            })
    return report


# -- export -------------------------------------------------------------------

def matrix_csv_rows(m: np.ndarray) -> list[list[float]]:
    """One row per matrix row; complex entries become consecutive re, im pairs."""
    m = np.atleast_2d(np.asarray(m))
    if np.iscomplexobj(m):
        return [[float(x) for z in row for x in (z.real, z.imag)] for row in m]
    return [[float(x) for x in row] for row in m]


def write_matrix_csv(path, m: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        csv.writer(fh).writerows(matrix_csv_rows(m))


def read_matrix_csv(path, complex_entries: bool) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row]
    a = np.array(rows)
    if complex_entries:
        return a[:, 0::2] + 1j * a[:, 1::2]
    return a
