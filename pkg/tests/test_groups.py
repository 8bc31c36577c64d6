import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from haarlab.errors import InvalidDimensionError, InvalidParameterError
from haarlab.groups import (GroupId, constraint_errors, embed_quaternion_matrix, invariance_check,
                            normalize_kind, quaternion_gram_schmidt, read_matrix_csv, sample_group_element,
                            sample_matrices, sample_state, sample_states, structured_symplectic_qr,
                            symplectic_form, write_matrix_csv)
from haarlab.numerics import FieldTag, RngStream, quaternion_to_pair

GROUPS = [GroupId("SO", 4), GroupId("SO", 5), GroupId("SU", 3), GroupId("SU", 8),
          GroupId("Sp", 1), GroupId("Sp", 2), GroupId("Sp", 5)]


def test_group_id_validation():
    with pytest.raises(InvalidDimensionError):
        GroupId("SO", 1)
    with pytest.raises(InvalidDimensionError):
        GroupId("SU", 1)
    with pytest.raises(InvalidDimensionError):
        GroupId("Sp", 0)
    with pytest.raises(InvalidParameterError):
        normalize_kind("gl")
    assert GroupId("sp", 1).hilbert_dim == 2
    assert GroupId("usp", 3).kind == "Sp" and GroupId("u", 3).kind == "SU"


@pytest.mark.parametrize("n", [1, 2, 5])
def test_for_qubits(n):
    if n > 1:
        assert GroupId.for_qubits("SO", n).hilbert_dim == 2 ** n
    for kind in ("SU", "Sp"):
        assert GroupId.for_qubits(kind, n).hilbert_dim == 2 ** n
    assert GroupId.for_qubits("Sp", n).dim == 2 ** (n - 1)
    assert GroupId.for_qubits("SO", n).field is FieldTag.REAL


@pytest.mark.parametrize("group", GROUPS, ids=str)
def test_constraints(group):
    for u in sample_matrices(group, 20, RngStream(1), special=True):
        for name, err, tol in constraint_errors(group, u):
            assert err <= tol, name
    sample_group_element(group, RngStream(2)).check()


def test_so_determinant_positive():
    u = sample_matrices(GroupId("SO", 4), 200, RngStream(3))
    assert np.allclose(np.linalg.det(u), 1.0)
    assert u.dtype == float


def test_su_without_phase_fix_is_unitary_not_special():
    u = sample_matrices(GroupId("SU", 4), 50, RngStream(3), special=False)
    assert np.allclose(u.conj().transpose(0, 2, 1) @ u, np.eye(4), atol=1e-10)
    assert np.abs(np.linalg.det(u) - 1).max() > 1e-3


def test_sp_symplectic_form():
    om = symplectic_form(4)
    u = sample_group_element(GroupId("Sp", 2), RngStream(4)).matrix
    assert np.abs(u @ om @ u.T - om).max() <= 1e-10


@pytest.mark.parametrize("d", [1, 2, 3, 6])
def test_structured_qr_matches_quaternionic_gram_schmidt(d):
    q = np.random.default_rng(d).standard_normal((4, d, d, 4))
    z, w = quaternion_to_pair(q)
    zq, wq = quaternion_gram_schmidt(z, w)
    np.testing.assert_allclose(structured_symplectic_qr(z, w), embed_quaternion_matrix(zq, wq), atol=1e-12)


def test_su8_first_moment():
    n = 100_000
    u = sample_matrices(GroupId("SU", 8), n, RngStream(5))
    f = np.abs(u[:, 0, 0]) ** 2
    assert abs(f.mean() - 1 / 8) <= 5 * f.std(ddof=1) / math.sqrt(n)


# -- states --------------------------------------------------------------------------------

@pytest.mark.parametrize("group", GROUPS, ids=str)
def test_states_normalized(group):
    psi = sample_states(group, 100, RngStream(6))
    assert psi.shape == (100, group.hilbert_dim)
    np.testing.assert_allclose(np.linalg.norm(psi, axis=1), 1, atol=1e-12)
    st_ = sample_state(group, RngStream(6))
    assert st_.source_group == group


def test_so2_angles_uniform():
    psi = sample_states(GroupId("SO", 2), 100_000, RngStream(7))
    theta = np.arctan2(psi[:, 1], psi[:, 0])
    assert stats.kstest(theta, stats.uniform(-np.pi, 2 * np.pi).cdf).pvalue > 0.01


@pytest.mark.parametrize("group", [GroupId("SU", 4), GroupId("Sp", 2), GroupId("SO", 8)], ids=str)
def test_born_probabilities_uniform_on_average(group):
    n = 100_000
    p = np.abs(sample_states(group, n, RngStream(8))) ** 2
    se = p.std(axis=0, ddof=1) / math.sqrt(n)
    assert np.all(np.abs(p.mean(axis=0) - 1 / group.hilbert_dim) <= 5 * se)


@pytest.mark.parametrize("group", [GroupId("SO", 4), GroupId("SU", 4), GroupId("Sp", 2), GroupId("Sp", 4)], ids=str)
def test_state_sampler_is_pushforward_of_group_sampler(group):
    n = 10_000
    a = np.abs(sample_states(group, n, RngStream(9))[:, 0]) ** 2
    b = np.abs(sample_matrices(group, n, RngStream(10))[:, 0, 0]) ** 2
    assert stats.ks_2samp(a, b).pvalue > 0.001


@pytest.mark.parametrize("d", [4, 8, 16])
def test_average_state_maximally_mixed(d):
    n = 100_000
    for kind in ("SO", "SU", "Sp"):
        g = GroupId(kind, d // 2 if kind == "Sp" else d)
        psi = sample_states(g, n, RngStream(11, d))
        rho = psi.T @ psi.conj() / n
        assert np.linalg.norm(rho - np.eye(d) / d, 2) < 10 * math.sqrt(d / n)


# -- invariance --------------------------------------------------------------------------------

@pytest.mark.parametrize("group", [GroupId("SO", 4), GroupId("SU", 4), GroupId("Sp", 2)], ids=str)
def test_invariance_check(group):
    rep = invariance_check(group, 10_000, 3, RngStream(12))
    assert len(rep) == 9
    assert min(min(r["p_left"], r["p_right"]) for r in rep) > 0.001


def test_invariance_check_contract():
    g = GroupId("SU", 3)
    rep = invariance_check(g, 2000, 1, RngStream(13))
    assert all(0 <= r["p_left"] <= 1 for r in rep)
    with pytest.raises(InvalidParameterError):
        invariance_check(g, 100, 1, RngStream(13))


def test_invariance_identity_probe():
    rep = invariance_check(GroupId("SO", 3), 2000, 0, RngStream(14), probes=[np.eye(3)])
    assert len(rep) == 3


def test_csv_roundtrip(tmp_path):
    for g in (GroupId("SO", 3), GroupId("Sp", 2)):
        u = sample_group_element(g, RngStream(15)).matrix
        path = tmp_path / f"{g.kind}.csv"
        write_matrix_csv(path, u)
        back = read_matrix_csv(path, complex_entries=np.iscomplexobj(u))
        np.testing.assert_array_equal(back, u)


@given(st.integers(0, 2 ** 31))
def test_sampling_is_reproducible(seed):
    a = sample_matrices(GroupId("Sp", 2), 2, RngStream(seed))
    b = sample_matrices(GroupId("Sp", 2), 2, RngStream(seed))
    np.testing.assert_array_equal(a, b)
