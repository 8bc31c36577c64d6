import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from haarlab.concentration import (LipschitzFunctional, TailReport, design_deviation_bound, empirical_tail,
                                   levy_bound, levy_constant, levy_rate, projector_functional)
from haarlab.errors import ContractError, DomainError, InvalidParameterError
from haarlab.groups import GroupId, sample_states
from haarlab.numerics import RngStream

TAUS = [round(0.05 * i, 10) for i in range(1, 11)]


def test_levy_constant_examples():
    assert levy_constant(GroupId("SO", 4)) == 2
    assert levy_constant(GroupId("SU", 8)) == 0.25
    assert levy_constant(GroupId("Sp", 3)) == 0.25
    with pytest.raises(DomainError):
        levy_constant(GroupId("SO", 2))


def test_levy_bound_examples():
    assert levy_bound(GroupId("SO", 4), 2.0, 1.0) == pytest.approx(2 * math.exp(-1 / 16))
    assert levy_bound(GroupId("SU", 4), 3.0, 1e-12) == pytest.approx(2.0)
    with pytest.raises(InvalidParameterError):
        levy_bound(GroupId("SU", 4), 0.0, 1.0)


@given(st.sampled_from([GroupId("SO", 5), GroupId("SU", 7), GroupId("Sp", 3)]),
       st.floats(0.1, 5), st.floats(0.01, 3), st.floats(0.1, 10))
def test_levy_bound_rescaling(group, lip, tau, c):
    assert levy_bound(group, c * lip, c * tau) == pytest.approx(levy_bound(group, lip, tau), rel=1e-12)


@given(st.floats(0.01, 2), st.floats(0.001, 1))
def test_levy_bound_decreasing(tau, step):
    g = GroupId("SU", 16)
    assert levy_bound(g, 2.0, tau + step) < levy_bound(g, 2.0, tau)


def test_levy_bound_vectorised():
    out = levy_bound(GroupId("SU", 4), 2.0, np.array(TAUS))
    assert out.shape == (10,) and np.all(np.diff(out) < 0)


def test_rate_matches_bound():
    g = GroupId("Sp", 4)
    assert levy_bound(g, 2, 0.3) == pytest.approx(2 * math.exp(-levy_rate(g, 2) * 0.09))


# -- design deviation bound -------------------------------------------------------------------------

def test_design_deviation_regression_pin():
    g = GroupId("SU", 8)
    d = 8
    val = design_deviation_bound(g, 4, 0.0, 1, d * math.sqrt(d), 1.0, 0.5, 2, d / 16)
    mp = mpmath.mpf
    ref = mp("0.5") ** -4 * (2 * (mp(2) / (mp(8) / 16)) ** 2)
    assert val == pytest.approx(float(ref), rel=1e-12)
    assert val == pytest.approx(512.0)


def test_design_deviation_with_epsilon_against_mpmath():
    g = GroupId("SO", 6)
    args = dict(k=6, epsilon=1e-3, K=1, alpha=6 * math.sqrt(6), mean_abs=1.0, delta=0.3, m=3, a=0.7)
    mp = mpmath.mpf
    ref = mp("0.3") ** -6 * (2 * (3 / mp("0.7")) ** 3 + mp("1e-3") / mp(6) ** 6 * (6 * mpmath.sqrt(6) + 1) ** 6)
    assert design_deviation_bound(g, **args) == pytest.approx(float(ref), rel=1e-10)


def test_design_deviation_contracts():
    g = GroupId("SU", 4)
    with pytest.raises(ContractError):
        design_deviation_bound(g, 3, 0.0, 1, 8, 1, 0.5, 2, 1.0)
    with pytest.raises(ContractError):
        design_deviation_bound(g, 8, 0.0, 1, 8, 1, 0.5, 1.5, 1.0)
    assert design_deviation_bound(g, 4, 0.0, 1, 8, 1, 1e6, 2, 1.0) < 1e-20


@given(st.floats(0, 1), st.floats(0, 1))
def test_design_deviation_monotone_in_epsilon(e1, e2):
    g = GroupId("SU", 4)
    lo, hi = sorted((e1, e2))
    f = lambda e: design_deviation_bound(g, 4, e, 1, 8, 1, 0.5, 2, 1.0)  # noqa: E731
    assert f(lo) <= f(hi)


# -- empirical tails ----------------------------------------------------------------------------------

@pytest.mark.parametrize("kind", ["SO", "SU", "Sp"])
@pytest.mark.parametrize("d", [16, 64])
def test_levy_bound_holds_empirically(kind, d):
    g = GroupId(kind, d)
    phi = sample_states(g, 1, RngStream(1, d))[0]
    rep = empirical_tail(g, projector_functional(phi), TAUS, 10_000, RngStream(2, d))
    assert rep.violations(3.0) == []
    assert all(a >= b for a, b in zip(rep.empirical_tail, rep.empirical_tail[1:]))


def test_fidelity_mean_so64():
    g = GroupId("SO", 64)
    phi = np.zeros(64)
    phi[0] = 1
    f = projector_functional(phi)
    rep = empirical_tail(g, f, TAUS, 10_000, RngStream(3), exact_mean=1 / 64)
    vals = f.evaluate(sample_states(g, 10_000, RngStream(4)))
    assert abs(rep.empirical_mean - 1 / 64) <= 5 * vals.std(ddof=1) / 100


def test_constant_functional_has_empty_tails():
    f = LipschitzFunctional(lambda psi: np.full(len(psi), 0.3), 1.0)
    rep = empirical_tail(GroupId("SU", 4), f, TAUS, 1000, RngStream(5))
    assert rep.empirical_tail == [0.0] * len(TAUS)


def test_lipschitz_soft_check_warns():
    f = LipschitzFunctional(lambda psi: 100 * np.abs(psi[:, 0]) ** 2, 2.0, name="steep")
    with pytest.warns(RuntimeWarning):
        empirical_tail(GroupId("SU", 4), f, TAUS, 1000, RngStream(6))
    assert projector_functional(np.eye(8)[0]).lipschitz_ratio(GroupId("SU", 8), RngStream(7)) <= 1


def test_empirical_tail_sample_floor():
    with pytest.raises(InvalidParameterError):
        empirical_tail(GroupId("SU", 4), projector_functional(np.eye(4)[0]), TAUS, 999, RngStream(8))


def test_tail_report_csv():
    rep = TailReport([0.1, 0.2], [0.5, 0.1], [1.0, 0.8], 100, 0.2, None, [0.05, 0.03])
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "tau,empirical,bound,se" and len(lines) == 3
    assert TailReport([0.1], [0.9], [0.5], 100, 0.0, None, [0.01]).violations() == [0.1]
