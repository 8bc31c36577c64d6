import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from haarlab.errors import InvalidDimensionError, InvalidParameterError, NotNormalizedError
from haarlab.numerics import (FieldTag, RngStream, entrywise_l1, gaussian_vector, map_shards,
                              pair_to_quaternion, pooled_mean_var, qconj, qinner, qmul,
                              quaternion_to_pair, schatten_norm, shard_sizes, trace_distance)

seeds = st.integers(0, 2 ** 32 - 1)
dims = st.integers(1, 6)


def random_matrix(seed, d, complex_=True):
    g = np.random.default_rng(seed)
    a = g.standard_normal((d, d))
    return a + 1j * g.standard_normal((d, d)) if complex_ else a


def random_state(g, d):
    v = g.standard_normal(d) + 1j * g.standard_normal(d)
    return v / np.linalg.norm(v)


# -- gaussian_vector ---------------------------------------------------------------------

def test_gaussian_vector_deterministic():
    a = gaussian_vector(3, FieldTag.REAL, RngStream(5, 1))
    b = gaussian_vector(3, FieldTag.REAL, RngStream(5, 1))
    assert a.shape == (3,)
    np.testing.assert_array_equal(a, b)


def test_distinct_streams_differ():
    a = gaussian_vector(4, FieldTag.COMPLEX, RngStream(5, 1))
    b = gaussian_vector(4, FieldTag.COMPLEX, RngStream(5, 2))
    assert not np.allclose(a, b)


def test_gaussian_vector_zero_dim():
    with pytest.raises(InvalidDimensionError):
        gaussian_vector(0, FieldTag.REAL, RngStream(1))


@pytest.mark.parametrize("field,factor", [(FieldTag.REAL, 1), (FieldTag.COMPLEX, 2), (FieldTag.QUATERNION, 4)])
def test_gaussian_vector_squared_norm_mean(field, factor):
    d, n = 5, 100_000
    g = gaussian_vector(d, field, RngStream(11), size=n)
    sq = (np.abs(g) ** 2).reshape(n, -1).sum(axis=1)
    se = sq.std(ddof=1) / math.sqrt(n)
    assert abs(sq.mean() - factor * d) <= 5 * se


def test_quaternion_storage_shape():
    q = gaussian_vector(3, FieldTag.QUATERNION, RngStream(0), size=2)
    assert q.shape == (2, 3, 4) and q.dtype == float
    assert FieldTag.QUATERNION.components == 4 and FieldTag.COMPLEX.components == 2


def test_shard_layout_independent_of_workers():
    fn = lambda size, gen: gen.standard_normal(size)  # noqa: E731
    a = np.concatenate(map_shards(fn, 10_000, RngStream(3), workers=1, shard_size=1000))
    b = np.concatenate(map_shards(fn, 10_000, RngStream(3), workers=4, shard_size=1000))
    np.testing.assert_array_equal(a, b)
    assert shard_sizes(2500, 1000) == [1000, 1000, 500]


# -- quaternions ---------------------------------------------------------------------------

@given(seeds)
def test_quaternion_algebra(seed):
    g = np.random.default_rng(seed)
    p, q, r = g.standard_normal((3, 4))
    np.testing.assert_allclose(qmul(qmul(p, q), r), qmul(p, qmul(q, r)), atol=1e-12)
    # |pq| = |p||q| and conj(pq) = conj(q) conj(p)
    assert np.isclose(np.linalg.norm(qmul(p, q)), np.linalg.norm(p) * np.linalg.norm(q))
    np.testing.assert_allclose(qconj(qmul(p, q)), qmul(qconj(q), qconj(p)), atol=1e-12)


def test_quaternion_units():
    one, i, j, k = np.eye(4)
    np.testing.assert_allclose(qmul(i, j), k)
    np.testing.assert_allclose(qmul(j, i), -k)
    np.testing.assert_allclose(qmul(i, i), -one)


@given(seeds)
def test_quaternion_pair_roundtrip(seed):
    q = np.random.default_rng(seed).standard_normal((3, 4))
    z, w = quaternion_to_pair(q)
    np.testing.assert_allclose(pair_to_quaternion(z, w), q, atol=1e-14)


def test_qinner_is_squared_norm():
    q = np.random.default_rng(1).standard_normal((3, 4))
    ip = qinner(q, q)
    assert np.isclose(ip[0], np.sum(q ** 2)) and np.allclose(ip[1:], 0)


# -- Schatten norms --------------------------------------------------------------------------

@pytest.mark.parametrize("d", [1, 3, 8])
def test_schatten_identity(d):
    assert np.isclose(schatten_norm(np.eye(d), 2), math.sqrt(d))
    assert np.isclose(schatten_norm(np.eye(d), np.inf), 1.0)
    assert np.isclose(schatten_norm(np.eye(d), 1), d)


def test_schatten_invalid():
    with pytest.raises(InvalidParameterError):
        schatten_norm(np.eye(2), 0.5)
    with pytest.raises(Exception):
        schatten_norm(np.array([[np.nan, 0], [0, 1]]), 2)


def test_schatten_2_is_frobenius(gen):
    a = gen.standard_normal((5, 5)) + 1j * gen.standard_normal((5, 5))
    assert np.isclose(schatten_norm(a, 2), np.linalg.norm(a))


@given(seeds, st.integers(2, 6), st.floats(1, 6), st.floats(0, 6))
def test_schatten_monotone_and_reverse(seed, d, p, extra):
    a = random_matrix(seed, d)
    q = p + extra
    for qq in (q, np.inf):
        sp, sq = schatten_norm(a, p), schatten_norm(a, qq)
        assert sp >= sq * (1 - 1e-12)
        inv_q = 0.0 if qq == np.inf else 1 / qq
        assert sp <= d ** (1 / p - inv_q) * sq * (1 + 1e-12)


@given(seeds, st.integers(1, 6))
def test_entrywise_chain(seed, d):
    a = random_matrix(seed, d)
    l1 = entrywise_l1(a)
    hs = np.sqrt(np.sum(np.abs(a) ** 2))
    assert l1 <= d * hs * (1 + 1e-12)
    assert d * hs <= d * math.sqrt(d) * schatten_norm(a, np.inf) * (1 + 1e-12)


# -- trace distance ---------------------------------------------------------------------------

def test_trace_distance_examples():
    e0, e1 = np.array([1.0, 0]), np.array([0, 1.0])
    assert trace_distance(e0, e0) == 0
    assert np.isclose(trace_distance(e0, e1), 1)
    assert np.isclose(trace_distance((e0 + e1) / math.sqrt(2), e0), math.sqrt(0.5))


def test_trace_distance_normalization():
    with pytest.raises(NotNormalizedError):
        trace_distance(np.array([1.0, 1e-3]), np.array([1.0, 0]))


def test_trace_distance_matches_half_trace_norm(gen):
    psi, phi = random_state(gen, 4), random_state(gen, 4)
    diff = np.outer(psi, psi.conj()) - np.outer(phi, phi.conj())
    assert np.isclose(trace_distance(psi, phi), 0.5 * schatten_norm(diff, 1))


@given(seeds, st.integers(2, 8))
def test_trace_distance_metric(seed, d):
    g = np.random.default_rng(seed)
    a, b, c = (random_state(g, d) for _ in range(3))
    ab, ba = trace_distance(a, b), trace_distance(b, a)
    assert ab == pytest.approx(ba, abs=1e-12)
    assert 0 <= ab <= 1
    assert ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-12


# -- pooling -------------------------------------------------------------------------------------

@given(seeds, st.integers(2, 5))
def test_pooled_mean_var_matches_concatenation(seed, parts):
    g = np.random.default_rng(seed)
    chunks = [g.standard_normal(g.integers(2, 40)) for _ in range(parts)]
    n, mean, var = pooled_mean_var([len(c) for c in chunks], [c.mean() for c in chunks],
                                   [c.var() for c in chunks])
    full = np.concatenate(chunks)
    assert n == len(full)
    assert mean == pytest.approx(full.mean(), abs=1e-12)
    assert var == pytest.approx(full.var(), rel=1e-9, abs=1e-12)
