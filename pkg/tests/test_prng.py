import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from bomkc import prng
from bomkc.prng import RngStream


def draws(s, n):
    return [s.next_uniform() for _ in range(n)]


def test_same_seed_same_stream():
    assert draws(prng.new_stream(7, 0), 3000) == draws(prng.new_stream(7, 0), 3000)


@pytest.mark.parametrize("other", [(7, 1), (8, 0)])
def test_distinct_streams_differ_early(other):
    a = draws(prng.new_stream(7, 0), 16)
    b = draws(prng.new_stream(*other), 16)
    assert all(x != y for x, y in zip(a, b))


def test_purpose_ids_do_not_collide():
    ids = {prng.stream_id(p, k) for p in range(5) for k in range(64)}
    assert len(ids) == 5 * 64


def test_uniform_range_and_mean():
    u = np.array(draws(prng.new_stream(1, 0), 100000))
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 0.01


def test_uniform_ks():
    u = np.array(draws(prng.new_stream(2, 0), 10000))
    assert stats.kstest(u, "uniform").statistic < 0.02


def test_bernoulli_edges():
    s = prng.new_stream(3, 0)
    assert not any(s.bernoulli(0.0) for _ in range(1000))
    assert all(s.bernoulli(1.0) for _ in range(1000))


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_bernoulli_rejects_bad_p(p):
    with pytest.raises(ValueError):
        prng.new_stream(0, 0).bernoulli(p)


def test_bernoulli_third():
    s = prng.new_stream(4, 0)
    N = 100000
    freq = sum(s.bernoulli(1 / 3) for _ in range(N)) / N
    assert abs(freq - 1 / 3) < 0.006


@pytest.mark.parametrize("p", [0.001, 0.05, 0.5, 0.9])
def test_bernoulli_4sigma(p):
    s = prng.new_stream(5, 1)
    N = 20000
    freq = sum(s.bernoulli(p) for _ in range(N)) / N
    assert abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / N)


def test_bernoulli_advances_one_draw():
    s = prng.new_stream(6, 0)
    s.bernoulli(0.3)
    s.bernoulli(0.3)
    assert s.drawn == 2


def test_permutation_small_cases():
    s = prng.new_stream(0, 0)
    assert s.permutation(0).tolist() == []
    assert s.permutation(1).tolist() == [0]


def test_permutation_uniform_n3():
    s = prng.new_stream(9, 0)
    counts = {p: 0 for p in itertools.permutations(range(3))}
    for _ in range(60000):
        counts[tuple(s.permutation(3).tolist())] += 1
    for c in counts.values():
        assert abs(c - 10000) <= 400
    # chi-square oracle as a second opinion
    assert stats.chisquare(list(counts.values())).pvalue > 1e-4


def test_randbelow_uniform():
    s = prng.new_stream(10, 0)
    c = np.bincount([s.randbelow(7) for _ in range(70000)], minlength=7)
    assert stats.chisquare(c).pvalue > 1e-4


def test_normal_moments():
    z = prng.new_stream(11, 0).normal(50001)
    assert z.shape == (50001,)
    assert abs(z.mean()) < 0.02 and abs(z.var() - 1) < 0.03
    assert stats.kstest(z[:10000], "norm").pvalue > 1e-4


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 300))
def test_permutation_is_permutation(seed, n):
    p = prng.new_stream(seed, 3).permutation(n)
    assert sorted(p.tolist()) == list(range(n))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**40), st.integers(0, 2**40))
def test_reproducible_any_seed(seed, sid):
    assert draws(RngStream(seed, sid), 5) == draws(RngStream(seed, sid), 5)
