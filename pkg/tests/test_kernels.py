import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bomkc import _fast
from bomkc.data import SparseVector
from bomkc.kernels import (KernelSpec, default_pool, eval_kernel, kernel_row, pool_from_records,
                           self_similarity, self_similarity_vec)


def sv(*vals):
    return SparseVector.from_dense(vals)


def test_direct_formulas():
    g = KernelSpec.gaussian(1.0)
    assert eval_kernel(g, sv(0.0), sv(2.0)) == pytest.approx(math.exp(-2.0), abs=1e-12)
    assert eval_kernel(g, sv(0.0), sv(2.0)) == pytest.approx(0.135335, abs=1e-6)
    p2 = KernelSpec.polynomial(2)
    assert eval_kernel(p2, sv(1.0, 1.0), sv(1.0, 2.0)) == 9.0
    for s in (0.01, 1.0, 64.0):
        x = sv(0.3, -2.0, 5.0)
        assert eval_kernel(KernelSpec.gaussian(s), x, x) == 1.0


def test_self_similarity():
    x = sv(0.0, 2.0)
    assert self_similarity(KernelSpec.gaussian(0.5), x) == 1.0
    assert self_similarity(KernelSpec.polynomial(1), x) == 4.0
    assert self_similarity(KernelSpec.polynomial(3), SparseVector()) == 0.0
    np.testing.assert_array_equal(self_similarity_vec(KernelSpec.polynomial(2), [4.0, 0.0]), [16.0, 0.0])


def test_default_pool():
    pool = default_pool()
    assert len(pool) == 16
    assert pool[0] == KernelSpec.polynomial(1)
    assert pool[2] == KernelSpec.polynomial(3)
    assert pool[3] == KernelSpec.gaussian(0.015625)
    assert pool[-1] == KernelSpec.gaussian(64.0)
    assert [k.param for k in pool[3:]] == [2.0 ** e for e in range(-6, 7)]


def test_spec_validation_and_records():
    with pytest.raises(ValueError):
        KernelSpec.polynomial(0)
    with pytest.raises(ValueError):
        KernelSpec.polynomial(1.5)
    with pytest.raises(ValueError):
        KernelSpec.gaussian(0.0)
    with pytest.raises(ValueError):
        KernelSpec("laplace", 1.0)
    recs = [k.to_record() for k in default_pool()]
    assert pool_from_records(recs) == default_pool()
    assert KernelSpec.from_record({"kind": "gaussian", "parameter": 2}).label == "rbf(sigma=2^1)"


def test_polynomial_overflow_saturates():
    big = sv(1e200)
    assert eval_kernel(KernelSpec.polynomial(3), big, big) == math.inf


def test_normalized_polynomial():
    k = KernelSpec.polynomial(2, normalized=True)
    x, y = sv(1.0, 2.0), sv(3.0, -1.0)
    raw = eval_kernel(KernelSpec.polynomial(2), x, y)
    want = raw / math.sqrt(25.0 * 100.0)
    assert eval_kernel(k, x, y) == pytest.approx(want, rel=1e-12)
    assert self_similarity(k, x) == 1.0


vec = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6)
kern = st.sampled_from(default_pool() + [KernelSpec.polynomial(2, True)])


@settings(max_examples=200, deadline=None)
@given(kern, vec, vec)
def test_symmetry(k, a, b):
    n = max(len(a), len(b))
    x = SparseVector.from_dense(a + [0.0] * (n - len(a)))
    y = SparseVector.from_dense(b + [0.0] * (n - len(b)))
    assert eval_kernel(k, x, y) == eval_kernel(k, y, x)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(default_pool()[3:]), vec, vec)
def test_gaussian_range(k, a, b):
    n = max(len(a), len(b))
    x = SparseVector.from_dense(a + [0.0] * (n - len(a)))
    y = SparseVector.from_dense(b + [0.0] * (n - len(b)))
    v = eval_kernel(k, x, y)
    assert 0.0 <= v <= 1.0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5), st.sampled_from([0.25, 1.0, 4.0]))
def test_gaussian_gram_minors(seed, n, sigma):
    rng = np.random.default_rng(seed)
    pts = [SparseVector.from_dense(rng.normal(size=3)) for _ in range(n)]
    k = KernelSpec.gaussian(sigma)
    G = np.array([[eval_kernel(k, a, b) for b in pts] for a in pts])
    for r in range(1, n + 1):
        assert np.linalg.det(G[:r, :r]) >= -1e-8


@pytest.mark.parametrize("k", default_pool() + [KernelSpec.polynomial(3, True)])
def test_vectorized_row_matches_scalar(k):
    rng = np.random.default_rng(1)
    P = rng.normal(size=(7, 5)) * (rng.random((7, 5)) < 0.6)
    x = rng.normal(size=5)
    sq = (P * P).sum(1)
    row = kernel_row(k, P, sq, x, float(x @ x))
    xs = SparseVector.from_dense(x)
    want = [eval_kernel(k, SparseVector.from_dense(p), xs) for p in P]
    np.testing.assert_allclose(row, want, rtol=1e-10, atol=1e-12)
    coef = rng.normal(size=7)
    kind = _fast.kind_code(k)
    fused = _fast.margin(P, sq, coef, 7, x, float(x @ x), kind, float(k.param), k.normalized)
    assert fused == pytest.approx(float(coef @ np.array(want)), rel=1e-10, abs=1e-12)
