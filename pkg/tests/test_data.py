import gzip

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bomkc import prng
from bomkc.data import (Dataset, Instance, ParseError, SparseVector, UnsupportedTaskError,
                        dump_libsvm, load_libsvm, minmax_scale, normalize_labels, parse_libsvm,
                        permuted_view, resolve_dataset, subsample, synth_two_blobs)
from bomkc.kernels import KernelSpec
from bomkc.multi import MultiKernelLearner


def test_parse_basic_line():
    ds = parse_libsvm("+1 1:0.5 3:-2")
    assert len(ds) == 1 and ds.dim == 3
    assert ds[0].label == 1
    assert ds[0].features.entries() == [(1, 0.5), (3, -2.0)]


def test_parse_zero_one_labels():
    ds = parse_libsvm("0 2:1\n1 1:1")
    assert ds.labels.tolist() == [-1, 1]


def test_parse_error_names_line():
    with pytest.raises(ParseError) as e:
        parse_libsvm("1 3:a")
    assert e.value.lineno == 1 and "line 1" in str(e.value)


def test_parse_error_non_ascending():
    with pytest.raises(ParseError) as e:
        parse_libsvm("+1 1:1\n-1 3:1 2:1\n")
    assert e.value.lineno == 2


def test_parse_bad_label_and_token():
    with pytest.raises(ParseError):
        parse_libsvm("x 1:1")
    with pytest.raises(ParseError):
        parse_libsvm("+1 1")


def test_empty_file_is_empty_dataset():
    ds = parse_libsvm("")
    assert len(ds) == 0 and ds.dim == 0
    assert len(parse_libsvm("\n\n# only a comment\n")) == 0


def test_comments_blank_lines_and_zeros():
    ds = parse_libsvm("# header\n\n+1 1:0 2:3 # trailing\n-1 4:1\n")
    assert len(ds) == 2
    assert ds[0].features.entries() == [(2, 3.0)]
    assert ds.dim == 4


def test_normalize_labels_rules():
    assert normalize_labels([-1, 1, 1]) == {-1.0: -1, 1.0: 1}
    assert normalize_labels([0, 1]) == {0.0: -1, 1.0: 1}
    assert normalize_labels([2, 1, 2]) == {1.0: -1, 2.0: 1}
    with pytest.raises(UnsupportedTaskError):
        normalize_labels([1, 2, 3])
    with pytest.raises(UnsupportedTaskError):
        normalize_labels([5, 5])


def test_sparse_vector_invariants():
    with pytest.raises(ValueError):
        SparseVector([2, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        SparseVector([0], [1.0])
    v = SparseVector([1, 2, 5], [1.0, 0.0, 2.0])
    assert v.entries() == [(1, 1.0), (5, 2.0)]
    assert v.dim == 5 and v.nnz == 2


def test_instance_label_checked():
    with pytest.raises(ValueError):
        Instance(SparseVector(), 0)


def test_permuted_view():
    ds = parse_libsvm("+1 1:1\n-1 1:2\n+1 1:3")
    assert [i.features.values[0] for i in permuted_view(ds, [0, 1, 2])] == [1, 2, 3]
    assert [i.features.values[0] for i in permuted_view(ds, [2, 1, 0])] == [3, 2, 1]
    with pytest.raises(ValueError):
        list(permuted_view(ds, [0, 1]))
    order = prng.new_stream(0, 0).permutation(3)
    out = list(permuted_view(ds, order))
    assert sorted(i.label for i in out) == sorted(ds.labels.tolist())
    assert all(any(o is i for i in ds.instances) for o in out)


def test_gzip_and_roundtrip_file(tmp_path):
    text = "+1 1:0.25 7:3\n-1 2:-1.5\n"
    p = tmp_path / "toy.libsvm.gz"
    with gzip.open(p, "wt") as fh:
        fh.write(text)
    ds = load_libsvm(p)
    assert ds == parse_libsvm(text)
    assert ds.name == "toy"


def test_missing_file_names_path(tmp_path):
    with pytest.raises(OSError) as e:
        load_libsvm(tmp_path / "nope.libsvm")
    assert "nope.libsvm" in str(e.value)
    with pytest.raises(FileNotFoundError):
        resolve_dataset("no-such-dataset")


entry = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda v: v != 0.0)


@st.composite
def datasets(draw):
    n = draw(st.integers(1, 12))
    insts = []
    for _ in range(n):
        idx = sorted(draw(st.sets(st.integers(1, 40), max_size=8)))
        vals = [draw(entry) for _ in idx]
        insts.append(Instance(SparseVector(idx, vals), draw(st.sampled_from([-1, 1]))))
    return Dataset(insts)


@settings(max_examples=60, deadline=None)
@given(datasets())
def test_roundtrip_property(ds):
    again = parse_libsvm(dump_libsvm(ds))
    assert again == ds


def test_blobs_shapes():
    ds = synth_two_blobs(1, 3.0, 2, prng.new_stream(0, 0))
    assert len(ds) == 2 and ds.labels.tolist() == [1, -1]
    big = synth_two_blobs(5000, 4.0, 3, prng.new_stream(1, 0))
    X = big.dense()
    assert abs(X[:5000, 0].mean() - 2.0) < 0.05 and abs(X[5000:, 0].mean() + 2.0) < 0.05
    assert abs(X[:, 1].std() - 1.0) < 0.03


def _perceptron_rate(ds, kernel, seed):
    L = MultiKernelLearner("perceptron", [kernel], ds.dim, seed)
    for i in prng.stream_for(seed, prng.PERMUTE).permutation(len(ds)):
        L.observe(ds[i])
    return L.mistakes / len(ds)


def test_blobs_inseparable_half_mistakes():
    ds = synth_two_blobs(5000, 0.0, 2, prng.new_stream(2, 0))
    rate = _perceptron_rate(ds, KernelSpec.polynomial(1), 0)
    assert abs(rate - 0.5) < 0.02


def test_blobs_separable_rbf_perceptron():
    ds = synth_two_blobs(1000, 10.0, 2, prng.new_stream(3, 0))
    assert _perceptron_rate(ds, KernelSpec.gaussian(1.0), 0) < 0.05


def test_subsample_and_scale():
    ds = parse_libsvm("\n".join("%+d 1:%d 2:%d" % (1 if i % 2 else -1, i, 2 * i + 1)
                                for i in range(1, 21)))
    sub = subsample(ds, 5, prng.new_stream(0, 4))
    assert len(sub) == 5
    again = subsample(ds, 5, prng.new_stream(0, 4))
    assert sub == again
    sc = minmax_scale(ds).dense()
    assert sc.min() == 0.0 and sc.max() == 1.0


def test_bundled_german(german):
    assert len(german) == 1000 and german.dim == 24
    assert (german.labels == 1).sum() == 300
