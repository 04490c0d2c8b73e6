"""Sparse instances, LIBSVM-format parsing and dataset plumbing."""
import gzip
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ParseError(ValueError):
    """Malformed LIBSVM input; ``lineno`` is 1-based."""

    def __init__(self, lineno, msg):
        super().__init__("line %d: %s" % (lineno, msg))
        self.lineno = lineno


class UnsupportedTaskError(ValueError):
    """Labels do not describe a binary task."""


class SparseVector:
    """Feature vector as strictly increasing 1-based indices with nonzero values."""

    __slots__ = ("indices", "values", "_sqnorm")

    def __init__(self, indices=(), values=()):
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise ValueError("indices and values must be 1-d and equally long")
        if idx.size and (idx[0] < 1 or np.any(np.diff(idx) <= 0)):
            raise ValueError("indices must be positive and strictly increasing")
        keep = val != 0.0
        if not keep.all():
            idx, val = idx[keep], val[keep]
        self.indices = idx
        self.values = val
        self._sqnorm = None

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls([i for i, _ in pairs], [v for _, v in pairs])

    @classmethod
    def from_dense(cls, x):
        x = np.asarray(x, dtype=np.float64)
        nz = np.flatnonzero(x)
        return cls(nz + 1, x[nz])

    @property
    def dim(self):
        """Largest stored index (0 for the zero vector)."""
        return int(self.indices[-1]) if self.indices.size else 0

    @property
    def nnz(self):
        return int(self.indices.size)

    def entries(self):
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def dot(self, other):
        """Merge over the two sorted index lists."""
        ia, va = self.indices.tolist(), self.values.tolist()
        ib, vb = other.indices.tolist(), other.values.tolist()
        i = j = 0
        s = 0.0
        while i < len(ia) and j < len(ib):
            if ia[i] == ib[j]:
                s += va[i] * vb[j]
                i += 1
                j += 1
            elif ia[i] < ib[j]:
                i += 1
            else:
                j += 1
        return s

    def sqnorm(self):
        if self._sqnorm is None:
            self._sqnorm = float(sum(v * v for v in self.values.tolist()))
        return self._sqnorm

    def sqdist(self, other):
        return max(self.sqnorm() + other.sqnorm() - 2.0 * self.dot(other), 0.0)

    def to_dense(self, dim=None):
        dim = self.dim if dim is None else dim
        out = np.zeros(dim)
        if self.indices.size:
            out[self.indices - 1] = self.values
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (np.array_equal(self.indices, other.indices)
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return "SparseVector(%r)" % (self.entries(),)


@dataclass(frozen=True, eq=True)
class Instance:
    features: SparseVector
    label: int

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise ValueError("label must be -1 or +1, got %r" % (self.label,))


@dataclass(eq=False)
class Dataset:
    instances: list
    dim: int = 0
    name: str = ""
    _dense: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        seen = max((inst.features.dim for inst in self.instances), default=0)
        self.dim = max(int(self.dim), seen)

    def __len__(self):
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def __getitem__(self, i):
        return self.instances[i]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.dim == other.dim and self.instances == other.instances

    @property
    def labels(self):
        return np.array([inst.label for inst in self.instances], dtype=np.int64)

    def dense(self):
        """Row-major T x dim matrix, built once and cached."""
        if self._dense is None:
            X = np.zeros((len(self.instances), self.dim))
            for r, inst in enumerate(self.instances):
                f = inst.features
                if f.indices.size:
                    X[r, f.indices - 1] = f.values
            self._dense = X
        return self._dense


def normalize_labels(raw):
    """Map two distinct raw labels to -1/+1 (larger raw value -> +1).

    Labels already inside {-1, +1} map to themselves even if only one class
    is present.
    """
    distinct = sorted(set(float(r) for r in raw))
    if set(distinct) <= {-1.0, 1.0}:
        return {v: int(v) for v in distinct}
    if len(distinct) != 2:
        raise UnsupportedTaskError(
            "binary task needs exactly 2 distinct labels, found %d: %s"
            % (len(distinct), distinct[:10]))
    return {distinct[0]: -1, distinct[1]: 1}


def _parse_lines(lines):
    raw_labels, feats = [], []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            label = float(toks[0])
        except ValueError:
            raise ParseError(lineno, "bad label %r" % toks[0]) from None
        idx, val = [], []
        last = 0
        for tok in toks[1:]:
            if tok.startswith("qid:"):
                continue
            k, sep, v = tok.partition(":")
            if not sep:
                raise ParseError(lineno, "expected index:value, got %r" % tok)
            try:
                k = int(k)
                v = float(v)
            except ValueError:
                raise ParseError(lineno, "non-numeric token %r" % tok) from None
            if k <= last:
                raise ParseError(lineno, "index %d not ascending (previous %d)" % (k, last))
            last = k
            if v != 0.0:
                idx.append(k)
                val.append(v)
        raw_labels.append(label)
        feats.append(SparseVector(idx, val))
    return raw_labels, feats


def parse_libsvm(source, name=""):
    """Parse LIBSVM text: a string, or an iterable of lines."""
    lines = source.splitlines() if isinstance(source, str) else source
    raw_labels, feats = _parse_lines(lines)
    if not raw_labels:
        return Dataset([], 0, name)
    mapping = normalize_labels(raw_labels)
    insts = [Instance(f, mapping[r]) for r, f in zip(raw_labels, feats)]
    return Dataset(insts, 0, name)


def load_libsvm(path, name=None):
    """Read a LIBSVM file; ``.gz`` files are decompressed transparently."""
    path = Path(path)
    name = name or path.name.split(".libsvm")[0]
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rt") as fh:
                return parse_libsvm(fh, name)
        with open(path) as fh:
            return parse_libsvm(fh, name)
    except OSError as exc:
        raise OSError("cannot read dataset %s: %s" % (path, exc)) from exc


def dump_libsvm(dataset):
    out = io.StringIO()
    for inst in dataset:
        out.write("%+d" % inst.label)
        for k, v in inst.features.entries():
            out.write(" %d:%r" % (k, v))
        out.write("\n")
    return out.getvalue()


def permuted_view(dataset, order):
    """Yield the dataset's instances in ``order`` (no copies)."""
    order = np.asarray(order)
    if order.shape != (len(dataset),):
        raise ValueError("ordering has length %d, dataset has %d instances"
                         % (order.size, len(dataset)))
    insts = dataset.instances
    for i in order.tolist():
        yield insts[i]


def synth_two_blobs(n_per_class, separation, dim, rng):
    """Unit-variance Gaussian blobs centred at +-(separation/2) e_1.

    Positives come first, then negatives; permute before streaming.
    """
    if n_per_class < 1 or dim < 1 or separation < 0:
        raise ValueError("need n_per_class >= 1, dim >= 1, separation >= 0")
    n = 2 * n_per_class
    Z = rng.normal(n * dim).reshape(n, dim)
    Z[:n_per_class, 0] += separation / 2.0
    Z[n_per_class:, 0] -= separation / 2.0
    labels = [1] * n_per_class + [-1] * n_per_class
    insts = [Instance(SparseVector.from_dense(z), y) for z, y in zip(Z, labels)]
    return Dataset(insts, dim, "blobs(sep=%g,d=%d)" % (separation, dim))


def subsample(dataset, n, rng):
    """Seeded subsample of ``n`` instances, kept in original relative order."""
    n = min(int(n), len(dataset))
    pick = np.sort(rng.permutation(len(dataset))[:n])
    return Dataset([dataset.instances[i] for i in pick], dataset.dim,
                   "%s[%d]" % (dataset.name, n))


def minmax_scale(dataset):
    """Per-feature min-max scaling to [0, 1] (implicit zeros included)."""
    X = dataset.dense()
    if X.size == 0:
        return dataset
    lo, hi = X.min(0), X.max(0)
    span = np.where(hi > lo, hi - lo, 1.0)
    Xs = (X - lo) / span
    insts = [Instance(SparseVector.from_dense(row), inst.label)
             for row, inst in zip(Xs, dataset.instances)]
    return Dataset(insts, dataset.dim, dataset.name + "+minmax")


# Bundled copies live in <repo>/data; see scripts/build_datasets.py.
DATASETS = {
    "german": ("german.numer.libsvm.gz",
               "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/german.numer"),
    "svmguide3": ("svmguide3.libsvm.gz",
                  "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/svmguide3"),
    "a9a": ("a9a.libsvm.gz",
            "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/a9a"),
    "magic04": ("magic04.libsvm.gz",
                "https://archive.ics.uci.edu/ml/datasets/magic+gamma+telescope"),
    "madelon": (None, "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/madelon"),
    "ijcnn1": (None, "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/ijcnn1.bz2"),
    "cod-rna": (None, "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/cod-rna"),
    "kdd08": (None, "http://www.kdd.org/kdd-cup/view/kdd-cup-2008"),
    "susy": (None, "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary/SUSY.xz"),
}
DATASETS["german.numer"] = DATASETS["german"]


def data_dir():
    env = os.environ.get("BOMKC_DATA_DIR")
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "data"


def resolve_dataset(spec):
    """Load a dataset by file path or by registry name."""
    path = Path(spec)
    if path.exists():
        return load_libsvm(path)
    key = str(spec).lower()
    if key in DATASETS:
        fname, url = DATASETS[key]
        for cand in filter(None, [fname, key, key + ".libsvm", key + ".libsvm.gz"]):
            p = data_dir() / cand
            if p.exists():
                return load_libsvm(p, name=key)
        raise FileNotFoundError(
            "dataset %r not found under %s; download it from %s" % (spec, data_dir(), url))
    raise FileNotFoundError("no such dataset file or name: %s" % (spec,))
