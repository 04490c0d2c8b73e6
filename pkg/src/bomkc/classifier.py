"""Kernel-expansion classifiers, hinge loss and the combined predictor."""
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _fast
from .data import SparseVector
from .kernels import KernelSpec, kernel_row, self_similarity_sq

SNAPSHOT_VERSION = 1


def hinge(margin, y):
    return max(0.0, 1.0 - y * margin)


def sign(margin):
    """Predicted label; a zero margin predicts +1."""
    return 1 if margin >= 0 else -1


@dataclass(frozen=True)
class SupportVector:
    coef: float
    point: SparseVector
    arrival_round: int


class KernelClassifier:
    """f(x) = sum_j coef_j k(point_j, x), stored as dense growable buffers.

    Methods taking ``x`` accept a :class:`SparseVector` or a dense array; the
    ``*_dense`` variants take a dense row plus its squared norm and skip the
    conversion (the hot path of the learners).
    """

    def __init__(self, kernel, dim=0, capacity=16):
        self.kernel = kernel
        self._code = (_fast.kind_code(kernel), float(kernel.param), bool(kernel.normalized))
        self.dim = int(dim)
        cap = max(int(capacity), 1)
        self._P = np.zeros((cap, self.dim))
        self._sq = np.zeros(cap)
        self._coef = np.zeros(cap)
        self._round = np.zeros(cap, dtype=np.int64)
        self.n = 0

    def __len__(self):
        return self.n

    @property
    def points(self):
        return self._P[:self.n]

    @property
    def sqnorms(self):
        return self._sq[:self.n]

    @property
    def coefs(self):
        return self._coef[:self.n]

    @property
    def rounds(self):
        return self._round[:self.n]

    @property
    def svs(self):
        return [SupportVector(float(c), SparseVector.from_dense(p), int(r))
                for c, p, r in zip(self.coefs, self.points, self.rounds)]

    def _grow_dim(self, dim):
        if dim > self.dim:
            P = np.zeros((self._P.shape[0], dim))
            P[:, :self.dim] = self._P
            self._P = P
            self.dim = dim

    def dense(self, x):
        """Dense row of ``x`` padded to this classifier's dimension."""
        if isinstance(x, SparseVector):
            self._grow_dim(x.dim)
            return x.to_dense(self.dim)
        x = np.asarray(x, dtype=np.float64)
        self._grow_dim(x.size)
        if x.size < self.dim:
            x = np.concatenate([x, np.zeros(self.dim - x.size)])
        return x

    def kernel_row_dense(self, x, xsq):
        if self.n == 0:
            return np.zeros(0)
        return kernel_row(self.kernel, self._P[:self.n], self._sq[:self.n], x, xsq)

    def margin_dense(self, x, xsq):
        if self.n == 0:
            return 0.0
        kind, param, normed = self._code
        return _fast.margin(self._P, self._sq, self._coef, self.n, x, xsq, kind, param, normed)

    def margin(self, x):
        x = self.dense(x)
        return self.margin_dense(x, float(x @ x))

    def self_similarity_dense(self, xsq):
        return self_similarity_sq(self.kernel, xsq)

    def add_sv(self, x, coef, round_=0):
        x = self.dense(x)
        self.add_dense(x, float(x @ x), coef, round_)

    def add_dense(self, x, xsq, coef, round_=0):
        if not math.isfinite(coef):
            raise ValueError("support-vector coefficient must be finite, got %r" % (coef,))
        if self.n == self._coef.size:
            cap = 2 * self.n
            for name in ("_P", "_sq", "_coef", "_round"):
                old = getattr(self, name)
                new = np.zeros((cap,) + old.shape[1:], dtype=old.dtype)
                new[:self.n] = old[:self.n]
                setattr(self, name, new)
        n = self.n
        if x.size != self.dim:
            x = self.dense(x)
        self._P[n] = x
        self._sq[n] = xsq
        self._coef[n] = coef
        self._round[n] = round_
        self.n = n + 1

    def remove(self, j):
        """Drop SV ``j``; the arrival order of the rest is preserved."""
        n = self.n
        if not 0 <= j < n:
            raise IndexError("support vector %d out of range (%d stored)" % (j, n))
        for arr in (self._P, self._sq, self._coef, self._round):
            arr[j:n - 1] = arr[j + 1:n]
        self.n = n - 1

    def scale(self, factor):
        self._coef[:self.n] *= factor

    def copy(self):
        c = KernelClassifier(self.kernel, self.dim, max(self.n, 1))
        for name in ("_P", "_sq", "_coef", "_round"):
            getattr(c, name)[:self.n] = getattr(self, name)[:self.n]
        c.n = self.n
        return c

    def to_dict(self):
        return {
            "version": SNAPSHOT_VERSION,
            "kernel": self.kernel.to_record(),
            "dim": self.dim,
            "svs": [{"coef": sv.coef, "round": sv.arrival_round, "entries": sv.point.entries()}
                    for sv in self.svs],
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != SNAPSHOT_VERSION:
            raise ValueError("unsupported snapshot version %r" % (d.get("version"),))
        c = cls(KernelSpec.from_record(d["kernel"]), d["dim"], max(len(d["svs"]), 1))
        for sv in d["svs"]:
            c.add_sv(SparseVector.from_pairs(sv["entries"]), sv["coef"], sv["round"])
        return c

    def dumps(self):
        return json.dumps(self.to_dict())

    @classmethod
    def loads(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return "KernelClassifier(%s, %d SVs)" % (self.kernel.label, self.n)


def margin(c, x):
    return c.margin(x)


def add_sv(c, x, coef, round_=0):
    c.add_sv(x, coef, round_)
    return c


class CombinedClassifier:
    """sum_i theta_i f_i(x) over per-kernel classifiers."""

    def __init__(self, components, theta=None):
        self.components = list(components)
        m = len(self.components)
        theta = np.full(m, 1.0 / m) if theta is None else np.asarray(theta, dtype=np.float64)
        if theta.shape != (m,) or np.any(theta < 0) or abs(theta.sum() - 1.0) > 1e-12:
            raise ValueError("theta must be a probability vector over the components")
        self.theta = theta

    def margins(self, x):
        return np.array([c.margin(x) for c in self.components])

    def combined_margin(self, x):
        return float(self.theta @ self.margins(x))

    def predict(self, x):
        return sign(self.combined_margin(x))


def combined_margin(cc, x):
    return cc.combined_margin(x)
