"""Kernel functions and the default 16-kernel pool."""
import math
from dataclasses import dataclass

import numpy as np

POLYNOMIAL = "polynomial"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class KernelSpec:
    """``polynomial``: (x.y)^degree.  ``gaussian``: exp(-|x-y|^2 / (2 sigma^2)).

    With ``normalized`` set the kernel is divided by sqrt(k(x,x) k(y,y)).
    """

    kind: str
    param: float
    normalized: bool = False

    def __post_init__(self):
        if self.kind == POLYNOMIAL:
            if int(self.param) != self.param or self.param < 1:
                raise ValueError("polynomial degree must be a positive integer")
            object.__setattr__(self, "param", int(self.param))
        elif self.kind == GAUSSIAN:
            if not self.param > 0:
                raise ValueError("gaussian sigma must be > 0")
            object.__setattr__(self, "param", float(self.param))
        else:
            raise ValueError("unknown kernel kind %r" % (self.kind,))

    @classmethod
    def polynomial(cls, degree, normalized=False):
        return cls(POLYNOMIAL, degree, normalized)

    @classmethod
    def gaussian(cls, sigma, normalized=False):
        return cls(GAUSSIAN, sigma, normalized)

    @classmethod
    def from_record(cls, rec):
        kind = rec["kind"]
        param = rec.get("parameter", rec.get("degree", rec.get("sigma")))
        return cls(kind, param, bool(rec.get("normalized", False)))

    def to_record(self):
        rec = {"kind": self.kind, "parameter": self.param}
        if self.normalized:
            rec["normalized"] = True
        return rec

    @property
    def label(self):
        if self.kind == POLYNOMIAL:
            return "poly(p=%d)" % self.param
        e = math.log2(self.param)
        if e.is_integer():
            return "rbf(sigma=2^%d)" % e
        return "rbf(sigma=%g)" % self.param


def _raw(k, dot, sqdist):
    if k.kind == POLYNOMIAL:
        try:
            return dot ** k.param
        except OverflowError:
            return math.copysign(math.inf, dot) if k.param % 2 else math.inf
    return math.exp(-sqdist / (2.0 * k.param * k.param))


def eval_kernel(k, x, x2):
    """Scalar kernel value on two :class:`SparseVector` s."""
    dot = x.dot(x2)
    sqd = max(x.sqnorm() + x2.sqnorm() - 2.0 * dot, 0.0) if k.kind == GAUSSIAN else 0.0
    v = _raw(k, dot, sqd)
    if k.normalized and k.kind == POLYNOMIAL:
        den = math.sqrt(_raw(k, x.sqnorm(), 0.0) * _raw(k, x2.sqnorm(), 0.0))
        return v / den if den > 0 else 0.0
    return v


def self_similarity(k, x):
    if k.kind == GAUSSIAN:
        return 1.0
    if k.normalized:
        return 1.0 if x.sqnorm() > 0 else 0.0
    return _raw(k, x.sqnorm(), 0.0)


def self_similarity_sq(k, sq):
    """k(x, x) from a precomputed squared norm."""
    if k.kind == GAUSSIAN:
        return 1.0
    if k.normalized:
        return 1.0 if sq > 0 else 0.0
    return _raw(k, sq, 0.0)


def self_similarity_vec(k, sq):
    """k(x, x) for an array of squared norms."""
    sq = np.asarray(sq, dtype=np.float64)
    if k.kind == GAUSSIAN:
        return np.ones_like(sq)
    if k.normalized:
        return (sq > 0).astype(np.float64)
    with np.errstate(over="ignore"):
        return sq ** k.param


def kernel_row(k, points, sqnorms, x, xsq):
    """k(points[j], x) for every row of a dense ``points`` matrix."""
    dots = points @ x
    if k.kind == GAUSSIAN:
        d2 = sqnorms + xsq - 2.0 * dots
        np.maximum(d2, 0.0, out=d2)
        return np.exp(d2 * (-0.5 / (k.param * k.param)))
    with np.errstate(over="ignore", invalid="ignore"):
        row = dots ** k.param
        if k.normalized:
            den = np.sqrt((sqnorms ** k.param) * (xsq ** k.param))
            row = np.divide(row, den, out=np.zeros_like(row), where=den > 0)
    return row


def default_pool():
    """3 polynomial kernels (p = 1, 2, 3) then 13 gaussians (sigma = 2^-6 .. 2^6)."""
    return ([KernelSpec.polynomial(p) for p in (1, 2, 3)]
            + [KernelSpec.gaussian(2.0 ** e) for e in range(-6, 7)])


def pool_from_records(records, normalized=False):
    pool = []
    for rec in records:
        k = KernelSpec.from_record(rec)
        if normalized and not k.normalized:
            k = KernelSpec(k.kind, k.param, True)
        pool.append(k)
    return pool
