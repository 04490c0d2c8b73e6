"""Per-kernel online update rules.

Every step takes a classifier, the current instance and (optionally) the
classifier's margin on that instance when the caller already has it.  The
instance may be a :class:`~bomkc.data.Instance` or a prepared :class:`Point`.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _fast
from .classifier import hinge
from .data import Instance
from .kernels import self_similarity_vec


class BudgetViolation(AssertionError):
    pass


@dataclass(frozen=True)
class SpaParams:
    eta: float = 0.1
    alpha: float = 1.0
    beta: float = 3.0

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be > 0")
        if not (self.alpha > 0 and self.beta >= self.alpha):
            raise ValueError("need beta >= alpha > 0 (got alpha=%r, beta=%r)"
                             % (self.alpha, self.beta))

    @property
    def cap(self):
        """Upper bound alpha/beta on the sampling probability."""
        return self.alpha / self.beta


@dataclass
class StepOutcome:
    margin: float
    loss: float
    rho: float = 0.0
    z: int = 0
    tau: float = 0.0
    updated: bool = False
    degenerate: bool = False


class Point:
    """Dense row of an instance, its squared norm, label and round index."""

    __slots__ = ("x", "xsq", "y", "t")

    def __init__(self, x, xsq, y, t=0):
        self.x, self.xsq, self.y, self.t = x, xsq, y, t


def as_point(c, inst, t=0):
    if isinstance(inst, Point):
        return inst
    if isinstance(inst, Instance):
        x = c.dense(inst.features)
        return Point(x, float(x @ x), inst.label, t)
    raise TypeError("expected Instance or Point, got %r" % type(inst).__name__)


def _margin(c, pt, m):
    return c.margin_dense(pt.x, pt.xsq) if m is None else m


def check_budget(c, B):
    if len(c) > B:
        raise BudgetViolation("%r holds %d SVs, budget is %d" % (c, len(c), B))


def pa_step(c, inst, eta, m=None):
    """Passive-aggressive update: tau = min(eta, loss / k(x, x))."""
    if not eta > 0:
        raise ValueError("eta must be > 0")
    pt = as_point(c, inst)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if loss <= 0.0:
        return StepOutcome(m, loss)
    kxx = c.self_similarity_dense(pt.xsq)
    if kxx <= 0.0:
        return StepOutcome(m, loss, degenerate=True)
    tau = min(eta, loss / kxx)
    c.add_dense(pt.x, pt.xsq, tau * pt.y, pt.t)
    return StepOutcome(m, loss, 1.0, 1, tau, True)


def spa_step(c, inst, p, rng, m=None):
    """Sparse PA: update with probability rho = min(alpha, loss)/beta, step scaled by 1/rho."""
    pt = as_point(c, inst)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if loss <= 0.0:
        return StepOutcome(m, loss)
    rho = min(p.alpha, loss) / p.beta
    if not rng.bernoulli(rho):
        return StepOutcome(m, loss, rho)
    kxx = c.self_similarity_dense(pt.xsq)
    degenerate = kxx <= 0.0
    tau = p.eta / rho if degenerate else min(p.eta / rho, loss / kxx)
    if not (0.0 <= tau <= p.eta / rho and (degenerate or tau * kxx <= loss * (1 + 1e-12))):
        raise AssertionError("SPA step size %r out of bounds" % tau)
    c.add_dense(pt.x, pt.xsq, tau * pt.y, pt.t)
    return StepOutcome(m, loss, rho, 1, tau, True, degenerate)


def perceptron_step(c, inst, m=None):
    """Add y k(x, .) whenever y f(x) <= 0."""
    pt = as_point(c, inst)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if pt.y * m > 0:
        return StepOutcome(m, loss)
    c.add_dense(pt.x, pt.xsq, float(pt.y), pt.t)
    return StepOutcome(m, loss, 1.0, 1, 1.0, True)


def rbp_step(c, inst, B, rng, m=None):
    """Randomized budget perceptron: evict a uniformly random SV when full."""
    pt = as_point(c, inst)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if pt.y * m > 0:
        return StepOutcome(m, loss)
    if len(c) >= B:
        c.remove(rng.randbelow(len(c)))
    c.add_dense(pt.x, pt.xsq, float(pt.y), pt.t)
    check_budget(c, B)
    return StepOutcome(m, loss, 1.0, 1, 1.0, True)


def forgetron_step(c, inst, B, shrink=0.9, m=None):
    """Perceptron that shrinks all coefficients and drops the oldest SV when full."""
    if not 0.0 < shrink <= 1.0:
        raise ValueError("shrink must lie in (0, 1]")
    pt = as_point(c, inst)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if pt.y * m > 0:
        return StepOutcome(m, loss)
    if len(c) >= B:
        c.scale(shrink)
        c.remove(0)
    c.add_dense(pt.x, pt.xsq, float(pt.y), pt.t)
    check_budget(c, B)
    return StepOutcome(m, loss, 1.0, 1, 1.0, True)


def bogd_step(c, inst, B, step=0.1, lam=1e-3, rng=None, m=None):
    """Budget online gradient descent on the regularized hinge loss.

    When full, one SV is evicted uniformly at random and the survivors are
    scaled by B/(B-1), which keeps the expansion unbiased in expectation.
    """
    if not step > 0 or lam < 0:
        raise ValueError("need step > 0 and lam >= 0")
    pt = as_point(c, inst)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if lam:
        c.scale(1.0 - step * lam)
    if loss <= 0.0:
        return StepOutcome(m, loss)
    if len(c) >= B:
        c.remove(rng.randbelow(len(c)))
        if B > 1:
            c.scale(B / (B - 1.0))
    c.add_dense(pt.x, pt.xsq, step * pt.y, pt.t)
    check_budget(c, B)
    return StepOutcome(m, loss, 1.0, 1, step, True)


def bpas_removal_scores(coefs, krow, kself, m, y, kxx, C):
    """Objective and PA step for replacing each SV r by the new instance.

    Returns ``(Q, tau)`` arrays with
    Q(r) = 1/2 |f_r + tau_r y k(x,.) - f|^2 + C loss(f_r + tau_r y k(x,.)),
    f_r = f - coef_r k(x_r, .), tau_r = min(C, loss(f_r) / k(x, x)).
    """
    loss_r = np.maximum(0.0, 1.0 - y * (m - coefs * krow))
    tau = np.minimum(C, loss_r / kxx)
    dist2 = coefs * coefs * kself - 2.0 * coefs * tau * y * krow + tau * tau * kxx
    after = np.maximum(0.0, loss_r - tau * kxx)
    return 0.5 * dist2 + C * after, tau


def bpas_step(c, inst, B, C=0.1, m=None):
    """Budget PA (simple): below budget a plain PA step, at budget the
    replacement that minimizes the PA objective.

    The chosen SV is always replaced by the new instance, even when its PA
    coefficient is 0, so a full classifier stays at exactly B SVs.
    """
    if not C > 0:
        raise ValueError("C must be > 0")
    pt = as_point(c, inst)
    if len(c) < B:
        return pa_step(c, pt, C, m)
    m = _margin(c, pt, m)
    loss = hinge(m, pt.y)
    if loss <= 0.0:
        return StepOutcome(m, loss)
    kxx = c.self_similarity_dense(pt.xsq)
    if kxx <= 0.0:
        return StepOutcome(m, loss, degenerate=True)
    kind, param, normed = c._code
    r, tau_r, _ = _fast.bpas_scan(c._P, c._sq, c._coef, c.n, pt.x, pt.xsq, kind, param,
                                  normed, float(pt.y), kxx, C)
    c.remove(r)
    c.add_dense(pt.x, pt.xsq, tau_r * pt.y, pt.t)
    check_budget(c, B)
    return StepOutcome(m, loss, 1.0, 1, tau_r, True)


def bpas_choice(c, inst, C=0.1):
    """Reference (numpy) version of the BPAS candidate scan: (r, tau_r)."""
    pt = as_point(c, inst)
    krow = c.kernel_row_dense(pt.x, pt.xsq)
    m = float(c.coefs @ krow)
    kxx = c.self_similarity_dense(pt.xsq)
    kself = self_similarity_vec(c.kernel, c.sqnorms)
    Q, tau = bpas_removal_scores(c.coefs, krow, kself, m, pt.y, kxx, C)
    r = int(np.argmin(Q))  # first minimum on ties
    return r, float(tau[r])


def spa_update_bound(alpha, beta, T):
    """alpha/beta + 3 binomial standard deviations of the update fraction."""
    if T <= 0:
        return math.inf
    q = alpha / beta
    return q + 3.0 * math.sqrt(q * (1.0 - q) / T)
