"""Hedge-weighted multiple-kernel online classification.

One :class:`MultiKernelLearner` drives m per-kernel classifiers through a
stream.  Each round it predicts with sign(sum_i theta_i f_i(x)), updates the
components according to the chosen algorithm, then discounts the Hedge weights
with the per-kernel losses measured *before* the update:

``spa``
    Budget OMKC with sparse PA components.  Kernel i is touched with
    probability p_i = (1 - delta) w_i / max_j w_j + delta; a touched kernel
    runs :func:`~bomkc.learners.spa_step`.  Hedge loss: hinge.
``omkc-u`` / ``omkc-dd`` / ``omkc-sd``
    Perceptron components.  U: fixed uniform theta, all kernels updated.
    DD: Hedge theta, all kernels updated.  SD: Hedge theta, kernel i
    updated only when sampled with p_i.  Hedge loss: mistake indicator.
``rbp`` / ``forgetron`` / ``bogd`` / ``bpas``
    Every component runs the named budget learner with a per-kernel budget B.
    Hedge loss: hinge.
``pa`` / ``perceptron``
    Unbudgeted deterministic PA / Perceptron components with Hedge theta.

Weights are kept as natural logs so long streams cannot underflow.
"""
import math

import numpy as np

from . import learners as L
from . import prng
from .classifier import KernelClassifier
from .learners import Point, SpaParams

ALGORITHMS = ("spa", "omkc-u", "omkc-dd", "omkc-sd",
              "rbp", "forgetron", "bogd", "bpas", "pa", "perceptron")
BUDGETED = ("rbp", "forgetron", "bogd", "bpas")
_ALIASES = {"bomkc-spa": "spa", "bomkc(spa)": "spa", "omkc(u)": "omkc-u",
            "omkc(dd)": "omkc-dd", "omkc(sd)": "omkc-sd"}


def canonical_algorithm(name):
    key = _ALIASES.get(name.lower(), name.lower())
    if key not in ALGORITHMS:
        raise ValueError("unknown algorithm %r; choose from %s" % (name, ", ".join(ALGORITHMS)))
    return key


class HedgeState:
    """Log-domain Hedge weights with discount ``gamma`` and smoothing ``delta``."""

    def __init__(self, m, gamma=0.99, delta=0.001, log_w=None):
        if not 0.0 < gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 < delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        self.gamma = gamma
        self.delta = delta
        self.log_gamma = math.log(gamma)
        self.log_w = (np.full(m, -math.log(m)) if log_w is None
                      else np.array(log_w, dtype=np.float64))

    @property
    def m(self):
        return self.log_w.size

    def theta(self):
        z = self.log_w - self.log_w.max()
        e = np.exp(z)
        return e / e.sum()

    def sampling_probs(self, delta=None):
        delta = self.delta if delta is None else delta
        p = (1.0 - delta) * np.exp(self.log_w - self.log_w.max()) + delta
        return np.minimum(p, 1.0)

    def update(self, losses, mask=None):
        step = np.asarray(losses, dtype=np.float64) * self.log_gamma
        if mask is not None:
            step = np.where(mask, step, 0.0)
        self.log_w = self.log_w + step
        return self

    def copy(self):
        return HedgeState(self.m, self.gamma, self.delta, self.log_w.copy())


def sampling_prob(h, i):
    return float((1.0 - h.delta) * math.exp(h.log_w[i] - h.log_w.max()) + h.delta)


def hedge_update(h, losses):
    return h.copy().update(losses)


def normalize(h):
    return h.theta()


class MultiKernelLearner:
    """State and round loop for every multi-kernel algorithm (see module doc)."""

    def __init__(self, algorithm, kernels, dim, seed=0, *, spa=None, gamma=0.99,
                 delta=0.001, budget=None, step=0.1, lam=1e-3, shrink=0.9, C=0.1,
                 eta=0.1, hedge_loss=None, hedge_all=True, delta_schedule=None,
                 combine=None):
        self.algorithm = canonical_algorithm(algorithm)
        self.kernels = list(kernels)
        if not self.kernels:
            raise ValueError("kernel pool is empty")
        m = len(self.kernels)
        self.dim = int(dim)
        self.seed = int(seed)
        self.spa = spa or SpaParams()
        self.hedge = HedgeState(m, gamma, delta)
        self.delta_schedule = delta_schedule
        if self.algorithm in BUDGETED:
            if budget is None or int(budget) < 1:
                raise ValueError("%s needs a per-kernel budget B >= 1" % self.algorithm)
            budget = int(budget)
        self.budget = budget
        self.step, self.lam, self.shrink, self.C, self.eta = step, lam, shrink, C, eta
        if hedge_loss is None:
            hedge_loss = "mistake" if self.algorithm.startswith("omkc") else "hinge"
        if hedge_loss not in ("hinge", "mistake"):
            raise ValueError("hedge_loss must be 'hinge' or 'mistake'")
        self.hedge_loss = hedge_loss
        if combine is None:
            combine = "vote" if self.algorithm.startswith("omkc") else "margin"
        if combine not in ("margin", "vote"):
            raise ValueError("combine must be 'margin' or 'vote'")
        self.combine = combine
        self.hedge_all = hedge_all

        self.clfs = [KernelClassifier(k, self.dim) for k in self.kernels]
        self.c_rng = [prng.stream_for(seed, prng.SAMPLE_C, i) for i in range(m)]
        self.z_rng = [prng.stream_for(seed, prng.SAMPLE_Z, i) for i in range(m)]
        self.e_rng = [prng.stream_for(seed, prng.EVICT, i) for i in range(m)]

        self.t = 0
        self.mistakes = 0
        self.theta = np.full(m, 1.0 / m)
        self.sampled = np.zeros(m, dtype=np.int64)     # c_i = 1 draws
        self.updates = np.zeros(m, dtype=np.int64)     # SVs added (SPA: z_i = 1)
        self.cum_loss = np.zeros(m)                    # per-kernel hinge, pre-update
        self.cum_combined_loss = 0.0                   # hinge of sum_i theta_i f_i
        self.degenerate = 0
        self.nonfinite = 0

    @property
    def m(self):
        return len(self.clfs)

    def sv_counts(self):
        return np.array([len(c) for c in self.clfs], dtype=np.int64)

    def point(self, inst):
        x = inst.features.to_dense(self.dim)
        return Point(x, float(x @ x), inst.label, self.t + 1)

    def margins(self, pt):
        return np.array([c.margin_dense(pt.x, pt.xsq) for c in self.clfs])

    def observe(self, inst):
        """Process one instance; returns the prediction made before the update."""
        pt = inst if isinstance(inst, Point) else self.point(inst)
        self.t += 1
        pt.t = self.t
        y = pt.y
        margins = self.margins(pt)
        theta = self.theta if self.algorithm != "omkc-u" else np.full(self.m, 1.0 / self.m)
        fx = float(theta @ margins)
        if not math.isfinite(fx):
            self.nonfinite += 1
        if self.combine == "vote":
            score = float(theta @ np.where(margins >= 0, 1.0, -1.0))
        else:
            score = fx
        yhat = 1 if score >= 0 else -1
        if yhat != y:
            self.mistakes += 1
        hinge = np.maximum(0.0, 1.0 - y * margins)
        self.cum_loss += hinge
        self.cum_combined_loss += max(0.0, 1.0 - y * fx)

        mask = self._update(pt, margins, hinge)

        if self.algorithm != "omkc-u":
            losses = hinge if self.hedge_loss == "hinge" else (y * margins <= 0).astype(float)
            self.hedge.update(losses, None if self.hedge_all else mask)
            self.theta = self.hedge.theta()
        return yhat

    def _probs(self):
        delta = self.delta_schedule(self.t) if self.delta_schedule else self.hedge.delta
        return self.hedge.sampling_probs(delta)

    def _update(self, pt, margins, hinge):
        algo = self.algorithm
        clfs = self.clfs
        m = self.m
        if algo == "spa":
            p = self._probs().tolist()
            mask = np.zeros(m, dtype=bool)
            for i in range(m):
                if self.c_rng[i].next_uniform() < p[i]:
                    mask[i] = True
                    self.sampled[i] += 1
                    if hinge[i] > 0.0:
                        out = L.spa_step(clfs[i], pt, self.spa, self.z_rng[i], margins[i])
                        if out.z:
                            self.updates[i] += 1
                            self.degenerate += out.degenerate
            return mask
        if algo.startswith("omkc") or algo == "perceptron":
            wrong = (pt.y * margins <= 0).tolist()
            if algo == "omkc-sd":
                p = self._probs().tolist()
                mask = np.zeros(m, dtype=bool)
                for i in range(m):
                    if self.c_rng[i].next_uniform() < p[i]:
                        mask[i] = True
                        self.sampled[i] += 1
                        if wrong[i]:
                            clfs[i].add_dense(pt.x, pt.xsq, float(pt.y), pt.t)
                            self.updates[i] += 1
                return mask
            for i in range(m):
                if wrong[i]:
                    clfs[i].add_dense(pt.x, pt.xsq, float(pt.y), pt.t)
                    self.updates[i] += 1
            return None
        B = self.budget
        for i in range(m):
            c, mi = clfs[i], margins[i]
            if algo == "pa":
                out = L.pa_step(c, pt, self.eta, mi)
            elif algo == "rbp":
                out = L.rbp_step(c, pt, B, self.e_rng[i], mi)
            elif algo == "forgetron":
                out = L.forgetron_step(c, pt, B, self.shrink, mi)
            elif algo == "bogd":
                out = L.bogd_step(c, pt, B, self.step, self.lam, self.e_rng[i], mi)
            else:
                out = L.bpas_step(c, pt, B, self.C, mi)
            if out.updated:
                self.updates[i] += 1
            self.degenerate += out.degenerate
        return None


def bomkc_spa_round(state, inst):
    """One round of budget OMKC with SPA components; returns the prediction."""
    if state.algorithm != "spa":
        raise ValueError("state was built for %r" % state.algorithm)
    return state.observe(inst)


def omkc_round(variant, state, inst):
    if state.algorithm != "omkc-" + variant.lower():
        raise ValueError("state was built for %r, not OMKC(%s)" % (state.algorithm, variant))
    return state.observe(inst)


def budget_omkc_round(kind, state, inst):
    if state.algorithm != kind:
        raise ValueError("state was built for %r, not %r" % (state.algorithm, kind))
    return state.observe(inst)
