"""Benchmark harness: seeded runs, repetitions, alpha/beta sweeps, output files.

Every run streams one fresh permutation of the dataset through a
:class:`~bomkc.multi.MultiKernelLearner` and records the cumulative mistake
count at 100 evenly spaced checkpoints plus the final round.  Mistake rates
are fractions in [0, 1]; times are seconds around the learning loop only.
"""
import csv
import io
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import prng
from .data import resolve_dataset, subsample
from .kernels import default_pool, pool_from_records
from .learners import Point, SpaParams, spa_update_bound
from .multi import BUDGETED, MultiKernelLearner, canonical_algorithm

SUMMARY_COLUMNS = ("algorithm", "dataset", "seed_base", "reps", "mistake_mean", "mistake_std",
                   "sv_mean", "sv_std", "time_mean", "time_std")
TRAJECTORY_COLUMNS = ("algorithm", "dataset", "seed", "round", "cumulative_mistakes",
                      "mistake_rate")
SWEEP_COLUMNS = ("alpha", "beta", "metric", "mean", "std", "reps")
REGRET_COLUMNS = ("round", "learner", "cum_loss", "comparator_loss", "regret",
                  "loss_over_sqrt_t", "regret_over_sqrt_t")
TIME_COLUMNS = ("time_mean", "time_std", "wall_time")


class BoundViolation(AssertionError):
    """SPA update fraction exceeded alpha/beta plus three binomial std."""


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dataset: str = "german"
    algorithm: str = "spa"
    kernels: Optional[list] = None      # list of {kind, parameter} records; None = default pool
    normalized: bool = False
    eta: float = 0.1
    alpha: float = 1.0
    beta: Optional[float] = None        # None -> 3 (300 for susy)
    gamma: float = 0.99
    delta: float = 0.001
    budget: object = None               # int, or "auto" = round(SPA total SV / m)
    step: float = 0.1
    lam: float = 1e-3
    shrink: float = 0.9
    C: float = 0.1
    hedge_loss: Optional[str] = None
    hedge_all: bool = True
    combine: Optional[str] = None
    reps: int = 10
    seed: int = 0
    subsample: Optional[int] = None
    subsample_fraction: Optional[float] = None
    checkpoints: int = 100
    out_dir: str = "results"
    format: str = "csv"

    def __post_init__(self):
        self.algorithm = canonical_algorithm(self.algorithm)
        if int(self.reps) < 1:
            raise ConfigError("reps must be >= 1")
        self.reps = int(self.reps)
        self.seed = int(self.seed)
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.budget not in (None, "auto"):
            self.budget = int(self.budget)
            if self.budget < 1:
                raise ConfigError("budget must be >= 1")
        if self.dataset_key == "susy":
            if self.beta is None:
                self.beta = 300.0
            if self.subsample is None and self.subsample_fraction is None:
                self.subsample_fraction = 0.2
        if self.beta is None:
            self.beta = 3.0
        self.spa_params()  # validates alpha/beta/eta

    @property
    def dataset_key(self):
        return Path(str(self.dataset)).name.lower().split(".")[0]

    def spa_params(self):
        return SpaParams(self.eta, self.alpha, self.beta)

    def pool(self):
        if self.kernels is None:
            pool = default_pool()
            if self.normalized:
                pool = pool_from_records([k.to_record() for k in pool], True)
            return pool
        return pool_from_records(self.kernels, self.normalized)

    def replace(self, **kw):
        d = self.to_dict()
        d.update(kw)
        return RunConfig(**d)

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError("unknown config keys: %s" % ", ".join(extra))
        return cls(**d)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                d = json.load(fh)
        except OSError as exc:
            raise OSError("cannot read config %s: %s" % (path, exc)) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config %s is not valid JSON: %s" % (path, exc)) from exc
        return cls.from_dict(d)


@dataclass
class RunMetrics:
    algorithm: str
    dataset: str
    seed: int
    T: int
    checkpoints: list
    cumulative_mistakes: list
    mistakes: int
    mistake_rate: Optional[float]
    sv_counts: list
    sv_total: int
    updates: list
    wall_time: float
    budget: Optional[int] = None
    theta: list = field(default_factory=list)
    degenerate: int = 0
    update_fraction_max: float = 0.0
    update_bound: Optional[float] = None


@dataclass
class Summary:
    algorithm: str
    dataset: str
    seed_base: int
    reps: int
    mistake_mean: Optional[float]
    mistake_std: Optional[float]
    sv_mean: float
    sv_std: float
    time_mean: float
    time_std: float
    runs: list = field(default_factory=list, repr=False)

    def row(self):
        return {k: getattr(self, k) for k in SUMMARY_COLUMNS}


_CACHE = {}


def load_dataset(cfg):
    """Resolve the config's dataset, applying the seeded subsample if requested."""
    key = (str(cfg.dataset), cfg.subsample, cfg.subsample_fraction, cfg.seed)
    if key in _CACHE:
        return _CACHE[key]
    ds = resolve_dataset(cfg.dataset)
    n = cfg.subsample
    if cfg.subsample_fraction is not None:
        n = int(round(cfg.subsample_fraction * len(ds)))
    if n is not None and n < len(ds):
        # one subsample per base seed, shared by all repetitions
        ds = subsample(ds, n, prng.stream_for(cfg.seed, prng.DATA))
    if len(_CACHE) > 8:
        _CACHE.clear()
    _CACHE[key] = ds
    return ds


def checkpoint_rounds(T, n=100):
    if T <= 0:
        return []
    pts = np.unique(np.ceil(np.linspace(0, T, n + 1)[1:]).astype(np.int64))
    return [int(r) for r in pts if r >= 1]


def make_learner(cfg, dim, seed, budget=None):
    return MultiKernelLearner(
        cfg.algorithm, cfg.pool(), dim, seed,
        spa=cfg.spa_params(), gamma=cfg.gamma, delta=cfg.delta,
        budget=budget, step=cfg.step, lam=cfg.lam, shrink=cfg.shrink, C=cfg.C,
        eta=cfg.eta, hedge_loss=cfg.hedge_loss, hedge_all=cfg.hedge_all, combine=cfg.combine)


def matched_budget(cfg, dataset=None):
    """round(mean SPA total SV / m), from a SPA run of the same config."""
    spa = repeat_and_average(cfg.replace(algorithm="spa", budget=None), dataset)
    return max(1, int(round(spa.sv_mean / len(cfg.pool()))))


def _budget(cfg, dataset):
    if cfg.algorithm not in BUDGETED:
        return None
    if cfg.budget is None:
        raise ConfigError("%s needs a budget (an integer or \"auto\")" % cfg.algorithm)
    if cfg.budget == "auto":
        return matched_budget(cfg, dataset)
    return cfg.budget


def run_experiment(cfg, seed, dataset=None, budget=None):
    """One online pass over a seeded permutation; deterministic given (cfg, seed)."""
    ds = load_dataset(cfg) if dataset is None else dataset
    if budget is None:
        budget = _budget(cfg, ds)
    T = len(ds)
    X = ds.dense()
    sq = np.einsum("ij,ij->i", X, X) if T else np.zeros(0)
    y = ds.labels
    order = prng.stream_for(seed, prng.PERMUTE).permutation(T)
    learner = make_learner(cfg, ds.dim, seed, budget)
    marks = checkpoint_rounds(T, cfg.checkpoints)
    cum = []
    nxt = 0

    t0 = time.perf_counter()
    for t, i in enumerate(order.tolist(), 1):
        learner.observe(Point(X[i], float(sq[i]), int(y[i])))
        if t == marks[nxt]:
            cum.append(learner.mistakes)
            nxt += 1
    wall = time.perf_counter() - t0

    svs = learner.sv_counts()
    m = RunMetrics(
        algorithm=cfg.algorithm, dataset=ds.name or str(cfg.dataset), seed=int(seed), T=T,
        checkpoints=marks, cumulative_mistakes=cum, mistakes=learner.mistakes,
        mistake_rate=(learner.mistakes / T) if T else None,
        sv_counts=svs.tolist(), sv_total=int(svs.sum()), updates=learner.updates.tolist(),
        wall_time=wall, budget=budget, theta=learner.theta.tolist(),
        degenerate=learner.degenerate)
    if cfg.algorithm == "spa":
        check_update_bound(m, cfg.alpha, cfg.beta)
    if budget is not None and m.sv_total > budget * len(svs):
        raise BoundViolation("total SV %d exceeds %d x %d" % (m.sv_total, len(svs), budget))
    return m


def check_update_bound(m, alpha, beta):
    """Per-kernel SPA update fraction must stay under alpha/beta + 3 binomial std."""
    if m.T == 0:
        return m
    bound = spa_update_bound(alpha, beta, m.T)
    frac = max(m.updates) / m.T
    m.update_fraction_max, m.update_bound = frac, bound
    if frac > bound:
        raise BoundViolation("SPA update fraction %.5f exceeds %.5f (alpha=%g beta=%g T=%d)"
                             % (frac, bound, alpha, beta, m.T))
    return m


def _mean_std(xs):
    xs = [x for x in xs if x is not None]
    if not xs:
        return None, None
    a = np.asarray(xs, dtype=np.float64)
    return float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0


def summarize(runs, seed_base):
    mm, ms = _mean_std([r.mistake_rate for r in runs])
    sm, ss = _mean_std([r.sv_total for r in runs])
    tm, ts = _mean_std([r.wall_time for r in runs])
    r0 = runs[0]
    return Summary(r0.algorithm, r0.dataset, seed_base, len(runs), mm, ms, sm, ss, tm, ts, runs)


def repeat_and_average(cfg, dataset=None):
    """Run seeds seed..seed+reps-1 and report mean / sample std."""
    ds = load_dataset(cfg) if dataset is None else dataset
    budget = _budget(cfg, ds)
    runs = [run_experiment(cfg, cfg.seed + r, ds, budget) for r in range(cfg.reps)]
    return summarize(runs, cfg.seed)


def sweep(cfg, alphas, betas, dataset=None):
    """One Summary per (alpha, beta) with beta >= alpha; returns [(alpha, beta, Summary)]."""
    ds = load_dataset(cfg) if dataset is None else dataset
    grid = []
    for a in alphas:
        for b in betas:
            if not (a > 0 and b > 0):
                raise ConfigError("alpha and beta must be positive (got %r, %r)" % (a, b))
            if b < a:
                warnings.warn("skipping alpha=%g beta=%g (beta < alpha)" % (a, b))
                continue
            grid.append((a, b, repeat_and_average(cfg.replace(alpha=a, beta=b), ds)))
    if not grid:
        raise ConfigError("every (alpha, beta) cell was skipped; need beta >= alpha")
    return grid


def sweep_rows(grid):
    rows = []
    for a, b, s in grid:
        for metric in ("mistake", "sv", "time"):
            rows.append({"alpha": a, "beta": b, "metric": metric,
                         "mean": getattr(s, metric + "_mean"),
                         "std": getattr(s, metric + "_std"), "reps": s.reps})
    return rows


def best_single_kernel_search(cfg, dataset=None):
    """Kernel Perceptron per pool kernel on the permutation of ``cfg.seed``.

    Returns (kernel, metrics, [(kernel, metrics), ...]); ties go to the lower index.
    """
    ds = load_dataset(cfg) if dataset is None else dataset
    pool = cfg.pool()
    if not pool:
        raise ConfigError("kernel pool is empty")
    table = []
    best = None
    for k in pool:
        one = cfg.replace(algorithm="perceptron", kernels=[k.to_record()], budget=None)
        m = run_experiment(one, cfg.seed, ds)
        table.append((k, m))
        if best is None or m.mistakes < best[1].mistakes:
            best = (k, m)
    return best[0], best[1], table


def perceptron_star(cfg, dataset=None):
    """Search the best kernel, then average its Perceptron over the config's seeds."""
    ds = load_dataset(cfg) if dataset is None else dataset
    k, _, table = best_single_kernel_search(cfg, ds)
    one = cfg.replace(algorithm="perceptron", kernels=[k.to_record()], budget=None)
    return k, repeat_and_average(one, ds), table


def _pa_comparator(kernel, X, sq, y, order, eta, epochs):
    """Multi-epoch PA pass: a stand-in for the best fixed hypothesis in hindsight."""
    from .classifier import KernelClassifier
    from .learners import pa_step
    c = KernelClassifier(kernel, X.shape[1])
    for _ in range(epochs):
        for i in order:
            pa_step(c, Point(X[i], float(sq[i]), int(y[i])), eta)
    losses = np.array([max(0.0, 1.0 - y[i] * c.margin_dense(X[i], float(sq[i]))) for i in order])
    return np.cumsum(losses)


def empirical_regret_report(cfg, dataset=None, seed=None, epochs=3, max_T=20000):
    """Cumulative hinge loss of each SPA component and of the combination.

    Rows hold loss/sqrt(t) and regret/sqrt(t), with regret measured against a
    multi-epoch PA pass over the same permutation (an approximation of the
    best fixed classifier).  The combination is compared to the best comparator.
    """
    ds = load_dataset(cfg) if dataset is None else dataset
    T = len(ds)
    if T > max_T:
        raise ConfigError("regret report is meant for T <= %d (got %d)" % (max_T, T))
    if T == 0:
        return []
    seed = cfg.seed if seed is None else seed
    X = ds.dense()
    sq = np.einsum("ij,ij->i", X, X)
    y = ds.labels
    order = prng.stream_for(seed, prng.PERMUTE).permutation(T).tolist()
    spa_cfg = cfg.replace(algorithm="spa", budget=None)
    learner = make_learner(spa_cfg, ds.dim, seed)
    pool = learner.kernels
    marks = set(checkpoint_rounds(T, cfg.checkpoints))
    traj = []
    for t, i in enumerate(order, 1):
        learner.observe(Point(X[i], float(sq[i]), int(y[i])))
        if t in marks:
            traj.append((t, learner.cum_loss.copy(), learner.cum_combined_loss))
    comp = [_pa_comparator(k, X, sq, y, order, cfg.eta, epochs) for k in pool]
    rows = []
    for t, per, comb in traj:
        best_comp = min(c[t - 1] for c in comp)
        for k, L, c in zip(pool, per, comp):
            rows.append(_regret_row(t, k.label, L, c[t - 1]))
        rows.append(_regret_row(t, "combined", comb, best_comp))
    return rows


def _regret_row(t, name, loss, comp):
    r = loss - comp
    s = math.sqrt(t)
    return {"round": t, "learner": name, "cum_loss": float(loss),
            "comparator_loss": float(comp), "regret": float(r),
            "loss_over_sqrt_t": float(loss) / s, "regret_over_sqrt_t": float(r) / s}


# ---------------------------------------------------------------- output

def trajectory_rows(m):
    return [{"algorithm": m.algorithm, "dataset": m.dataset, "seed": m.seed, "round": r,
             "cumulative_mistakes": c, "mistake_rate": c / r}
            for r, c in zip(m.checkpoints, m.cumulative_mistakes)]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(rows, columns):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return out.getvalue()


def _jsonable(obj):
    if isinstance(obj, (Summary, RunMetrics)):
        d = asdict(obj)
        return d
    if isinstance(obj, list) and obj and isinstance(obj[0], tuple) and len(obj[0]) == 3 \
            and isinstance(obj[0][2], Summary):
        return [{"alpha": a, "beta": b, "summary": asdict(s)} for a, b, s in obj]
    if isinstance(obj, list):
        return [_jsonable(o) for o in obj]
    return obj


def render(obj, fmt="csv"):
    """Text of ``obj`` (RunMetrics, Summary, list of Summary, sweep grid, or rows)."""
    if fmt == "json":
        return json.dumps(_jsonable(obj), indent=1, sort_keys=True) + "\n"
    if fmt != "csv":
        raise ConfigError("format must be csv or json")
    if isinstance(obj, RunMetrics):
        return to_csv(trajectory_rows(obj), TRAJECTORY_COLUMNS)
    if isinstance(obj, Summary):
        obj = [obj]
    if isinstance(obj, list) and obj and isinstance(obj[0], Summary):
        return to_csv([s.row() for s in obj], SUMMARY_COLUMNS)
    if isinstance(obj, list) and obj and isinstance(obj[0], tuple):
        return to_csv(sweep_rows(obj), SWEEP_COLUMNS)
    if isinstance(obj, list):
        cols = list(obj[0]) if obj else []
        return to_csv(obj, cols)
    raise TypeError("cannot render %r" % type(obj).__name__)


def emit(obj, fmt, path):
    """Write ``obj`` to ``path``; I/O errors name the path."""
    text = render(obj, fmt)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError("cannot write %s: %s" % (path, exc)) from exc
    return path


def strip_time_columns(csv_text):
    """Drop the wall-clock columns (for determinism comparisons)."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    if not rows:
        return csv_text
    keep = [j for j, c in enumerate(rows[0]) if c not in TIME_COLUMNS]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    for r in rows:
        w.writerow([r[j] for j in keep])
    return out.getvalue()
