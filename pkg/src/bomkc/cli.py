"""Command line driver.

    bomkc run    --config cfg.json [--seed S]          one seeded pass, trajectory file
    bomkc bench  --config cfg.json --algorithm spa,rbp one Summary row per algorithm
    bomkc sweep  --alphas 1 --betas 1,2,3,6,12          alpha/beta grid, long format
    bomkc search-kernel                                  best single-kernel Perceptron
    bomkc regret                                         loss / sqrt(T) trajectories

Any config field can be set with a flag (--dataset, --beta, ...) or with
``--set key=value``; flags win over the config file.  Failures exit with
status 1 and a one-line JSON error record on stderr.
"""
import argparse
import json
import sys
import traceback
from pathlib import Path

from . import harness as H

_FIELDS = {
    "dataset": str, "algorithm": str, "eta": float, "alpha": float, "beta": float,
    "gamma": float, "delta": float, "budget": str, "step": float, "lam": float,
    "shrink": float, "C": float, "reps": int, "subsample": int,
    "subsample_fraction": float, "checkpoints": int, "hedge_loss": str, "combine": str,
}


def _floats(s):
    return [float(v) for v in s.split(",") if v.strip()]


def build_parser():
    ap = argparse.ArgumentParser(prog="bomkc", description="budget online multiple kernel benchmarks")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config")
    common.add_argument("--seed", type=int)
    common.add_argument("--out-dir")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--normalized", action="store_true", default=None,
                        help="cosine-normalize polynomial kernels")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any config field (value parsed as JSON when possible)")
    for name, typ in _FIELDS.items():
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=typ)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="one seeded pass")
    sub.add_parser("bench", parents=[common], help="repetitions; comma-separated --algorithm")
    sp = sub.add_parser("sweep", parents=[common], help="alpha/beta grid")
    sp.add_argument("--alphas", type=_floats, default=[1.0])
    sp.add_argument("--betas", type=_floats, default=[1.0, 2.0, 3.0, 6.0, 12.0])
    sub.add_parser("search-kernel", parents=[common], help="best single-kernel Perceptron")
    rp = sub.add_parser("regret", parents=[common], help="empirical regret trajectories")
    rp.add_argument("--epochs", type=int, default=3)
    return ap


def _parse_value(v):
    try:
        return json.loads(v)
    except ValueError:
        return v


def make_config(args, algorithm=None):
    d = {}
    if args.config:
        with open(args.config) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise H.ConfigError("config %s is not valid JSON: %s" % (args.config, exc))
    for kv in args.set:
        k, sep, v = kv.partition("=")
        if not sep:
            raise H.ConfigError("--set expects KEY=VALUE, got %r" % kv)
        d[k.strip()] = _parse_value(v)
    for name in _FIELDS:
        v = getattr(args, name)
        if v is not None:
            d[name] = v
    if d.get("budget") not in (None, "auto"):
        d["budget"] = int(d["budget"])
    for name in ("seed", "out_dir", "format", "normalized"):
        v = getattr(args, name)
        if v is not None:
            d[name] = v
    if algorithm is not None:
        d["algorithm"] = algorithm
    return H.RunConfig.from_dict(d)


def _out(cfg, stem):
    return Path(cfg.out_dir) / ("%s.%s" % (stem, cfg.format))


def _tag(cfg):
    return "%s_%s" % (cfg.dataset_key, cfg.algorithm)


def cmd_run(args):
    cfg = make_config(args)
    m = H.run_experiment(cfg, cfg.seed)
    path = H.emit(m, cfg.format, _out(cfg, "%s_seed%d" % (_tag(cfg), cfg.seed)))
    rate = "n/a" if m.mistake_rate is None else "%.2f%%" % (100 * m.mistake_rate)
    print("%s %s seed=%d T=%d mistake=%s SV=%d time=%.2fs -> %s"
          % (m.algorithm, m.dataset, m.seed, m.T, rate, m.sv_total, m.wall_time, path))


def cmd_bench(args):
    algos = [a.strip() for a in args.algorithm.split(",")] if args.algorithm else [None]
    base = make_config(args, algos[0])
    ds = H.load_dataset(base)
    budget = base.budget
    summaries = []
    for a in algos:
        cfg = make_config(args, a)
        if cfg.budget == "auto" and cfg.algorithm in H.BUDGETED:
            if budget == "auto":
                spa = [x for x in summaries if x.algorithm == "spa"]
                if spa:
                    budget = max(1, int(round(spa[0].sv_mean / len(cfg.pool()))))
                else:
                    budget = H.matched_budget(cfg, ds)
                print("matched budget B=%d" % budget)
            cfg = cfg.replace(budget=budget)
        s = H.repeat_and_average(cfg, ds)
        summaries.append(s)
        print(_summary_line(s))
    stem = "%s_bench" % base.dataset_key
    print("->", H.emit(summaries, base.format, _out(base, stem)))


def _summary_line(s):
    mm = "n/a" if s.mistake_mean is None else "%.2f +- %.2f%%" % (100 * s.mistake_mean, 100 * s.mistake_std)
    return "%-10s %-12s mistake %s  SV %.1f +- %.1f  time %.2fs" % (
        s.algorithm, s.dataset, mm, s.sv_mean, s.sv_std, s.time_mean)


def cmd_sweep(args):
    cfg = make_config(args)
    grid = H.sweep(cfg, args.alphas, args.betas)
    for a, b, s in grid:
        print("alpha=%g beta=%g  %s" % (a, b, _summary_line(s)))
    print("->", H.emit(grid, cfg.format, _out(cfg, "%s_sweep" % cfg.dataset_key)))


def cmd_search_kernel(args):
    cfg = make_config(args)
    k, summary, table = H.perceptron_star(cfg)
    for kk, m in table:
        print("%-16s mistake %.2f%%" % (kk.label, 100 * (m.mistake_rate or 0.0)))
    print("best kernel: %s" % k.label)
    print(_summary_line(summary))
    rows = [{"kernel": kk.label, "kind": kk.kind, "parameter": kk.param,
             "mistake_rate": m.mistake_rate, "sv_total": m.sv_total} for kk, m in table]
    print("->", H.emit(rows, cfg.format, _out(cfg, "%s_kernels" % cfg.dataset_key)))
    print("->", H.emit(summary, cfg.format, _out(cfg, "%s_perceptron_star" % cfg.dataset_key)))


def cmd_regret(args):
    cfg = make_config(args)
    rows = H.empirical_regret_report(cfg, epochs=args.epochs)
    if rows:
        last = [r for r in rows if r["round"] == rows[-1]["round"]]
        for r in last:
            print("%-16s loss/sqrt(T)=%.3f regret/sqrt(T)=%.3f"
                  % (r["learner"], r["loss_over_sqrt_t"], r["regret_over_sqrt_t"]))
    path = _out(cfg, "%s_regret" % cfg.dataset_key)
    if cfg.format == "csv":
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        text = H.to_csv(rows, H.REGRET_COLUMNS)
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError("cannot write %s: %s" % (path, exc)) from exc
    else:
        H.emit(rows, "json", path)
    print("->", path)


COMMANDS = {"run": cmd_run, "bench": cmd_bench, "sweep": cmd_sweep,
            "search-kernel": cmd_search_kernel, "regret": cmd_regret}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except Exception as exc:  # report every failure as a machine-readable record
        rec = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        if "BOMKC_DEBUG" in __import__("os").environ:
            traceback.print_exc()
        sys.stderr.write(json.dumps(rec) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
