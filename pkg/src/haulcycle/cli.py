"""Command-line entry point.

Verbs::

    haulcycle analyze  --config C --algorithm A -K N     one algorithm, one population
    haulcycle compare  --config C [--out P] [--format F] full study and error tables
    haulcycle simulate --config C [--out P]              simulator sweep only
    haulcycle tables --paper [--out DIR] [--no-sim]      regenerate the published tables

``--config`` defaults to the bundled ``paper_base`` study.  Exit codes: 0 ok,
2 config error, 3 algorithm failure (nonconvergence, no bracket, ...), 4 IO.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

from . import study
from .errors import ConfigError, HaulCycleError
from .simcycle import SimConfig, sweep

EXIT_OK, EXIT_CONFIG, EXIT_ALGO, EXIT_IO = 0, 2, 3, 4


def _load(args) -> study.StudyConfig:
    cfg = study.load_config(args.config) if args.config else study.bundled_config("paper_base")
    changes = {}
    seed = args.seed if args.seed is not None else study.default_seed(cfg.simulation.seed)
    if seed < 0:
        raise ConfigError("must be >= 0", field="seed")
    changes["simulation"] = dataclasses.replace(cfg.simulation, seed=seed)
    if getattr(args, "eps", None) is not None:
        if not args.eps > 0:
            raise ConfigError("must be > 0", field="eps")
        changes["eps"] = args.eps
    out = cfg.output
    if getattr(args, "format", None):
        out = dataclasses.replace(out, format=args.format)
    if getattr(args, "out", None):
        out = dataclasses.replace(out, path=args.out)
    changes["output"] = out
    return dataclasses.replace(cfg, **changes)


def _cmd_analyze(args) -> int:
    cfg = _load(args)
    alg, K = args.algorithm, args.K
    if alg not in study.ALGORITHMS:
        raise ConfigError(f"unknown algorithm {alg!r}", field="algorithm")
    if K < 1:
        raise ConfigError("must be >= 1", field="K")
    one = dataclasses.replace(cfg, k_range=(K, K), algorithms=(alg,), reference=None)
    if alg == "stst-m" and one.disturbance is None:
        raise ConfigError("stst-m requires a disturbance block", field="disturbance")
    table = study.run_study(one)
    if table.diagnostics:
        print(table.diagnostics[0], file=sys.stderr)
        return EXIT_ALGO
    idle = table.rows[alg][0]
    rec = {"algorithm": alg, "K": K, "idle1": idle}
    if table.modified_moments is not None:
        rec["modified_mean"] = table.modified_moments.mean
        rec["modified_variance"] = table.modified_moments.variance
    print(json.dumps(rec))
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = _load(args)
    table = study.run_study(cfg)
    if cfg.output.path:
        for p in study.emit(table, cfg.output.format, cfg.output.path):
            print(p)
    elif cfg.output.format == "markdown":
        sys.stdout.write(study.render_markdown(table))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm"] + [f"K={K}" for K in table.ks])
        for alg, vals in table.rows.items():
            w.writerow([study.LABELS[alg]] + [study._fmt_full(v) for v in vals])
        sys.stdout.write(buf.getvalue())
    for d in table.diagnostics:
        print(f"warning: {d}", file=sys.stderr)
    return EXIT_OK


SIM_FIELDS = ("K", "idle1", "lambda1", "mean_service1", "neg_sample_count",
              "breakdowns", "event_count")


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    sc = SimConfig(cfg.network(), cfg.disturbance_spec(), cfg.simulation.horizon,
                   cfg.simulation.warmup, cfg.simulation.seed)
    ests = sweep(sc, *cfg.k_range)
    J = len(cfg.nodes)
    header = list(SIM_FIELDS) + [f"mean_queue_{j + 1}" for j in range(J)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for e in ests:
        row = [e.K, e.idle1, e.lambda_node[0], e.mean_service1, e.neg_sample_count,
               e.breakdowns, e.event_count] + list(e.mean_queue)
        w.writerow([v if isinstance(v, int) else f"{float(v):.17g}" for v in row])
    if args.out:
        p = Path(args.out)
        if p.suffix != ".csv":
            p = p.with_name(p.name + ".csv")
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(buf.getvalue())
        print(p)
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _cmd_tables(args) -> int:
    if not args.paper:
        raise ConfigError("only the bundled published studies are available; pass --paper")
    out = Path(args.out or "tables")
    fmt = args.format or "csv"
    for name in ("paper_base", "paper_disturbed"):
        cfg = study.bundled_config(name)
        sim = dataclasses.replace(cfg.simulation, seed=args.seed if args.seed is not None
                                  else study.default_seed(cfg.simulation.seed))
        algs = tuple(a for a in cfg.algorithms if not (args.no_sim and a == "sim"))
        cfg = dataclasses.replace(cfg, simulation=sim, algorithms=algs,
                                  eps=args.eps if args.eps is not None else cfg.eps)
        table = study.run_study(cfg)
        for p in study.emit(table, fmt, out / name):
            print(p)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="haulcycle", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p, with_out=True):
        p.add_argument("--config", help="study JSON (default: bundled paper_base)")
        p.add_argument("--seed", type=int, help="simulation seed override")
        p.add_argument("--eps", type=float, help="convergence tolerance for iterative algorithms")
        if with_out:
            p.add_argument("--out", help="output path (without extension)")
            p.add_argument("--format", choices=("csv", "markdown"))

    p = sub.add_parser("analyze", help="one algorithm at one population")
    common(p, with_out=False)
    p.add_argument("--algorithm", "-a", required=True, choices=study.ALGORITHMS)
    p.add_argument("-K", type=int, required=True, help="number of trucks")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("compare", help="full study: every algorithm over the K range")
    common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("simulate", help="simulator sweep over the K range")
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tables", help="regenerate the published comparison tables")
    p.add_argument("--paper", action="store_true", help="use the bundled published studies")
    p.add_argument("--out", help="output directory (default: ./tables)")
    p.add_argument("--format", choices=("csv", "markdown"))
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--no-sim", action="store_true", help="skip the simulator runs")
    p.set_defaults(func=_cmd_tables)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HaulCycleError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ALGO


if __name__ == "__main__":
    sys.exit(main())
