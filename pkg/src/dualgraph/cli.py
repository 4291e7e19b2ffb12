"""Command-line interface.

Subcommands: ``analyze``, ``generate``, ``split``, ``sweep`` (models / split /
stconst), and ``fit``.  Exit codes: 0 success, 2 input error, 3
numerical/trial-cap error.  ``DUALGRAPH_THREADS`` caps sweep parallelism;
outputs are byte-identical regardless of the thread count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InputError, NumericalError
from .experiments import (
    ANALYZE_SCHEMA,
    SPLIT_SCHEMA,
    STCONST_SCHEMA,
    SWEEP_SCHEMA,
    SweepConfig,
    analyze_row,
    loglog_fit,
    model_sweep,
    spanning_constant_sweep,
    split_rows_for_graph,
    splittability_sweep,
)
from .io import format_value, load_graph, read_rows, save_graph, write_rows
from .models import build_model, resolve_model
from .splitting import DEFAULT_TARGET_SUCCESSES, DEFAULT_TRIAL_CAP

FIT_SCHEMA = ("x", "y", "slope", "intercept", "r_squared", "n_points")


def _print_rows(rows, schema):
    import csv

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(schema)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in schema])


def _load_config(path) -> dict:
    """Parse a ``key = value`` config file; lists are comma-separated."""
    path = Path(path)
    if not path.exists():
        raise InputError(f"config file not found: {path}")
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = body.partition("=")
        values[key.strip()] = val.strip()
    return values


def _sweep_config(values: dict) -> SweepConfig:
    def ints(key, default):
        if key not in values:
            return default
        return tuple(int(tok) for tok in values[key].split(",") if tok.strip())

    if "models" not in values:
        raise InputError("sweep config needs a 'models' entry")
    # model specs may contain commas (grid(4,4)), so the list splits on ';'
    models = tuple(tok.strip() for tok in values["models"].split(";") if tok.strip())
    return SweepConfig(
        models=models,
        sizes=ints("sizes", (100, 250, 500, 1000, 2500)),
        seeds_per_size=int(values.get("seeds_per_size", 10)),
        k_values=ints("k_values", (2,)),
        target_successes=int(values.get("target_successes", DEFAULT_TARGET_SUCCESSES)),
        master_seed=int(values.get("master_seed", 0)),
        trial_cap=int(values.get("trial_cap", DEFAULT_TRIAL_CAP)),
        estimator=values.get("estimator", "both"),
    )


def _cmd_analyze(args) -> int:
    g = load_graph(args.graph, args.format)
    row = analyze_row(g, Path(args.graph).stem)
    _print_rows([row], ANALYZE_SCHEMA)
    if args.out:
        write_rows([row], args.out, ANALYZE_SCHEMA)
    return 0


def _cmd_generate(args) -> int:
    spec = resolve_model(args.model)
    g = build_model(spec, args.n, args.seed)
    save_graph(g, args.out, args.format)
    return 0


def _cmd_split(args) -> int:
    if bool(args.graph) == bool(args.model):
        raise InputError("split needs exactly one of --graph or --model")
    if args.graph:
        g = load_graph(args.graph, args.format)
        label = Path(args.graph).stem
    else:
        if args.n is None:
            raise InputError("--model requires -n")
        spec = resolve_model(args.model)
        g = build_model(spec, args.n, args.seed)
        label = spec.name
    rows = split_rows_for_graph(
        g, label, args.k, args.successes, args.seed,
        trial_cap=args.trial_cap, estimator=args.estimator, mode=args.mode,
        absorb_cap=False,
    )
    _print_rows(rows, SPLIT_SCHEMA)
    if args.out:
        write_rows(rows, args.out, SPLIT_SCHEMA)
    return 0


def _cmd_sweep(args) -> int:
    config_values = _load_config(args.config)
    if args.kind == "models":
        rows = model_sweep(_sweep_config(config_values))
        schema = SWEEP_SCHEMA
    elif args.kind == "split":
        rows, fits = splittability_sweep(_sweep_config(config_values))
        schema = SPLIT_SCHEMA
        for k in sorted(fits):
            fit = fits[k]
            if fit is None:
                print(f"# k={k}: not enough data for a fit", file=sys.stderr)
            else:
                print(
                    f"# k={k}: log(p) = {fit.slope:.4f} log(n) + "
                    f"{fit.intercept:.4f}, R^2 = {fit.r_squared:.4f}",
                    file=sys.stderr,
                )
    else:
        config = _sweep_config(config_values)
        specs = [resolve_model(name) for name in config.models]
        rows = spanning_constant_sweep(
            specs, config.sizes, config.seeds_per_size, config.master_seed
        )
        schema = STCONST_SCHEMA
    write_rows(rows, args.out, schema)
    return 0


def _cmd_fit(args) -> int:
    rows = read_rows(args.csv)
    samples = []
    for row in rows:
        if args.x not in row or args.y not in row:
            raise InputError(
                f"fit needs columns {args.x!r} and {args.y!r}; "
                f"file has {sorted(row)}"
            )
        if row[args.y] == "":
            continue
        samples.append((float(row[args.x]), float(row[args.y])))
    fit = loglog_fit(samples)
    print(
        f"log({args.y}) = {fit.slope:.4f} log({args.x}) + {fit.intercept:.4f}"
        f"   R^2 = {fit.r_squared:.4f}   ({fit.n_points} points)"
    )
    fit_row = {
        "x": args.x, "y": args.y, "slope": fit.slope,
        "intercept": fit.intercept, "r_squared": fit.r_squared,
        "n_points": fit.n_points,
    }
    if args.out:
        write_rows([fit_row], args.out, FIT_SCHEMA)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualgraph",
        description="Random-graph models and structural statistics of dual graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structural statistics of a graph file")
    p.add_argument("graph")
    p.add_argument("--format", choices=("node-link", "edge-list"),
                   default="node-link")
    p.add_argument("--out", help="also write the row to this CSV")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("generate", help="generate a model instance")
    p.add_argument("--model", required=True,
                   help="catalog preset (e.g. 11c) or textual spec")
    p.add_argument("-n", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--format", choices=("node-link", "edge-list"),
                   default="node-link")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("split", help="estimate k-splittability of a graph")
    p.add_argument("--graph")
    p.add_argument("--model")
    p.add_argument("--format", choices=("node-link", "edge-list"),
                   default="node-link")
    p.add_argument("-n", type=int, default=None)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--successes", type=int, default=DEFAULT_TARGET_SUCCESSES)
    p.add_argument("--mode", choices=("auto", "exact", "near"), default="auto")
    p.add_argument("--estimator", choices=("ratio", "gbas", "both"),
                   default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial-cap", type=int, default=DEFAULT_TRIAL_CAP)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("sweep", help="batch experiments from a config file")
    p.add_argument("kind", choices=("models", "split", "stconst"))
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fit", help="log-log least squares over CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", default="n")
    p.add_argument("--y", default="p_hat")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
