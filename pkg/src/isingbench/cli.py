"""Command-line entry point.

Subcommands: generate, solve, oracle, export, benchmark, report.  Exit
codes: 0 on success, 1 on usage errors, 2 on runtime failures.  A JSON
config file may supply any long-flag value (keys match flag names with
dashes or underscores); explicitly passed flags win.  The environment
variable ISINGBENCH_OUT provides the default output directory where an
--out flag is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bench import (BenchmarkGrid, load_cells, read_external_results_csv,
                    run_grid, runtime_ratios, write_report_csv)
from .exact import brute_force
from .instances import (FAMILY_TABLES, InstanceSpec, ParseError, generate,
                        parse_seed_range, read_instance, write_instance)
from .lp_export import export_ilp, export_iqp
from .model import InputError, to_qubo
from .pegasus import pegasus, write_adjacency_csv
from .solvers import SOLVER_NAMES, run_solver
from .traces import write_trace_csv

OUT_ENV_VAR = "ISINGBENCH_OUT"


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser():
    parser = _Parser(prog="isingbench",
                     description="Hardware-native Ising model workbench")
    parser.add_argument("--config", help="JSON file of default flag values")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("generate", help="sample random instances over Pegasus")
    p.add_argument("--family", choices=sorted(FAMILY_TABLES), required=True)
    p.add_argument("--size", type=int, required=True, help="Pegasus size parameter m")
    p.add_argument("--seeds", default="1", help="seed spec: '7', '1..50', or '1,2,5'")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("solve", help="run one solver on one instance")
    p.add_argument("--solver", choices=SOLVER_NAMES, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="trace CSV path (default: stdout)")
    p.add_argument("--time-limit", type=float, dest="time_limit_s")
    p.add_argument("--sweeps", type=int)
    p.add_argument("--reads", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--tenure", type=int)
    p.add_argument("--schedule", help="annealing schedule CSV for svmc")
    p.add_argument("--steps", type=int, help="svmc anneal discretization steps")
    p.add_argument("--sweeps-per-step", type=int, dest="sweeps_per_step")
    p.add_argument("--betas", help="pt-icm ladder: 'default' or 'tuned'")
    p.add_argument("--rounds", type=int, help="pt-icm rounds")
    p.add_argument("--parallel", type=int,
                   help="independent restarts reduced to their minimum "
                        "(svmc / pt-icm; protocol default 8)")

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    p.add_argument("--instance", required=True)

    p = sub.add_parser("export", help="write LP models or topology CSV")
    p.add_argument("--format", choices=("iqp", "ilp", "adjacency"), required=True)
    p.add_argument("--instance", help="instance JSON (iqp/ilp)")
    p.add_argument("--size", type=int, help="Pegasus size (adjacency)")
    p.add_argument("--out", required=True)

    p = sub.add_parser("benchmark", help="run a solver x instance x budget grid")
    p.add_argument("--grid", required=True, help="grid definition JSON")
    p.add_argument("--out", help="results directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", help="run-time ratios against a reference")
    p.add_argument("--results", required=True, help="results directory")
    p.add_argument("--reference", help="reference solver key "
                                       "(default: the grid's reference)")
    p.add_argument("--external", help="splice targets from instance,energy,"
                                      "elapsed_s CSV")
    p.add_argument("--out", required=True, help="report CSV path")
    p.add_argument("--details", help="optional per-instance detail CSV path")
    return parser


def _apply_config(parser, args, argv):
    if not args.config:
        return args
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"config {args.config}: {exc}") from exc
    if not isinstance(config, dict):
        raise ParseError(f"config {args.config}: expected a JSON object")
    passed = {tok.split("=", 1)[0].lstrip("-").replace("-", "_")
              for tok in argv if tok.startswith("--")}
    for raw_key, value in config.items():
        key = raw_key.replace("-", "_")
        if key in passed:
            continue  # explicit flags win
        if hasattr(args, key) and getattr(args, key) in (None, False):
            setattr(args, key, value)
    return args


def _default_out(value, fallback="."):
    if value:
        return value
    return os.environ.get(OUT_ENV_VAR, fallback)


def _cmd_generate(args):
    out_dir = _default_out(args.out)
    os.makedirs(out_dir, exist_ok=True)
    seeds = parse_seed_range(args.seeds)
    paths = []
    for seed in seeds:
        model = generate(InstanceSpec(family=args.family, m=args.size, seed=seed))
        path = os.path.join(out_dir, f"{args.family}_m{args.size}_s{seed}.json")
        write_instance(model, path)
        paths.append(path)
    print("\n".join(paths))
    return 0


def _cmd_solve(args):
    model = read_instance(args.instance)
    options = {}
    for key in ("time_limit_s", "sweeps", "reads", "restarts", "iterations",
                "tenure", "schedule", "steps", "sweeps_per_step", "betas",
                "rounds"):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    if getattr(args, "parallel", None) is not None:
        options["restarts"] = args.parallel
    trace = run_solver(args.solver, model, options, seed=args.seed)
    name = os.path.basename(args.instance)
    if args.out:
        write_trace_csv(trace, name, args.out)
    else:
        write_trace_csv(trace, name, sys.stdout)
    print(f"best_energy={trace.best_energy!r} elapsed_s={trace.elapsed_total:.3f}",
          file=sys.stderr)
    return 0


def _cmd_oracle(args):
    model = read_instance(args.instance)
    result = brute_force(model)
    print(f"optimal_energy={result.energy!r}")
    print(f"optimal_count={result.count}")
    print("config=" + "".join("+" if v > 0 else "-" for v in result.config))
    return 0


def _cmd_export(args):
    if args.format == "adjacency":
        if args.size is None:
            raise InputError("--format adjacency requires --size")
        write_adjacency_csv(pegasus(args.size), args.out)
        return 0
    if not args.instance:
        raise InputError(f"--format {args.format} requires --instance")
    qubo = to_qubo(read_instance(args.instance))
    if args.format == "iqp":
        export_iqp(qubo, args.out)
    else:
        export_ilp(qubo, args.out)
    return 0


def _cmd_benchmark(args):
    grid = BenchmarkGrid.from_json(args.grid)
    out_dir = _default_out(args.out, fallback="results")
    stats = run_grid(grid, out_dir, workers=args.workers or 1,
                     base_seed=args.seed)
    print(f"executed={stats['executed']} skipped={stats['skipped']} "
          f"failed={stats['failed']}")
    return 0 if stats["failed"] == 0 else 2


def _cmd_report(args):
    cells = load_cells(args.results)
    if args.external:
        cells = cells + read_external_results_csv(args.external)
    report = runtime_ratios(cells, reference_key=args.reference)
    write_report_csv(report, args.out)
    if args.details:
        with open(args.details, "w", encoding="utf-8") as fh:
            fh.write("instance,seed,solver,size,target,time_to_match,ratio\n")
            for row in report.details:
                ttm = "unmatched" if row["time_to_match"] is None \
                    else repr(row["time_to_match"])
                ratio = "" if row["ratio"] is None else repr(row["ratio"])
                fh.write(f"{row['instance']},{row['seed']},{row['solver']},"
                         f"{row['size']},{row['target']!r},{ttm},{ratio}\n")
    print(args.out)
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "oracle": _cmd_oracle,
    "export": _cmd_export,
    "benchmark": _cmd_benchmark,
    "report": _cmd_report,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    if not args.command:
        parser.print_help()
        return 1
    try:
        args = _apply_config(parser, args, argv)
        return _COMMANDS[args.command](args)
    except (InputError, ParseError, OSError, ValueError) as exc:
        print(f"isingbench: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
