# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Command line interface: ``qlio run|stats|list-functions|refine``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Any, Sequence

from . import __version__
from .errors import ConfigError, QlioError
from .harness import (
    ExperimentConfig,
    export_cells_csv,
    export_csv,
    function_table,
    read_records,
    refine_records,
    run_experiment,
    write_records,
)
from .lio import LioConfig
from .stats import DEFAULT_ALPHA, aggregate, render_table

__all__ = ["EXIT_OK", "EXIT_RUNTIME", "EXIT_USAGE", "main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; usage errors are 1 here.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


# Flag destination -> ExperimentConfig.from_mapping key.
_RUN_FLAGS = {
    "functions": "functions",
    "dims": "dimensions",
    "runs": "runs_per_cell",
    "seed": "base_seed",
    "agents": "num_agents",
    "iter_scale": "iteration_scale",
    "max_iterations": "max_iterations",
    "p_max": "p_max",
    "bh_agents": "bh_agents",
    "bh_iters": "bh_iterations",
    "out": "output_path",
    "workers": "workers",
}


def _add_run_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "run", help="Run the experiment matrix and persist every run"
    )
    parser.add_argument(
        "--config", metavar="FILE", help="YAML file of configuration keys"
    )

    group = parser.add_argument_group("Experiment Matrix")
    group.add_argument(
        "--functions", help="Comma separated benchmark function names"
    )
    group.add_argument("--dims", help="Comma separated dimensions")
    group.add_argument("--runs", type=int, help="Runs per cell")
    group.add_argument("--seed", type=int, help="Base seed")

    group = parser.add_argument_group("Q-PSO Parameters")
    group.add_argument("--agents", type=int, help="Swarm size")
    group.add_argument(
        "--iter-scale",
        type=int,
        help="Iterations per decision variable",
    )
    group.add_argument(
        "--max-iterations",
        type=int,
        help="Fixed iteration count overriding --iter-scale",
    )

    group = parser.add_argument_group("LIO Parameters")
    group.add_argument("--p-max", type=float, help="Upper bound of p")
    group.add_argument("--bh-agents", type=int, help="Black Hole stars")
    group.add_argument("--bh-iters", type=int, help="Black Hole iterations")
    group.add_argument(
        "--no-seed-p2",
        action="store_true",
        help="Do not start one Black Hole star at p = 2",
    )

    group = parser.add_argument_group("Execution")
    group.add_argument("--out", metavar="FILE", help="Result file")
    group.add_argument("--workers", type=int, help="Worker processes")
    group.add_argument(
        "--resume",
        action="store_true",
        help="Keep an existing result file and skip runs it already holds",
    )
    parser.set_defaults(command=cmd_run)


def _add_stats_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "stats", help="Summarize a result file as a comparison table"
    )
    parser.add_argument(
        "--in", dest="input", metavar="FILE", required=True, help="Result file"
    )
    parser.add_argument(
        "--alpha",
        type=float,
        default=DEFAULT_ALPHA,
        help="Significance level of the Wilcoxon test",
    )
    parser.add_argument(
        "--runs", type=int, help="Require exactly this many runs per cell"
    )
    parser.add_argument("--csv", metavar="FILE", help="Write per-run CSV")
    parser.add_argument(
        "--cells-csv", metavar="FILE", help="Write per-cell statistics CSV"
    )
    parser.set_defaults(command=cmd_stats)


def _add_refine_parser(subparsers) -> None:
    parser = subparsers.add_parser(
        "refine", help="Re-run only LIO on the q* stored in a result file"
    )
    parser.add_argument(
        "--in", dest="input", metavar="FILE", required=True, help="Result file"
    )
    parser.add_argument(
        "--out",
        metavar="FILE",
        help="Refined result file (default: <in stem>.refined.ndjson)",
    )
    parser.add_argument(
        "--p-max", type=float, required=True, help="Upper bound of p"
    )
    parser.add_argument("--bh-agents", type=int, default=20)
    parser.add_argument("--bh-iters", type=int, default=50)
    parser.add_argument("--no-seed-p2", action="store_true")
    parser.set_defaults(command=cmd_refine)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="qlio",
        description="Quaternion-space PSO with Last Iteration Optimization",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + __version__
    )
    parser.add_argument(
        "--log-level",
        default=os.environ.get("QLIO_LOG_LEVEL", "WARNING"),
        help="Logging level (default: $QLIO_LOG_LEVEL or WARNING)",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Lower the logging level; repeat for DEBUG",
    )

    subparsers = parser.add_subparsers(
        dest="subcommand", required=True, parser_class=_ArgumentParser
    )
    _add_run_parser(subparsers)
    _add_stats_parser(subparsers)
    list_parser = subparsers.add_parser(
        "list-functions", help="List the benchmark functions"
    )
    list_parser.set_defaults(command=cmd_list_functions)
    _add_refine_parser(subparsers)

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.getLevelName(str(args.log_level).upper())
    if not isinstance(level, int):
        raise ConfigError("unknown log level %r" % args.log_level)
    level = max(logging.DEBUG, level - 10 * args.verbose)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge ``--config`` with command line overrides."""
    mapping: dict[str, Any] = {}
    if args.config:
        mapping.update(ExperimentConfig.from_file(args.config).to_mapping())

    for dest, key in _RUN_FLAGS.items():
        value = getattr(args, dest)
        if value is not None:
            mapping[key] = value
    if args.no_seed_p2:
        mapping["seed_p2"] = False

    return ExperimentConfig.from_mapping(mapping)


def cmd_run(args: argparse.Namespace) -> int:
    cfg = experiment_config(args)
    results = run_experiment(cfg, resume=args.resume)

    print(
        "%d of %d runs written to %s"
        % (len(results), cfg.total_runs, cfg.output_path)
    )
    if results.failures:
        print(
            "%d runs failed; see the errors file next to %s"
            % (len(results.failures), cfg.output_path),
            file=sys.stderr,
        )
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1)")

    records = read_records(args.input)
    stats = aggregate(records, runs_per_cell=args.runs, alpha=args.alpha)
    sys.stdout.write(render_table(stats, args.alpha))

    if args.csv:
        export_csv(records, args.csv)
    if args.cells_csv:
        export_cells_csv(stats, args.cells_csv)
    return EXIT_OK


def cmd_list_functions(args: argparse.Namespace) -> int:
    sys.stdout.write(function_table())
    return EXIT_OK


def cmd_refine(args: argparse.Namespace) -> int:
    lio_cfg = LioConfig(
        p_max=args.p_max,
        bh_agents=args.bh_agents,
        bh_iterations=args.bh_iters,
        seed_p2=not args.no_seed_p2,
    )
    out = args.out
    if out is None:
        root, _ = os.path.splitext(args.input)
        out = root + ".refined.ndjson"
    if os.path.abspath(out) == os.path.abspath(args.input):
        raise ConfigError("refusing to overwrite the input result file")

    records = read_records(args.input)
    refined = refine_records(records, lio_cfg)
    write_records(refined, out)

    improved = sum(
        1 for old, new in zip(records, refined) if new.mu_star < old.mu_star
    )
    print(
        "%d runs refined with p_max=%g into %s; %d improved"
        % (len(refined), lio_cfg.p_max, out, improved)
    )
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        _configure_logging(args)
        return args.command(args)
    except ConfigError as e:
        print("qlio: error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except QlioError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print("qlio: %s" % e, file=sys.stderr)
        return EXIT_RUNTIME
