"""
memsvd Main Entry Point
Benchmark harness: bench throughput|drift|equivalence|flops
"""

import argparse
import sys
from typing import List, Optional

from loguru import logger
from pydantic import ValidationError

from memsvd.benchmark import run_drift, run_equivalence, run_flops, run_throughput, write_csv
from memsvd.config import config
from memsvd.core.errors import ConfigurationError, MemSVDError
from memsvd.core.schema import BenchMode, BenchSpec
from memsvd.evaluation.metrics import Metrics

EXIT_OK = 0
EXIT_EQUIVALENCE_FAILED = 1
EXIT_UNSTABLE = 2
EXIT_INVALID_CONFIG = 3

# CLI option -> BenchSpec field
SPEC_FIELDS = {
    "window": "window_lengths",
    "nc": "n_c",
    "dim": "d",
    "du": "d_u",
    "actors": "actors_per_clip",
    "lambda_list": "lambda_list",
    "seed": "seed",
    "out": "output_path",
    "repeats": "repeats",
    "warmup": "warmup_iters",
    "inner_loops": "inner_loops",
    "planted_rank": "planted_rank",
    "noise": "noise_sigma",
    "drift_rate": "drift_rate",
    "clips": "clip_count",
    "checkpoint_every": "checkpoint_every",
    "recent_window": "recent_window",
    "perturb": "perturb",
    "exclude_center": "exclude_center",
    "center_features": "center_features",
    "cache_kv": "cache_kv",
    "scale_du": "scale_du",
}


def build_spec(args: argparse.Namespace) -> BenchSpec:
    """BenchSpec from parsed arguments; unset options keep their defaults"""
    values = {
        field: getattr(args, option)
        for option, field in SPEC_FIELDS.items()
        if getattr(args, option, None) is not None
    }
    return BenchSpec(mode=BenchMode(args.mode), **values)


def run_bench(spec: BenchSpec) -> int:
    """
    Run one benchmark mode and write its CSV.

    Returns:
        Process exit code: 0 ok, 1 failed equivalence check, 2 unstable timing.
        main() returns 3 for an invalid configuration.
    """
    logger.info(f"Running bench {spec.mode.value} (seed={spec.seed})")
    notes: List[str] = []
    code = EXIT_OK

    if spec.mode == BenchMode.THROUGHPUT:
        rows, stable = run_throughput(spec)
        notes.append(f"stable: {str(stable).lower()}")
        if not stable:
            logger.warning("Timing medians moved by more than 25% between passes")
            code = EXIT_UNSTABLE
    elif spec.mode == BenchMode.DRIFT:
        rows = run_drift(spec)
    elif spec.mode == BenchMode.EQUIVALENCE:
        rows, passed = run_equivalence(spec)
        if not passed:
            code = EXIT_EQUIVALENCE_FAILED
    else:
        rows = run_flops(spec)

    write_csv(rows, spec, notes)
    logger.info("\n" + Metrics.summary_report(rows, title=f"bench {spec.mode.value}"))
    return code


def _flag_default(name: str) -> Optional[bool]:
    return True if config.is_flag_enabled(name) else None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="memsvd: SVD low-rank memory banks versus memory cross-attention"
    )
    parser.add_argument(
        "--print-config",
        action="store_true",
        help="Print configuration and exit",
    )
    parser.add_argument(
        "--log-level",
        default=config.LOG_LEVEL,
        help="Log level (default: MEMSVD_LOG_LEVEL)",
    )
    commands = parser.add_subparsers(dest="command")

    bench = commands.add_parser("bench", help="Run a benchmark and emit CSV")
    bench.add_argument("mode", choices=[m.value for m in BenchMode])
    bench.add_argument("--window", type=int, nargs="+", help="Window lengths in seconds")
    bench.add_argument("--nc", type=int, default=config.N_COMPONENTS, help="Components n_c")
    bench.add_argument("--dim", type=int, default=config.DIM, help="Feature dimension d")
    bench.add_argument("--du", type=int, default=config.D_U, help="Attention width d_u")
    bench.add_argument(
        "--actors", type=int, default=config.ACTORS_PER_CLIP, help="Actors per clip"
    )
    bench.add_argument(
        "--lambda",
        dest="lambda_list",
        type=float,
        nargs="+",
        help="Forgetting factors for the drift sweep",
    )
    bench.add_argument("--seed", type=int, default=config.SEED, help="Random seed")
    bench.add_argument("--out", default=None, help="Output CSV path (default: stdout)")
    bench.add_argument("--repeats", type=int, help="Timed repeats per method and window")
    bench.add_argument("--warmup", type=int, help="Warmup iterations")
    bench.add_argument("--inner-loops", type=int, help="Calls per timed repeat")
    bench.add_argument("--planted-rank", type=int, help="Drift stream planted rank")
    bench.add_argument("--noise", type=float, help="Drift stream noise sigma")
    bench.add_argument("--drift-rate", type=float, help="Radians of rotation per clip")
    bench.add_argument("--clips", type=int, help="Drift stream length")
    bench.add_argument("--checkpoint-every", type=int, help="Drift checkpoint interval")
    bench.add_argument("--recent-window", type=int, help="Clips in the drift oracle")
    bench.add_argument(
        "--perturb", type=float, help="Perturb U_mem by this much (negative control)"
    )
    for name, help_text in (
        ("exclude_center", "Drop the query clip's own actors from the memory"),
        ("center_features", "Mean-centre memory rows before the offline SVD"),
        ("cache_kv", "Precompute attention keys/values outside the timed query"),
        ("scale_du", "Scale attention scores by sqrt(d_u) instead of sqrt(d)"),
    ):
        bench.add_argument(
            "--" + name.replace("_", "-"),
            action="store_true",
            default=_flag_default(name),
            help=help_text,
        )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logger.remove()
    logger.add(sys.stderr, level=args.log_level.upper())

    if args.print_config:
        config.print_config()
        return EXIT_OK
    if args.command != "bench":
        parser.print_help()
        return EXIT_OK

    try:
        spec = build_spec(args)
    except (ConfigurationError, ValidationError) as e:
        logger.error(f"invalid bench {args.mode} configuration: {e}")
        return EXIT_INVALID_CONFIG

    try:
        return run_bench(spec)
    except ConfigurationError as e:
        logger.error(f"invalid bench {args.mode} configuration: {e}")
        return EXIT_INVALID_CONFIG
    except MemSVDError as e:
        logger.error(f"bench {args.mode} failed: {e}")
        raise


if __name__ == "__main__":
    sys.exit(main())
