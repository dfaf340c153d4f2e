"""
Command line front end.

    python cli.py decompose --input a.lay [--out a.colored] [--stats a.csv] [--svg a.svg]
    python cli.py bench --sizes 100,1000 --trials 3 [--out bench.csv]
    python cli.py verify --input a.lay --colored a.colored

Exit codes: 0 success, 1 verification violations, 2 usage/parse errors.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from app.automation.benchmark import run_benchmark, write_benchmark
from app.mpld.decomposer import ENGINES, decompose_layout, verify_colored
from app.mpld.errors import (
    ConfigError,
    LayoutParseError,
    LayoutValidationError,
    MPLDError,
    ParameterError,
    VerificationError,
)
from app.mpld.layout_io import LayoutOptions, ResultSinks, format_stats, load_layout, read_colored, write_results
from settings import Settings, configure_logging, get_settings, to_fraction

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _mask_count(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"expected at least 2 masks, got {text}")
    return value


def _size_list(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _alpha(text: str):
    try:
        value = to_fraction(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    if value < 0:
        raise argparse.ArgumentTypeError("alpha must be non-negative")
    return value


def _add_layout_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=_mask_count, help="number of masks")
    parser.add_argument("--spacing", type=_positive_int, dest="spacing_nm", help="minimum coloring spacing (nm)")
    parser.add_argument("--alpha", type=_alpha, help="stitch weight, e.g. 0.1 or 1/10")
    parser.add_argument("--stitch-cap", type=_positive_int, help="maximum segments per feature")


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="mpld", description="Multiple patterning layout decomposition")
    parser.add_argument("--log", help="log level (overrides MPLD_LOG)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    dec = sub.add_parser("decompose", help="decompose one or more layouts")
    dec.add_argument("--input", nargs="+", required=True, type=Path)
    _add_layout_flags(dec)
    dec.add_argument("--engine", choices=ENGINES, default=settings.engine)
    dec.add_argument("--workers", type=_positive_int, default=settings.workers)
    dec.add_argument("--items-per-group", type=_positive_int, default=settings.items_per_group)
    dec.add_argument("--node-budget", type=_positive_int, default=settings.node_budget)
    dec.add_argument("--out", type=Path, help="colored output file (a directory for several inputs)")
    dec.add_argument("--stats", type=Path, help="stats CSV (default: stdout)")
    dec.add_argument("--svg", type=Path, help="SVG rendering (a directory for several inputs)")
    dec.add_argument("--no-timing", action="store_true", help="write time_s as 0 for reproducible output")

    bench = sub.add_parser("bench", help="run the synthetic benchmark suite")
    bench.add_argument("--sizes", type=_size_list, default=[100, 1000])
    bench.add_argument("--trials", type=_positive_int, default=1)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--workers", type=_positive_int, default=4)
    bench.add_argument("--engines", default=",".join(ENGINES))
    bench.add_argument("--items-per-group", type=_positive_int, default=settings.items_per_group)
    bench.add_argument("--node-budget", type=_positive_int, default=settings.node_budget)
    bench.add_argument("--out", type=Path, help="CSV output (default: stdout)")
    bench.add_argument("--out-dir", type=Path, help="also write corpus layouts and colored outputs here")
    bench.add_argument("--no-timing", action="store_true")
    _add_layout_flags(bench)

    ver = sub.add_parser("verify", help="re-check a colored layout against its layout file")
    ver.add_argument("--input", required=True, type=Path)
    ver.add_argument("--colored", required=True, type=Path)
    _add_layout_flags(ver)
    return parser


def _given(value, default):
    return default if value is None else value


def _layout_options(args, settings: Settings) -> LayoutOptions:
    return LayoutOptions(
        k=args.k,
        spacing_nm=args.spacing_nm,
        alpha=args.alpha,
        default_k=settings.k,
        default_spacing_nm=settings.spacing_nm,
        default_alpha=settings.alpha,
    )


def _target(path: Optional[Path], source: Path, suffix: str, many: bool) -> Optional[Path]:
    if path is None:
        return None
    if many:
        path.mkdir(parents=True, exist_ok=True)
        return path / (source.stem + suffix)
    return path


def cmd_decompose(args, settings: Settings, stdout) -> int:
    options = _layout_options(args, settings)
    stitch_cap = _given(args.stitch_cap, settings.stitch_cap)
    many = len(args.input) > 1
    all_stats = []
    for source in args.input:
        layout = load_layout(source, options)
        result = decompose_layout(
            layout,
            args.engine,
            args.workers,
            name=source.stem,
            items_per_group=args.items_per_group,
            stitch_cap=stitch_cap,
            node_budget=args.node_budget,
            record_time=not args.no_timing,
        )
        colored = _target(args.out, source, ".colored", many) or source.with_suffix(".colored")
        write_results(
            layout,
            result.solution,
            result.stats,
            ResultSinks(colored=colored, svg=_target(args.svg, source, ".svg", many)),
            graph=result.graph,
        )
        all_stats.append(result.stats)

    text = format_stats(all_stats)
    if args.stats is None:
        stdout.write(text)
    else:
        args.stats.write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_bench(args, settings: Settings, stdout) -> int:
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    unknown = [e for e in engines if e not in ENGINES]
    if unknown:
        raise ParameterError(f"unknown engine(s): {', '.join(unknown)}")
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
    frame = run_benchmark(
        args.sizes,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        engines=engines,
        record_time=not args.no_timing,
        items_per_group=args.items_per_group,
        stitch_cap=_given(args.stitch_cap, settings.stitch_cap),
        node_budget=args.node_budget,
        out_dir=args.out_dir,
        spacing_nm=_given(args.spacing_nm, settings.spacing_nm),
        k=_given(args.k, settings.k),
        alpha=_given(args.alpha, settings.alpha),
    )
    write_benchmark(frame, args.seed, args.out if args.out is not None else stdout)
    return EXIT_OK


def cmd_verify(args, settings: Settings, stdout) -> int:
    layout = load_layout(args.input, _layout_options(args, settings))
    with open(args.colored, "rb") as f:
        colored = read_colored(f)
    report, solution = verify_colored(layout, colored, _given(args.stitch_cap, settings.stitch_cap))
    for violation in report.violations:
        stdout.write(violation + "\n")
    if report.ok:
        stdout.write(f"ok: {len(solution.conflicts)} conflict(s), {len(solution.stitches)} stitch(es), cost {solution.cost}\n")
        return EXIT_OK
    logger.error(f"{args.colored}: {len(report.violations)} violation(s)")
    return EXIT_VIOLATIONS


COMMANDS = {"decompose": cmd_decompose, "bench": cmd_bench, "verify": cmd_verify}


def run_cli(argv: Sequence[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        settings = get_settings()
        args = build_parser(settings).parse_args(list(argv))
        configure_logging(args.log or settings.log_level)
        return COMMANDS[args.command](args, settings, stdout)
    except VerificationError as e:
        stderr.write(f"error: verification failed: {e}\n")
        return EXIT_VIOLATIONS
    except (ParameterError, ConfigError, LayoutParseError, LayoutValidationError) as e:
        stderr.write(f"error: {e}\n")
        return EXIT_USAGE
    except MPLDError as e:
        logger.error(f"Decomposition failed: {e}")
        stderr.write(f"error: {e}\n")
        return EXIT_VIOLATIONS
    except OSError as e:
        logger.error(f"I/O error: {e}")
        stderr.write(f"error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(run_cli(sys.argv[1:]))
