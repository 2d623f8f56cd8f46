#!/usr/bin/env python3
"""
Isotone Electric System Solver
Command-line entry point: analyze, trace, basin and enumerate problem files
"""

# ============================================================
# STANDARD IMPORTS
# ============================================================

import argparse
import sys
from contextlib import ExitStack
from typing import List, Optional

# ============================================================
# INFRASTRUCTURE
# ============================================================

from infrastructure.config_manager import get_config
from infrastructure.error_handling import init_error_handler
from infrastructure.logger import get_logger, init_logger
from infrastructure.validation import ValidationError

# ============================================================
# APPLICATION IMPORT
# ============================================================

from cli.commands import cmd_analyze, cmd_basin, cmd_enumerate, cmd_trace


# ============================================================
# ARGUMENT PARSING
# ============================================================

def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isotone-solver",
        description="Steady states of isotone electric systems y = k - M(1/y)",
    )
    parser.add_argument(
        "--log-level",
        type=str.upper,
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="problem file (JSON)")
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--output", default="-", help="output path, '-' for stdout")

    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", parents=[common], help="bounds, existence and certificate")
    analyze.add_argument("--budget", type=int, default=None)
    analyze.add_argument("--enumerate", action="store_true", help="attach all fixed points (n <= 3)")

    trace = sub.add_parser("trace", parents=[common], help="CSV trace of the fixed-point iteration")
    trace.add_argument("--budget", type=int, default=None)
    trace.add_argument("--start", type=_float_list, default=None, metavar="v1,...,vn")

    basin = sub.add_parser("basin", parents=[common], help="CSV basin grid (n = 2)")
    basin.add_argument("--budget", type=int, default=None)
    basin.add_argument("--grid", type=int, default=None)
    basin.add_argument("--box", type=_float_list, default=None, metavar="x0,y0,x1,y1")

    enumerate_cmd = sub.add_parser("enumerate", parents=[common], help="all fixed points (n <= 3)")
    enumerate_cmd.add_argument("--grid", type=int, default=None)

    return parser


# ============================================================
# DISPATCH
# ============================================================

def run_command(args: argparse.Namespace, out) -> None:
    if args.command == "analyze":
        cmd_analyze(args.file, tol=args.tol, budget=args.budget, enumerate_points=args.enumerate, out=out)
    elif args.command == "trace":
        cmd_trace(args.file, start=args.start, tol=args.tol, budget=args.budget, out=out)
    elif args.command == "basin":
        cmd_basin(args.file, box=args.box, grid=args.grid, tol=args.tol, budget=args.budget, out=out)
    elif args.command == "enumerate":
        cmd_enumerate(args.file, grid=args.grid, tol=args.tol, out=out)


def _execute(args: argparse.Namespace) -> None:
    with ExitStack() as stack:
        if args.output == "-":
            out = sys.stdout
        else:
            try:
                out = stack.enter_context(open(args.output, "w", encoding="utf-8", newline=""))
            except OSError as e:
                raise ValidationError("output", f"cannot open {args.output}: {e.strerror}") from e
        run_command(args, out)


# ============================================================
# MAIN ENTRY POINT
# ============================================================

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    config = get_config()
    init_logger(
        args.log_level or config.logging.log_level,
        config.logging.log_dir if config.logging.enable_file_output else None,
        config.logging.enable_console_output,
    )
    logger = get_logger("main")
    logger.set_context(command=args.command)
    logger.debug("Command started", config=config.to_dict())

    code = init_error_handler().protected_call(_execute, args=args)
    logger.debug("Command finished", exit_code=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
