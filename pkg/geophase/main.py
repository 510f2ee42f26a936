"""
Command-line entry point.

Parses arguments into a RunConfig, configures logging and dispatches to
the command modules. Exit codes: 0 success, 1 input/validation error,
2 numerical failure.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from .commands import cmd_robustness, cmd_scan, cmd_tomo, cmd_witness
from .config import settings
from .dependencies import InputError
from .models.base import GeophaseError
from .models.state import StateError
from .models.tomography import TomographyError
from .schemas.run_config import RunConfig
from .services.export import ExportError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

# Configure logging
logging.basicConfig(
    level=logging.INFO if settings.debug else getattr(logging, settings.log_level.upper(), logging.WARNING),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "robustness": cmd_robustness,
    "scan": cmd_scan,
    "witness": cmd_witness,
    "tomo": cmd_tomo,
}

INPUT_ERRORS = (InputError, StateError, TomographyError, ExportError, ValidationError, OSError)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("input")
    source.add_argument("--state", help="state or ket JSON file")
    source.add_argument("--family", help="built-in family: ghz-w, werner, constant-mixed")
    source.add_argument("--family-file", help="family JSON file of (q, state) samples")

    model = common.add_argument_group("model")
    model.add_argument("--quantifier", choices=["rr", "gr"], default="rr")
    model.add_argument("--k", type=int, help="number of separable blocks (n or 2)")
    model.add_argument(
        "--model",
        choices=["exact2q", "ppt-intersect", "ppt-mixture"],
        help="relaxation (overrides --k)",
    )

    run = common.add_argument_group("run")
    run.add_argument("--grid", type=int, default=settings.default_grid)
    run.add_argument("--shots", type=int, default=0, help="shots per setting, 0 = exact")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help="output path")
    run.add_argument("--svg", help="SVG plot path")
    run.add_argument("--kink-threshold", type=float)
    run.add_argument("--jump-threshold", type=float)
    run.add_argument("--separable-tol", type=float)
    run.add_argument("--refine", action="store_true", help="refine kinks by re-solving")
    run.add_argument("--mode", choices=["sdp", "analytic"], default="sdp")
    run.add_argument("--restarts", type=int, help="seesaw restarts")
    run.add_argument("--workers", type=int, help="concurrent solves")

    parser = argparse.ArgumentParser(
        prog="geophase",
        description="Entanglement robustness, witnesses and geometric phase transitions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("robustness", parents=[common], help="robustness of one state")
    sub.add_parser("scan", parents=[common], help="robustness curve of a family")
    sub.add_parser("witness", parents=[common], help="optimal witness of one state")
    sub.add_parser("tomo", parents=[common], help="simulated tomography experiment")
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse and validate command-line arguments."""
    args = build_parser().parse_args(argv)
    values = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and map failures to exit codes."""
    try:
        config = parse_config(argv)
    except ValidationError as e:
        print(f"error: invalid arguments\n{e}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK

    try:
        return COMMANDS[config.command](config)
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except GeophaseError as e:
        logger.error(f"{config.command} failed: {e}")
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
