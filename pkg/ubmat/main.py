"""
ubmat command-line entry point.

Coordinate algebra, estimation and information tests for uniform-block
covariance matrices. Each subcommand group lives in ``ubmat.commands`` and
registers itself on the shared parser.

Exit codes:
- 0 completed
- 2 H0 rejected (only with --exit-on-reject)
- 3 usage or input format error
- 4 structure violation
- 5 domain or numerical error
- 6 unexpected internal error
"""

import argparse
import logging
import sys
from typing import List, Optional

from ubmat.commands import COMMANDS
from ubmat.core.config import get_settings
from ubmat.core.errors import UBMatError

logger = logging.getLogger("ubmat")

EXIT_USAGE = 3
EXIT_INTERNAL = 6


class UBMatArgumentParser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with the input-format code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def configure_logging(level: Optional[str] = None) -> None:
    """Send ubmat logs to stderr; stdout stays reserved for results."""
    level = (level or get_settings().log_level).upper()
    root = logging.getLogger("ubmat")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = UBMatArgumentParser(
        prog="ubmat",
        description="Uniform-block covariance algebra and information tests"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--log-level", default=None, help=f"log level (default {settings.log_level})")

    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=UBMatArgumentParser)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else args.log_level)

    try:
        return args.handler(args)
    except UBMatError as e:
        print(f"ubmat: {e}", file=sys.stderr)
        return e.exit_code
    except Exception:
        logger.exception("unexpected internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
