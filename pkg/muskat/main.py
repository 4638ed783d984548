"""Command-line entry point: muskat {simulate,validate,converge,spectrum}."""

import argparse
import logging
import sys
from typing import List, Optional

from muskat import __version__
from muskat.commands import converge, simulate, spectrum, validate
from muskat.commands.deps import ExitCode
from muskat.config import settings
from muskat.core.errors import MuskatError
from muskat.core.log import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="muskat",
        description="Boundary-integral contour dynamics for the one-phase Muskat problem",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (simulate, validate, converge, spectrum):
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings.LOG_LEVEL)
    try:
        return int(args.handler(args))
    except MuskatError as exc:
        logger.error("%s: %s", args.command, exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s: %s", args.command, exc)
        return ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(main())
