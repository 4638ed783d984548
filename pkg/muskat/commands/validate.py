import argparse
import logging

from muskat import outputs, suite
from muskat.commands.deps import ExitCode, RunOptions, add_common_flags

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("validate", help="run the invariant suite")
    add_common_flags(parser, with_config=False)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    """Write validation.csv; exit 1 listing every failed check"""
    options = RunOptions.from_args("validate", args)
    results = suite.run_suite(seed=options.effective_seed(), threads=options.threads)

    out_dir = options.prepare_out_dir()
    paths = [outputs.write_csv(outputs.checks_frame(results), out_dir / "validation.csv")]
    failed = [result for result in results if not result.passed]
    options.finish(
        paths,
        parameters={"checks": len(results), "failed": [r.name for r in failed]},
        failure=", ".join(r.name for r in failed) or None,
    )

    for result in results:
        logger.info(
            "%-24s %s value=%.3e threshold=%.3e %s",
            result.name,
            "PASS" if result.passed else "FAIL",
            result.value,
            result.threshold,
            result.detail,
        )
    if failed:
        for result in failed:
            logger.error("invariant failed: %s (%s)", result.name, result.detail)
        return ExitCode.INVARIANT_FAILURE
    return ExitCode.OK
