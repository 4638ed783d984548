import argparse
import logging
from typing import List

from muskat import outputs
from muskat.commands.deps import ExitCode, RunOptions, add_common_flags, load_config
from muskat.core.errors import ConfigError
from muskat.numerics import stepper

logger = logging.getLogger(__name__)


def parse_eps(text: str) -> List[float]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    try:
        return [float(item) for item in items]
    except ValueError as exc:
        raise ConfigError("eps must be a comma-separated list of numbers", eps=text) from exc


def register(subparsers) -> None:
    parser = subparsers.add_parser("converge", help="vanishing-viscosity Cauchy report")
    add_common_flags(parser)
    parser.add_argument(
        "--eps", required=True, help="strictly decreasing viscosities, e.g. 0.1,0.05,0.025"
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    options = RunOptions.from_args("converge", args)
    config = load_config(args.config)
    eps = parse_eps(args.eps)

    trajectories, report = stepper.vanishing_viscosity(
        config, eps, seed=options.seed, threads=options.threads
    )
    for row in report.rows:
        logger.info(
            "d_%d (eps %g -> %g) = %.6e", row.index, row.eps_coarse, row.eps_fine, row.distance
        )

    out_dir = options.prepare_out_dir()
    paths = [outputs.write_csv(outputs.cauchy_frame(report), out_dir / "cauchy.csv")]
    failures = [t.failure for t in trajectories if t.failed]
    options.finish(
        paths,
        config=config,
        parameters={
            "eps_list": report.eps_list,
            "mollifier_widths": report.mollifier_widths,
            "complete": report.complete,
        },
        failure="; ".join(failures) or None,
    )
    return ExitCode.OK if report.complete else ExitCode.NUMERICAL_FAILURE
