import argparse
import logging

from muskat import outputs
from muskat.commands.deps import ExitCode, RunOptions, add_common_flags, load_config
from muskat.commands.simulate import tracked_modes
from muskat.numerics import diagnostics, stepper

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "spectrum", help="small-amplitude multi-mode decay against kappa|k|"
    )
    add_common_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    """Fitted decay rate per mode; deviations are reported, not asserted"""
    options = RunOptions.from_args("spectrum", args)
    config = load_config(args.config)

    trajectory = stepper.run(config, seed=options.seed)
    modes = tracked_modes(config)
    amplitudes = diagnostics.mode_amplitudes(trajectory, modes)
    fits = diagnostics.fit_decay_rates(trajectory, modes)
    for fit in fits:
        if fit.ratio is None:
            logger.info("mode %d: rate undefined", fit.mode)
        else:
            logger.info(
                "mode %d: fitted %.8g / predicted %.8g = %.6f",
                fit.mode,
                fit.fitted_rate,
                fit.predicted_rate,
                fit.ratio,
            )

    out_dir = options.prepare_out_dir()
    paths = [
        outputs.write_csv(outputs.trajectory_frame(trajectory), out_dir / "trajectory.csv"),
        outputs.write_csv(outputs.diagnostics_frame(trajectory), out_dir / "diagnostics.csv"),
        outputs.write_csv(
            outputs.modes_frame(trajectory, modes, amplitudes), out_dir / "modes.csv"
        ),
        outputs.write_csv(outputs.rates_frame(fits), out_dir / "rates.csv"),
    ]
    options.finish(
        paths,
        config=config,
        parameters={"modes": modes, "dt": trajectory.dt, "steps": config.step_count()},
        failure=trajectory.failure,
    )
    return ExitCode.NUMERICAL_FAILURE if trajectory.failed else ExitCode.OK
