import argparse
import logging
from typing import List

from muskat import outputs
from muskat.commands.deps import ExitCode, RunOptions, add_common_flags, load_config
from muskat.numerics import diagnostics, stepper
from muskat.schemas.simulation import InitialProfile, SimConfig

logger = logging.getLogger(__name__)

SPECTRUM_MODES = 5


def tracked_modes(config: SimConfig) -> List[int]:
    """Fourier modes whose amplitudes are written to modes.csv"""
    if config.profile == InitialProfile.COSINE:
        return [config.mode]
    if config.profile == InitialProfile.MODES:
        return sorted(set(config.modes))
    return list(range(1, min(SPECTRUM_MODES, config.n_points // 2) + 1))


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="integrate one trajectory")
    add_common_flags(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    """Run one trajectory and write trajectory, diagnostics, monitors, modes, rates"""
    options = RunOptions.from_args("simulate", args)
    config = load_config(args.config)

    trajectory = stepper.run(config, seed=options.seed)
    modes = tracked_modes(config)
    fits = diagnostics.fit_decay_rates(trajectory, modes)
    for fit in fits:
        logger.info(
            "mode %d: fitted rate %s, predicted %.6g",
            fit.mode,
            "undefined" if fit.fitted_rate is None else f"{fit.fitted_rate:.6g}",
            fit.predicted_rate,
        )

    out_dir = options.prepare_out_dir()
    paths = [
        outputs.write_csv(outputs.trajectory_frame(trajectory), out_dir / "trajectory.csv"),
        outputs.write_csv(outputs.diagnostics_frame(trajectory), out_dir / "diagnostics.csv"),
        outputs.write_csv(outputs.monitors_frame(trajectory), out_dir / "monitors.csv"),
        outputs.write_csv(
            outputs.modes_frame(
                trajectory, modes, diagnostics.mode_amplitudes(trajectory, modes)
            ),
            out_dir / "modes.csv",
        ),
        outputs.write_csv(outputs.rates_frame(fits), out_dir / "rates.csv"),
    ]
    options.finish(
        paths,
        config=config,
        parameters={
            "n_points": trajectory.grid.n_points,
            "dt": trajectory.dt,
            "steps": config.step_count(),
            "scheme": config.scheme.value,
            "mollifier_width": trajectory.mollifier_width,
        },
        failure=trajectory.failure,
    )
    if trajectory.failed:
        logger.error("simulation failed: %s", trajectory.failure)
        return ExitCode.NUMERICAL_FAILURE
    return ExitCode.OK
