"""Invariant suite behind `muskat validate`.

Each check returns a CheckResult with the measured value and the threshold
it was held to. Calibration constants for the operator-bound checks come
from the a = 0.5 member of the steepness family and are frozen for the run.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from muskat.config import invariant_tolerance, settings
from muskat.models.grid import GridFunction, PeriodicGrid
from muskat.models.operator import OperatorTag
from muskat.models.state import Trajectory
from muskat.numerics import bie, diagnostics, dno, oracles, spectral, stepper
from muskat.schemas.diagnostics import CheckResult
from muskat.schemas.simulation import InitialProfile, SimConfig, TimeScheme

logger = logging.getLogger(__name__)

STEEPNESS_FAMILY = (0.5, 1.0, 2.0, 4.0)
INVERSE_EXPONENT = 2.5
TRAJECTORY_EXPONENT = 3.5


@dataclass(frozen=True)
class Calibration:
    """Frozen constants: sigma_min (1 + Lip)^{5/2} >= sigma_floor and
    ||theta|| <= theta_constant (1 + Lip)^{5/2} ||rhs||"""

    sigma_floor: float
    theta_constant: float


def _cosine(grid: PeriodicGrid, amplitude: float, mode: int = 1) -> GridFunction:
    return GridFunction.from_function(grid, lambda x: amplitude * np.cos(mode * x))


def _result(
    name: str, value: float, threshold: float, passed: bool, detail: str = ""
) -> CheckResult:
    if not math.isfinite(value):
        passed = False
    return CheckResult(
        name=name,
        passed=bool(passed),
        value=float(value),
        threshold=float(threshold),
        detail=detail,
    )


def check_flat_dno(n_points: int = 256, tol: float = 1e-8) -> CheckResult:
    """G(0) against |D| on cos(kx), k = 1..5"""
    grid = PeriodicGrid(n_points)
    flat = GridFunction.constant(grid, 0.0)
    worst = 0.0
    for k in range(1, 6):
        g = _cosine(grid, 1.0, k)
        gf = dno.apply_dno(flat, g).gf
        worst = max(worst, float(np.abs(gf.values - spectral.abs_derivative(g).values).max()))
    return _result("flat_dno", worst, tol, worst <= tol)


def check_linear_decay(tol: float = 0.01) -> CheckResult:
    config = SimConfig(
        n_points=64,
        kappa=1.0,
        epsilon=0.0,
        dt=1e-3,
        t_final=0.5,
        profile=InitialProfile.COSINE,
        amplitude=1e-3,
        mode=2,
        output_every=10,
    )
    trajectory = stepper.run(config)
    (fit,) = diagnostics.fit_decay_rates(trajectory, [2])
    deviation = math.inf if fit.ratio is None else abs(fit.ratio - 1.0)
    return _result(
        "linear_decay",
        deviation,
        tol,
        deviation <= tol and not trajectory.failed,
        detail=f"fitted rate {fit.fitted_rate}",
    )


def check_stationarity(steps: int = 1000, tol: float = 1e-12) -> CheckResult:
    level = 0.7
    config = SimConfig(
        n_points=32,
        dt=1e-3,
        t_final=steps * 1e-3,
        profile=InitialProfile.FLAT,
        offset=level,
        epsilon=0.01,
        output_every=100,
    )
    trajectory = stepper.run(config)
    drift = float(np.abs(trajectory.as_array() - level).max())
    return _result("stationarity", drift, tol, drift <= tol and not trajectory.failed)


def maximum_principle_configs(
    n_points: int = 256, t_final: float = 1.0
) -> Dict[str, SimConfig]:
    common = dict(
        n_points=n_points, kappa=1.0, epsilon=0.01, t_final=t_final, output_every=4
    )
    return {
        "cosine": SimConfig(profile=InitialProfile.COSINE, amplitude=0.5, **common),
        "modes": SimConfig(
            profile=InitialProfile.MODES, amplitude=0.2, modes=[1, 2, 3], **common
        ),
        "kink": SimConfig(
            profile=InitialProfile.KINK, amplitude=0.3, mollifier_width=0.05, **common
        ),
        "sawtooth": SimConfig(
            profile=InitialProfile.SAWTOOTH, amplitude=0.8, mollifier_width=0.05, **common
        ),
        "random": SimConfig(profile=InitialProfile.RANDOM, amplitude=0.3, **common),
    }


def run_all(configs: Dict[str, SimConfig], seed: int, threads: int) -> Dict[str, Trajectory]:
    names = list(configs)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        runs = pool.map(lambda name: stepper.run(configs[name], seed=seed), names)
        return dict(zip(names, runs))


def check_maximum_principles(trajectories: Dict[str, Trajectory]) -> CheckResult:
    worst, worst_name, failures = 0.0, "", []
    threshold = 0.0
    for name, trajectory in trajectories.items():
        report = diagnostics.trajectory_report(trajectory)
        threshold = report.tol
        increase = max(report.sup_increase, report.lip_increase, report.l2_increase)
        if increase > worst:
            worst, worst_name = increase, name
        if not (report.modulus_preserved and not report.failed_run and increase <= report.tol):
            failures.append(name)
    detail = f"worst profile {worst_name}" if worst_name else ""
    if failures:
        detail += f"; failed {', '.join(failures)}"
    return _result("maximum_principles", worst, threshold, not failures, detail)


def check_dn_positivity(trajectories: Dict[str, Trajectory], tol: float = 1e-8) -> CheckResult:
    ratios = [
        r.dn_pairing / r.l2_norm**2
        for t in trajectories.values()
        for r in t.records
        if r.l2_norm > 0.0
    ]
    worst = min(ratios) if ratios else 0.0
    return _result("dn_positivity", worst, -tol, worst >= -tol)


def comparison_pairs(grid: PeriodicGrid) -> List[Tuple[GridFunction, GridFunction]]:
    f1 = GridFunction.from_function(grid, lambda x: 0.3 * np.sin(x))
    f2 = GridFunction.from_function(grid, lambda x: 0.3 * np.sin(x) + 0.1 + 0.05 * np.cos(x))
    g1 = _cosine(grid, 0.5)
    g2 = g1 + 0.3
    h1 = _cosine(grid, 0.4, 2)
    h2 = GridFunction.from_function(grid, lambda x: 0.2 * np.cos(x) + 0.7)
    return [(f1, f2), (g1, g2), (h1, h2)]


def check_comparison(n_points: int = 128, t_final: float = 0.5) -> CheckResult:
    config = SimConfig(
        n_points=n_points, kappa=1.0, epsilon=0.01, t_final=t_final, output_every=2
    )
    grid = PeriodicGrid(n_points)
    worst, failures = 0.0, []
    tol = invariant_tolerance(grid.spacing)
    for index, (lower, upper) in enumerate(comparison_pairs(grid)):
        report = diagnostics.comparison_report(
            stepper.run(config, initial=lower), stepper.run(config, initial=upper), tol
        )
        defect = max(
            float(np.abs(report.ordering_defects).max()),
            float(report.contraction_defects.max()),
            report.contraction_monotone_defect,
        )
        worst = max(worst, defect)
        if not (report.ordered and report.passed):
            failures.append(str(index))
    detail = f"failed pairs {', '.join(failures)}" if failures else ""
    return _result("comparison", worst, tol, not failures, detail)


def check_disk_oracle(n_points: int = 512, tol: float = 1e-6) -> CheckResult:
    grid = PeriodicGrid(n_points)
    points = (0.0, grid.nodes[37], 0.4321, -2.5)
    worst = 0.0
    for m in range(1, 5):
        g = _cosine(grid, 1.0, m)
        for x in points:
            worst = max(worst, abs(oracles.disk_dno(g, float(x)) - m * math.cos(m * x)))
    return _result("disk_oracle", worst, tol, worst <= tol)


def poisson_limit_errors(n_points: int = 512, x: float = 0.4) -> List[float]:
    grid = PeriodicGrid(n_points)
    g = GridFunction.from_function(grid, lambda t: np.cos(t) + 0.2 * np.cos(3 * t))
    target = oracles.disk_dno(g, x)
    return [
        abs(oracles.poisson_radial_derivative(g, 1.0 - 2.0**-j, x) - target)
        for j in range(4, 11)
    ]


def check_poisson_limit(min_order: float = 0.5) -> CheckResult:
    errors = np.array(poisson_limit_errors())
    orders = np.log2(errors[:-1] / errors[1:])
    observed = float(orders.min())
    return _result(
        "poisson_limit",
        observed,
        min_order,
        observed >= min_order,
        detail=f"last error {errors[-1]:.3e}",
    )


def check_flat_density(n_points: int = 64, tol: float = 1e-11) -> CheckResult:
    grid = PeriodicGrid(n_points)
    rhs = GridFunction.from_function(grid, np.cos)
    theta = bie.solve_theta(GridFunction.constant(grid, 0.0), rhs).theta
    error = float(np.abs(theta.values - 2.0 * rhs.values).max())
    return _result("flat_density", error, tol, error <= tol)


def check_adjointness(n_points: int = 256, tol: float = 1e-13) -> CheckResult:
    f = _cosine(PeriodicGrid(n_points), 0.5)
    k = bie.assemble(f, OperatorTag.K).entries
    kstar = bie.assemble(f, OperatorTag.KSTAR).entries
    defect = float(np.abs(k - kstar.T).max())
    return _result("adjointness", defect, tol, defect <= tol)


def jump_defects(sizes: Sequence[int] = (128, 256, 512)) -> List[float]:
    return [max(bie.jump_relation_defect(_cosine(PeriodicGrid(n), 0.5))) for n in sizes]


def check_jump_relation(tol: float = 1e-4, floor: float = 1e-12) -> CheckResult:
    """Row sums of K and column sums of K* vanish; refinement gains >= 4x"""
    defects = jump_defects()
    at_256 = defects[1]
    refined = all(
        fine <= floor or fine <= coarse / 4.0 for coarse, fine in zip(defects, defects[1:])
    )
    return _result(
        "jump_relation",
        at_256,
        tol,
        at_256 <= tol and refined,
        detail="defects " + ", ".join(f"{d:.2e}" for d in defects),
    )


def steepness_family(n_points: int = 128) -> List[Tuple[float, float, float, float]]:
    """(a, Lip, sigma_min, ||theta|| / ||rhs||) over the steepness family"""
    grid = PeriodicGrid(n_points)
    rows = []
    for a in STEEPNESS_FAMILY:
        f = _cosine(grid, a)
        rhs = spectral.dft_derivative(f)
        theta = bie.solve_theta(f, rhs).theta
        ratio = diagnostics.l2_norm(theta) / diagnostics.l2_norm(rhs)
        rows.append((a, diagnostics.lip_seminorm(f), bie.sigma_min_monitor(f), ratio))
    return rows


def calibrate(family: Optional[List[Tuple[float, float, float, float]]] = None) -> Calibration:
    family = family or steepness_family()
    _, lip, sigma, ratio = family[0]
    weight = (1.0 + lip) ** INVERSE_EXPONENT
    margin = settings.CALIBRATION_MARGIN
    calibration = Calibration(
        sigma_floor=sigma * weight / margin, theta_constant=margin * ratio / weight
    )
    logger.info(
        "calibration: sigma floor %.4g, theta constant %.4g",
        calibration.sigma_floor,
        calibration.theta_constant,
    )
    return calibration


def check_invertibility(family, calibration: Calibration) -> CheckResult:
    scaled = [sigma * (1.0 + lip) ** INVERSE_EXPONENT for _, lip, sigma, _ in family]
    bounded = [
        ratio <= calibration.theta_constant * (1.0 + lip) ** INVERSE_EXPONENT
        for _, lip, _, ratio in family
    ]
    sigmas = [sigma for _, _, sigma, _ in family]
    trend = "decreasing" if all(b < a for a, b in zip(sigmas, sigmas[1:])) else "not monotone"
    worst = min(scaled)
    return _result(
        "invertibility",
        worst,
        calibration.sigma_floor,
        worst >= calibration.sigma_floor and all(bounded),
        detail=f"sigma_min {trend} in a: " + ", ".join(f"{s:.4g}" for s in sigmas),
    )


def check_theta_bound(
    trajectories: Dict[str, Trajectory], calibration: Calibration
) -> CheckResult:
    """kappa ||theta(t)|| <= C sqrt(2 pi) kappa (1 + Lip f0)^{7/2}"""
    worst = 0.0
    for trajectory in trajectories.values():
        if not trajectory.records:
            continue
        lip0 = trajectory.records[0].lip_seminorm
        bound = (
            calibration.theta_constant
            * math.sqrt(2.0 * math.pi)
            * trajectory.config.kappa
            * (1.0 + lip0) ** TRAJECTORY_EXPONENT
        )
        worst = max(worst, max(r.theta_l2 for r in trajectory.records) / bound)
    return _result("theta_bound", worst, 1.0, worst <= 1.0)


def check_convolutions(trials: int = 100, n_points: int = 64, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    grid = PeriodicGrid(n_points)
    spacing = grid.spacing
    worst = 0.0
    for _ in range(trials):
        f = GridFunction(grid, rng.standard_normal(n_points))
        delta = float(rng.uniform(0.05, 1.0))
        upper = diagnostics.sup_convolution(f, delta)
        lower = diagnostics.inf_convolution(f, delta)
        mirrored = -diagnostics.sup_convolution(-f, delta)
        v = upper.values
        second = np.roll(v, 1) + np.roll(v, -1) - 2.0 * v
        worst = max(
            worst,
            float(np.max(f.values - upper.values)),
            float(np.max(lower.values - f.values)),
            float(np.abs(lower.values - mirrored.values).max()),
            float(np.max(-spacing**2 / delta - second)),
        )
    return _result("convolutions", worst, 1e-12, worst <= 1e-12)


def check_vanishing_viscosity(
    n_points: int = 128,
    eps_list: Sequence[float] = (0.1, 0.05, 0.025, 0.0125),
    seed: int = 0,
    threads: int = 1,
) -> CheckResult:
    config = SimConfig(
        n_points=n_points,
        kappa=1.0,
        t_final=0.5,
        profile=InitialProfile.KINK,
        amplitude=0.3,
        output_every=5,
    )
    trajectories, report = stepper.vanishing_viscosity(config, eps_list, seed, threads)
    distances = report.distances
    decreasing = all(b < a for a, b in zip(distances, distances[1:]))
    sup0 = max(t.records[0].sup_norm for t in trajectories if t.records)
    bounded = all(
        max(r.sup_norm for r in t.records)
        <= t.records[0].sup_norm + invariant_tolerance(t.grid.spacing)
        for t in trajectories
        if t.records
    )
    return _result(
        "vanishing_viscosity",
        distances[-1] if distances else 0.0,
        distances[0] if distances else 0.0,
        report.complete and decreasing and bounded,
        detail="d_j " + ", ".join(f"{d:.3e}" for d in distances) + f"; sup f0 {sup0:.4g}",
    )


def _final(config: SimConfig, initial: Optional[GridFunction] = None) -> np.ndarray:
    trajectory = stepper.run(config, initial=initial)
    return trajectory.as_array()[-1]


def _analytic_profile(grid: PeriodicGrid) -> GridFunction:
    """0.2 / (1.5 - cos x): not band-limited, coefficients decay like 0.38^k"""
    return GridFunction.from_function(grid, lambda x: 0.2 / (1.5 - np.cos(x)))


def spatial_differences(sizes: Sequence[int] = (16, 32, 64)) -> List[float]:
    finals = [
        _final(
            SimConfig(
                n_points=n,
                dt=0.01,
                t_final=0.2,
                epsilon=0.01,
                mollifier_width=0.0,
                output_every=20,
            ),
            initial=_analytic_profile(PeriodicGrid(n)),
        )
        for n in sizes
    ]
    return [
        float(np.abs(coarse - fine[::2]).max()) for coarse, fine in zip(finals, finals[1:])
    ]


def temporal_order(scheme: TimeScheme, n_points: int = 32) -> float:
    finals = [
        _final(
            SimConfig(
                n_points=n_points,
                dt=dt,
                t_final=0.2,
                epsilon=0.01,
                mollifier_width=0.0,
                amplitude=0.5,
                scheme=scheme,
                output_every=1000,
            )
        )
        for dt in (0.02, 0.01, 0.005)
    ]
    first = float(np.abs(finals[0] - finals[1]).max())
    second = float(np.abs(finals[1] - finals[2]).max())
    return math.log2(first / second)


def check_self_convergence() -> CheckResult:
    spatial = spatial_differences()
    space_ok = spatial[1] <= 1e-12 or spatial[1] <= spatial[0] / 4.0
    euler = temporal_order(TimeScheme.EULER)
    heun = temporal_order(TimeScheme.HEUN)
    return _result(
        "self_convergence",
        min(euler, heun / 2.0),
        0.8,
        space_ok and euler >= 0.8 and heun >= 1.6,
        detail=(
            f"space {spatial[0]:.2e} -> {spatial[1]:.2e}; "
            f"order euler {euler:.2f}, heun {heun:.2f}"
        ),
    )


def run_suite(seed: int = 0, threads: int = 1) -> List[CheckResult]:
    logger.info("validation suite: seed=%d threads=%d", seed, threads)
    family = steepness_family()
    calibration = calibrate(family)
    trajectories = run_all(maximum_principle_configs(), seed, threads)
    return [
        check_flat_dno(),
        check_linear_decay(),
        check_stationarity(),
        check_maximum_principles(trajectories),
        check_comparison(),
        check_disk_oracle(),
        check_poisson_limit(),
        check_flat_density(),
        check_adjointness(),
        check_jump_relation(),
        check_invertibility(family, calibration),
        check_theta_bound(trajectories, calibration),
        check_dn_positivity(trajectories),
        check_convolutions(seed=seed),
        check_vanishing_viscosity(seed=seed, threads=threads),
        check_self_convergence(),
    ]
