"""Tests for the disk, Poisson and interior-field oracles"""
import math

import numpy as np
import pytest

from muskat.core.errors import InvalidInputError, NearBoundaryWarning
from muskat.models.grid import FieldPoint, GridFunction, PeriodicGrid
from muskat.numerics import bie, oracles


@pytest.fixture
def grid512() -> PeriodicGrid:
    return PeriodicGrid(512)


class TestDiskDno:
    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_fourier_modes(self, grid512, m):
        """The disk map sends cos mx to m cos mx, on and off the grid"""
        g = GridFunction.from_function(grid512, lambda x: np.cos(m * x))
        for x in (grid512.nodes[100], 0.0, 0.123, -2.5):
            assert oracles.disk_dno(g, x) == pytest.approx(m * math.cos(m * x), abs=1e-6)

    def test_constant(self, grid512):
        """Constants map to zero"""
        constant = GridFunction.constant(grid512, 3.0)
        assert oracles.disk_dno(constant, 0.4) == pytest.approx(0.0, abs=1e-12)

    def test_rotation_equivariance(self, grid512):
        """Rotating the data by grid steps rotates the result"""
        g = GridFunction.from_function(grid512, lambda x: np.exp(np.sin(x)))
        x = grid512.nodes[40]
        shifted_x = grid512.nodes[40 + 7]
        expected = oracles.disk_dno(g, x)
        assert oracles.disk_dno(g.shift(7), shifted_x) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("m", [12, 16, 20])
    def test_resolved_high_modes(self, grid64, m):
        """Band-limited high modes are accepted and mapped exactly"""
        g = GridFunction.from_function(grid64, lambda x: np.cos(m * x))
        for index in (32, 5):
            x = grid64.nodes[index]
            assert oracles.disk_dno(g, x) == pytest.approx(m * math.cos(m * x), abs=1e-9)

    def test_kink_rejected(self, grid512):
        """Data with a corner at x is refused"""
        g = GridFunction.from_function(grid512, lambda x: 0.5 * math.pi - np.abs(x))
        with pytest.raises(InvalidInputError):
            oracles.disk_dno(g, 0.0)


class TestPoisson:
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_fourier_modes(self, grid64, m):
        """r d/dr of r^m cos mx is m r^m cos mx"""
        g = GridFunction.from_function(grid64, lambda x: np.cos(m * x))
        for x in (0.0, 0.7, -1.9):
            expected = m * 0.5**m * math.cos(m * x)
            value = oracles.poisson_radial_derivative(g, 0.5, x)
            assert value == pytest.approx(expected, abs=1e-10)

    def test_constant(self, grid64):
        """Constants have zero radial derivative"""
        g = GridFunction.constant(grid64, -2.0)
        assert oracles.poisson_radial_derivative(g, 0.9, 0.3) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.5, 1.5])
    def test_radius_range(self, grid64, r):
        """Only radii strictly inside the disk are accepted"""
        with pytest.raises(InvalidInputError):
            oracles.poisson_radial_derivative(GridFunction.constant(grid64, 0.0), r, 0.0)

    def test_approaches_boundary_map(self, grid512):
        """As r -> 1 the radial derivative tends to the disk map"""
        g = GridFunction.from_function(grid512, lambda x: np.exp(np.cos(x)))
        x = 0.4
        target = oracles.disk_dno(g, x)
        errors = [
            abs(oracles.poisson_radial_derivative(g, 1.0 - 2.0**-j, x) - target)
            for j in (4, 6, 8, 10)
        ]
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))


class TestHarmonicEval:
    def test_flat_interface(self, grid64):
        """Below a flat interface, cos x extends to e^y cos x"""
        flat = GridFunction.constant(grid64, 0.0)
        g = GridFunction.from_function(grid64, np.cos)
        Theta = bie.solve_Theta(flat, g)
        for p in (FieldPoint(0.0, -1.0), FieldPoint(1.2, -0.7), FieldPoint(-2.0, -2.5)):
            value = oracles.harmonic_eval(flat, Theta, p)
            assert value == pytest.approx(math.exp(p.y) * math.cos(p.x), abs=1e-8)

    def test_deep_limit(self, grid64):
        """Far below the interface the field tends to half the mean density"""
        f = GridFunction.from_function(grid64, lambda x: 0.5 * np.cos(x))
        g = GridFunction.from_function(grid64, lambda x: 1.0 + 0.2 * np.cos(x))
        Theta = bie.solve_Theta(f, g)
        value = oracles.harmonic_eval(f, Theta, FieldPoint(0.3, -20.0))
        assert value == pytest.approx(0.5 * Theta.mean(), abs=1e-6)

    def test_maximum_principle(self):
        """Interior values stay within the range of the boundary data"""
        grid = PeriodicGrid(128)
        f = GridFunction.from_function(grid, lambda x: 0.5 * np.cos(x))
        rng = np.random.default_rng(4)
        xs = rng.uniform(-math.pi, math.pi, 100)
        ys = 0.5 * np.cos(xs) - rng.uniform(0.4, 2.0, 100)
        values = oracles.harmonic_field(f, f, [FieldPoint(x, y) for x, y in zip(xs, ys)])
        assert min(values) >= f.values.min() - 1e-6
        assert max(values) <= f.values.max() + 1e-6

    def test_discrete_harmonicity(self):
        """The five-point Laplacian of the field vanishes at second order"""
        grid = PeriodicGrid(128)
        f = GridFunction.from_function(grid, lambda x: 0.3 * np.cos(x))
        g = GridFunction.from_function(grid, np.cos)
        Theta = bie.solve_Theta(f, g)
        x0, y0 = 0.3, -0.8

        def laplacian(h):
            points = [(x0 + h, y0), (x0 - h, y0), (x0, y0 + h), (x0, y0 - h), (x0, y0)]
            v = [oracles.harmonic_eval(f, Theta, FieldPoint(x, y)) for x, y in points]
            return (v[0] + v[1] + v[2] + v[3] - 4 * v[4]) / h**2

        coarse, fine = abs(laplacian(0.1)), abs(laplacian(0.05))
        assert fine <= coarse / 2.5 or fine <= 1e-8

    def test_point_above_interface(self, grid64):
        """Points on or above the interface are rejected"""
        f = GridFunction.from_function(grid64, lambda x: 0.5 * np.cos(x))
        Theta = bie.solve_Theta(f, f)
        with pytest.raises(InvalidInputError):
            oracles.harmonic_eval(f, Theta, FieldPoint(0.0, 0.6))
        with pytest.raises(InvalidInputError):
            oracles.harmonic_eval(f, Theta, FieldPoint(0.0, 0.5))

    def test_near_boundary_warning(self, grid64):
        """Points within a few cells of the interface warn"""
        f = GridFunction.from_function(grid64, lambda x: 0.5 * np.cos(x))
        Theta = bie.solve_Theta(f, f)
        with pytest.warns(NearBoundaryWarning):
            oracles.harmonic_eval(f, Theta, FieldPoint(0.0, 0.49))

    def test_refine_must_be_power_of_two(self, grid64):
        """refine = 3 is rejected"""
        f = GridFunction.constant(grid64, 0.0)
        with pytest.raises(InvalidInputError):
            oracles.harmonic_eval(f, f, FieldPoint(0.0, -1.0), refine=3)

    @pytest.mark.filterwarnings("ignore::muskat.core.errors.NearBoundaryWarning")
    def test_boundary_recovery(self, grid64):
        """Approaching a boundary node recovers the Dirichlet data"""
        f = GridFunction.from_function(grid64, lambda x: 0.3 * np.cos(x))
        g = GridFunction.from_function(grid64, np.cos)
        Theta = bie.solve_Theta(f, g)
        index = 20
        x = grid64.nodes[index]
        errors = [
            abs(
                oracles.harmonic_eval(
                    f, Theta, FieldPoint(x, f.values[index] - 2.0**-j), refine=64
                )
                - g.values[index]
            )
            for j in range(3, 9)
        ]
        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] <= 0.02
