"""Tests for the Dirichlet-Neumann operator"""
import numpy as np
import pytest

from muskat.core.errors import NumericalError
from muskat.models.grid import GridFunction, PeriodicGrid
from muskat.numerics import dno, kernels


def _pairs(grid: PeriodicGrid):
    x = grid.nodes

    def make(values):
        return GridFunction(grid, values)

    return [
        (make(0.3 * np.cos(x)), make(0.3 * np.cos(x))),
        (make(0.5 * np.cos(x) + 0.2 * np.sin(2 * x)), make(np.sin(3 * x))),
        (make(np.cos(x)), make(np.exp(np.cos(x)))),
        (make(0.4 * np.sin(2 * x)), make(np.cos(x) - 0.5 * np.cos(4 * x))),
    ]


class TestApplyDno:
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_flat_interface(self, grid256, k):
        """G(0) cos kx = k cos kx"""
        x = grid256.nodes
        flat = GridFunction.constant(grid256, 0.0)
        result = dno.apply_dno(flat, GridFunction(grid256, np.cos(k * x)))
        assert np.abs(result.gf.values - k * np.cos(k * x)).max() <= 1e-8

    def test_constant_data(self, grid64, cosine):
        """Constant data has zero normal derivative"""
        result = dno.apply_dno(cosine(grid64, 0.5), GridFunction.constant(grid64, 2.0))
        assert result.gf.max_abs() <= 1e-12
        assert result.pairing == pytest.approx(0.0, abs=1e-12)

    def test_translation_equivariance(self, grid64):
        """Shifting f and g by grid steps shifts G(f)g"""
        f, g = _pairs(grid64)[1]
        base = dno.apply_dno(f, g).gf
        shifted = dno.apply_dno(f.shift(5), g.shift(5)).gf
        assert np.abs(shifted.values - base.shift(5).values).max() <= 1e-10

    def test_positivity_and_mean(self, grid64):
        """The pairing is nonnegative and G(f)g has zero mean"""
        for f, g in _pairs(grid64):
            result = dno.apply_dno(f, g)
            norm2 = grid64.spacing * float(np.dot(g.values, g.values))
            assert result.pairing >= -1e-8 * norm2
            assert abs(result.gf.mean()) <= 1e-8

    def test_comparison_at_touching_point(self, grid256):
        """f1 <= f2 touching at x0 gives G(f1)f1 >= G(f2)f2 at x0"""
        x = grid256.nodes
        f1 = GridFunction(grid256, 0.3 * np.cos(x))
        f2 = GridFunction(grid256, 0.3 * np.cos(x) + 0.1 * (1 - np.cos(x)) ** 2)
        i0 = grid256.node_index(0.0)
        lower = dno.apply_dno(f1, f1).gf.values[i0]
        upper = dno.apply_dno(f2, f2).gf.values[i0]
        assert lower >= upper - 1e-8

    def test_self_convergence(self):
        """Doubling N shrinks the change at shared nodes at least fourfold"""
        results = []
        for n in (16, 32, 64):
            grid = PeriodicGrid(n)
            f = GridFunction.from_function(grid, lambda x: 0.3 * np.cos(x))
            g = GridFunction.from_function(grid, np.sin)
            results.append(dno.apply_dno(f, g).gf.values)
        first = np.abs(results[1][::2] - results[0]).max()
        second = np.abs(results[2][::2] - results[1]).max()
        assert second <= first / 4 or second <= 1e-12

    def test_non_finite_intermediate(self, grid64, cosine, monkeypatch):
        """A non-finite smooth-log stage is reported with its tag"""
        monkeypatch.setattr(
            kernels, "smooth_log_matrix", lambda surface: np.full((64, 64), np.nan)
        )
        f = cosine(grid64, 0.5)
        with pytest.raises(NumericalError) as excinfo:
            dno.apply_dno(f, f)
        assert excinfo.value.stage == "smooth-log"


class TestDnoFlat:
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_single_modes(self, grid64, k):
        """|D| cos kx = k cos kx"""
        x = grid64.nodes
        flat = dno.dno_flat(GridFunction(grid64, np.cos(k * x)))
        assert np.abs(flat.values - k * np.cos(k * x)).max() <= 1e-12

    def test_constant(self, grid64):
        """|D| of a constant is zero"""
        assert dno.dno_flat(GridFunction.constant(grid64, 7.0)).max_abs() <= 1e-13

    def test_agrees_with_general_path(self, grid256, band_limited):
        """The fast path matches apply_dno on the flat interface"""
        g = band_limited(grid256, top=12)
        general = dno.apply_dno(GridFunction.constant(grid256, 0.0), g).gf
        assert np.abs(dno.dno_flat(g).values - general.values).max() <= 1e-8


class TestVerticalShift:
    @pytest.mark.parametrize("c", [-2.0, 0.5, 10.0])
    def test_invariance(self, grid64, c):
        """G(f + c)(g + c) = G(f)g"""
        f, g = _pairs(grid64)[1]
        assert dno.dno_vertical_shift_invariance(f, g, c)

    def test_failure_reported(self, grid64, monkeypatch):
        """A broken operator fails the check instead of raising"""
        original = dno.apply_dno

        def offset_dependent(f, g, tol=None):
            result = original(f, g, tol)
            return type(result)(
                gf=result.gf + f.mean(), theta_used=result.theta_used, pairing=result.pairing
            )

        monkeypatch.setattr(dno, "apply_dno", offset_dependent)
        f, g = _pairs(grid64)[0]
        assert not dno.dno_vertical_shift_invariance(f, g, 1.0)


class TestVelocityBound:
    @pytest.mark.parametrize("k", [1, 3])
    def test_flat_single_mode(self, grid64, k):
        """||G(0) cos kx|| / ||(cos kx)'|| = 1"""
        g = GridFunction.from_function(grid64, lambda x: np.cos(k * x))
        ratio = dno.velocity_bound_ratio(GridFunction.constant(grid64, 0.0), g)
        assert ratio == pytest.approx(1.0, rel=1e-10)

    def test_constant_data(self, grid64, cosine):
        """Constant data has ratio zero"""
        constant = GridFunction.constant(grid64, 1.0)
        assert dno.velocity_bound_ratio(cosine(grid64, 0.5), constant) == 0.0

    def test_order_one(self, grid64):
        """The ratio is positive and of order one on smooth pairs"""
        for f, g in _pairs(grid64):
            assert 0.0 < dno.velocity_bound_ratio(f, g) < 5.0
