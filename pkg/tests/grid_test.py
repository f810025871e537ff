from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from varcoorbit.exceptions import GridMismatchError, InvalidParameterError
from varcoorbit.grid import (
    SQRT_2PI,
    GridSignal,
    ScaleAxis,
    SpatialGrid,
    XField,
    convolve,
    dilate_filter,
    forward_transform,
    inverse_transform,
    scale_integral,
    to_frequency,
    to_space,
)


@pytest.mark.parametrize("n", [0, 4, 12, 100])
def test_grid_rejects_bad_size(n: int) -> None:
    with pytest.raises(InvalidParameterError, match="power of two"):
        SpatialGrid(n=n)


@pytest.mark.parametrize("period", [0.0, -1.0, math.inf, math.nan])
def test_grid_rejects_bad_period(period: float) -> None:
    with pytest.raises(InvalidParameterError, match="period"):
        SpatialGrid(n=8, period=period)


def test_grid_nodes_and_frequencies() -> None:
    grid = SpatialGrid(n=16, period=8.0)
    assert grid.step == 0.5
    assert grid.nodes[0] == -4.0
    assert grid.nodes[-1] == 3.5
    np.testing.assert_allclose(grid.frequencies[:3], [0.0, math.pi / 4, math.pi / 2])
    assert grid.frequencies.min() == pytest.approx(-grid.band)
    assert grid.frequency_step == pytest.approx(math.pi / 4)
    assert grid.refined().n == 32
    assert grid.refined().period == grid.period


def test_offset_distances_are_torus_distances() -> None:
    grid = SpatialGrid(n=8, period=8.0)
    assert grid.offset_distances().tolist() == [0.0, 1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0]


def test_gaussian_is_its_own_transform(grid: SpatialGrid) -> None:
    f = GridSignal.from_function(grid, lambda x: np.exp(-(x**2) / 2))
    spectrum = forward_transform(f.values, grid)
    np.testing.assert_allclose(spectrum, np.exp(-(grid.frequencies**2) / 2), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_transform_is_unitary_and_invertible(seed: int) -> None:
    grid = SpatialGrid(n=64, period=10.0)
    rng = np.random.default_rng(seed)
    f = GridSignal(grid=grid, values=rng.standard_normal(64) + 1j * rng.standard_normal(64))
    spectrum = to_frequency(f)

    assert spectrum.domain == "frequency"
    assert spectrum.l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)
    np.testing.assert_allclose(to_space(spectrum).values, f.values, atol=1e-12)
    np.testing.assert_allclose(inverse_transform(forward_transform(f.values, grid), grid), f.values, atol=1e-12)


def test_domain_checks(grid: SpatialGrid) -> None:
    f = GridSignal.zeros(grid)
    with pytest.raises(InvalidParameterError, match="frequency-domain"):
        to_space(f)
    with pytest.raises(InvalidParameterError, match="spatial"):
        to_frequency(to_frequency(f))


def test_convolve_identity_and_shift(grid: SpatialGrid) -> None:
    f = GridSignal.from_function(grid, lambda x: np.exp(-(x**2)))
    identity = convolve(np.full(grid.n, 1 / SQRT_2PI), f)
    np.testing.assert_allclose(identity.values, f.values, atol=1e-12)

    # kernel δ(· - 1) has transform (2π)^{-1/2}e^{-iξ}
    shift = convolve(np.exp(-1j * grid.frequencies) / SQRT_2PI, f)
    expected = np.exp(-((grid.nodes - 1.0) ** 2))
    np.testing.assert_allclose(shift.values, expected, atol=1e-10)

    with pytest.raises(InvalidParameterError, match="Filter has shape"):
        convolve(np.ones(3), f)


def test_dilate_filter_normalizations(grid: SpatialGrid) -> None:
    profile = lambda xi: np.exp(-(xi**2))  # noqa: E731
    l1 = dilate_filter(profile, 0.25, grid)
    l2 = dilate_filter(profile, 0.25, grid, normalization="l2")
    np.testing.assert_allclose(l1, np.exp(-((0.25 * grid.frequencies) ** 2)))
    np.testing.assert_allclose(l2, 0.5 * l1)
    np.testing.assert_allclose(dilate_filter(profile, math.inf, grid), profile(grid.frequencies))
    with pytest.raises(InvalidParameterError, match="positive"):
        dilate_filter(profile, 0.0, grid)


def test_signal_arithmetic_and_validation() -> None:
    grid, other = SpatialGrid(n=8), SpatialGrid(n=16)
    f = GridSignal(grid=grid, values=np.arange(8.0))
    assert (f + f).values.tolist() == (2 * np.arange(8.0)).tolist()
    assert (f - f).l2_norm() == 0.0
    assert f.scaled(2.0).inner(f) == pytest.approx(2 * f.l2_norm() ** 2)
    with pytest.raises(GridMismatchError):
        f + GridSignal.zeros(other)
    with pytest.raises(InvalidParameterError, match="Expected 8 samples"):
        GridSignal(grid=grid, values=np.zeros(9))
    with pytest.raises(InvalidParameterError, match="finite"):
        GridSignal(grid=grid, values=np.full(8, np.nan))


def test_signal_keeps_real_samples_real() -> None:
    grid = SpatialGrid(n=8)
    assert GridSignal(grid=grid, values=np.arange(8)).values.dtype == np.float64
    assert GridSignal(grid=grid, values=np.arange(8.0)).scaled(1j).values.dtype == np.complex128
    assert GridSignal.zeros(grid).values.dtype == np.complex128


def test_refined_signal_interpolates_band_limited_samples(grid: SpatialGrid) -> None:
    f = GridSignal.from_function(grid, lambda x: np.exp(-(x**2) + 2j * x))
    fine = f.refined()
    assert fine.grid == grid.refined()
    np.testing.assert_allclose(fine.values[::2], f.values, atol=1e-12)
    np.testing.assert_allclose(fine.values, np.exp(-(fine.grid.nodes**2) + 2j * fine.grid.nodes), atol=1e-12)
    assert fine.l2_norm() == pytest.approx(f.l2_norm(), rel=1e-12)
    with pytest.raises(InvalidParameterError, match="spatial samples"):
        to_frequency(f).refined()


class TestScaleAxis:
    def test_midpoints_and_weights(self) -> None:
        axis = ScaleAxis(base=2.0, per_octave=4, octaves=2)
        assert axis.size == 8
        assert axis.scales[0] == pytest.approx(2 ** (-1 / 8))
        assert axis.lowest_scale == pytest.approx(0.25)
        assert axis.slot_scales[0] == math.inf
        np.testing.assert_allclose(axis.sheet_weights[1:], axis.log_weight / axis.scales)
        assert axis.sheet_weights[0] == 1.0
        assert axis.window_slots(2.0) == 4
        assert axis.refined().per_octave == 8

    def test_scale_integral_is_exact_on_log_measure(self) -> None:
        axis = ScaleAxis(base=2.0, per_octave=8, octaves=5)
        assert scale_integral(np.ones(axis.size), axis) == pytest.approx(5 * math.log(2))

    def test_scale_integral_converges_quadratically(self) -> None:
        # ∫_{2^-J}^1 t dt/t = 1 - 2^-J; the midpoint rule error shrinks ~4x per refinement
        coarse, fine = ScaleAxis(per_octave=4, octaves=3), ScaleAxis(per_octave=8, octaves=3)
        exact = 1 - 2.0**-3
        err_coarse = abs(scale_integral(coarse.scales, coarse) - exact)
        err_fine = abs(scale_integral(fine.scales, fine) - exact)
        assert 3.5 < err_coarse / err_fine < 4.5

    @pytest.mark.parametrize(("base", "per_octave", "octaves"), [(1.0, 4, 2), (2.0, 0, 2), (2.0, 4, 0)])
    def test_rejects_bad_parameters(self, base: float, per_octave: int, octaves: int) -> None:
        with pytest.raises(InvalidParameterError):
            ScaleAxis(base=base, per_octave=per_octave, octaves=octaves)

    def test_scale_integral_rejects_bad_input(self) -> None:
        axis = ScaleAxis(per_octave=2, octaves=1)
        with pytest.raises(InvalidParameterError, match="per-scale"):
            scale_integral(np.ones(3), axis)
        with pytest.raises(InvalidParameterError, match="finite"):
            scale_integral(np.array([1.0, np.inf]), axis)


class TestXField:
    def test_measure_and_norm(self, small_grid: SpatialGrid, small_axis: ScaleAxis) -> None:
        ones = XField.zeros(small_grid, small_axis).with_values(np.ones((small_axis.size + 1, small_grid.n)))
        expected = small_grid.period * (1 + small_axis.log_weight * np.sum(1 / small_axis.scales))
        assert ones.l2_norm() ** 2 == pytest.approx(expected)
        assert ones.inner(ones) == pytest.approx(expected)
        assert ones.infinity.shape == (small_grid.n,)
        assert ones.finite.shape == (small_axis.size, small_grid.n)

    def test_compatibility(self, small_grid: SpatialGrid, small_axis: ScaleAxis, random_field: XField) -> None:
        other = XField.zeros(small_grid, small_axis.refined())
        with pytest.raises(GridMismatchError, match="scale axes"):
            random_field + other
        with pytest.raises(TypeError, match="Expected XField"):
            random_field.inner(np.zeros(3))  # type: ignore[arg-type]
        with pytest.raises(InvalidParameterError, match="Expected field of shape"):
            XField(grid=small_grid, axis=small_axis, values=np.zeros((2, 2)))
        assert (random_field - random_field).l2_norm() == 0.0
        assert random_field.scaled(2.0).l2_norm() == pytest.approx(2 * random_field.l2_norm())
