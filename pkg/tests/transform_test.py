from __future__ import annotations

import math

import numpy as np
import pytest

from varcoorbit.analyzers import AnalyzerPair, MeyerSystem
from varcoorbit.exceptions import GridMismatchError, InvalidParameterError
from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid, XField
from varcoorbit.transform import (
    AtomFamily,
    VoiceTransform,
    decay_constant,
    peetre_maximal,
    peetre_maximal_rows,
    peetre_truncation_radius,
    peetre_wiener_maximal,
    reproduce,
    tightness_defect,
    voice_adjoint,
    voice_transform,
)


def test_frame_is_tight_on_the_battery(vt: VoiceTransform, battery: list[GridSignal]) -> None:
    assert tightness_defect(vt, battery) < 1e-3


def test_tightness_needs_a_nonzero_signal(small_vt: VoiceTransform, small_grid: SpatialGrid) -> None:
    with pytest.raises(InvalidParameterError, match="nonzero"):
        tightness_defect(small_vt, [GridSignal.zeros(small_grid)])


def test_reproducing_formula(vt: VoiceTransform, battery: list[GridSignal]) -> None:
    for f in battery[:8]:
        field = voice_transform(vt, f)
        assert (reproduce(vt, field) - field).l2_norm() < 1e-2 * field.l2_norm()
        assert (voice_adjoint(vt, field) - f).l2_norm() < 1e-2 * f.l2_norm()


def test_reproduction_is_nearly_idempotent(vt: VoiceTransform, rng: np.random.Generator) -> None:
    shape = (vt.axis.size + 1, vt.grid.n)
    field = XField(grid=vt.grid, axis=vt.axis, values=rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    once = reproduce(vt, field)
    twice = reproduce(vt, once)
    assert (twice - once).l2_norm() < 1e-2 * once.l2_norm()
    # R is a contraction up to the frame defect
    assert once.l2_norm() <= field.l2_norm() * (1 + 1e-3)


def test_adjoint_pairing(small_vt: VoiceTransform, random_field: XField, rng: np.random.Generator) -> None:
    grid = small_vt.grid
    f = GridSignal(grid=grid, values=rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n))
    left = small_vt.apply(f).inner(random_field)
    right = f.inner(small_vt.adjoint(random_field))
    assert left == pytest.approx(right, rel=1e-12)


@pytest.mark.parametrize(("node", "slot"), [(0, 0), (17, 3), (40, 8)])
def test_transform_samples_atoms(small_vt: VoiceTransform, node: int, slot: int) -> None:
    grid = small_vt.grid
    f = GridSignal.from_function(grid, lambda x: np.exp(-((x - 0.7) ** 2)) * np.cos(2 * x))
    value = small_vt.apply(f).values[slot, node]
    assert value == pytest.approx(f.inner(small_vt.atom(node, slot)), abs=1e-12)


def test_transform_checks_discretization(small_vt: VoiceTransform, grid: SpatialGrid) -> None:
    with pytest.raises(GridMismatchError, match="Signal lives on"):
        small_vt.apply(GridSignal.zeros(grid))
    other_axis = small_vt.axis.refined()
    with pytest.raises(GridMismatchError, match="different discretizations"):
        small_vt.adjoint(XField.zeros(small_vt.grid, other_axis))


def test_atom_family_spectra(meyer_system: MeyerSystem, small_grid: SpatialGrid, small_axis: ScaleAxis) -> None:
    spectra = AtomFamily.meyer(meyer_system).spectra(small_grid, small_axis)
    assert spectra.shape == (small_axis.size + 1, small_grid.n)
    t = small_axis.scales[2]
    expected = math.sqrt(t) * meyer_system.psi1_hat(t * small_grid.frequencies)
    np.testing.assert_allclose(spectra[3], expected)


def test_atom_family_from_pair(meyer_pair: AnalyzerPair) -> None:
    family = AtomFamily.from_pair(meyer_pair)
    assert family.name == "meyer"
    assert family.infinity_profile is meyer_pair.phi0_hat


class TestPeetre:
    def test_truncation_radius(self) -> None:
        assert peetre_truncation_radius(2.0, 1.0, 1e-4) == pytest.approx(99.0)

    def test_truncated_matches_exhaustive(self, random_field: XField) -> None:
        for a in (0.5, 2.0, 6.0):
            fast = peetre_maximal(random_field, a).values.real
            slow = peetre_maximal(random_field, a, method="exhaustive").values.real
            np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-12 * np.abs(random_field.values).max())
            assert np.all(fast >= np.abs(random_field.values) * (1 - 1e-15))

    def test_decreasing_in_exponent(self, random_field: XField) -> None:
        mild = peetre_maximal(random_field, 1.0).values.real
        steep = peetre_maximal(random_field, 4.0).values.real
        assert np.all(steep <= mild + 1e-15)

    def test_rejects_nonpositive_exponent(self, small_grid: SpatialGrid) -> None:
        with pytest.raises(InvalidParameterError, match="Peetre exponent"):
            peetre_maximal_rows(np.ones((1, small_grid.n)), np.array([1.0]), small_grid, 0.0)

    def test_wiener_window(self, small_grid: SpatialGrid) -> None:
        axis = ScaleAxis(base=2.0, per_octave=2, octaves=4)
        values = np.zeros((axis.size + 1, small_grid.n))
        values[4, 10] = 1.0
        field = XField(grid=small_grid, axis=axis, values=values)
        wiener = peetre_wiener_maximal(field, 2.0).values.real
        peetre = peetre_maximal(field, 2.0).values.real
        assert axis.window_slots(2.0) == 2
        assert np.all(wiener >= peetre)
        np.testing.assert_array_equal(wiener[0], peetre[0])
        assert wiener[2:7, 10].tolist() == [1.0] * 5
        assert wiener[1, 10] == 0.0
        assert wiener[7, 10] == 0.0


class TestDecayConstant:
    def test_gaussian(self, small_vt: VoiceTransform, small_grid: SpatialGrid) -> None:
        f = GridSignal.from_function(small_grid, lambda x: np.exp(-(x**2)))
        low, high = decay_constant(small_vt, f, 1), decay_constant(small_vt, f, 3)
        assert 0 < low <= high
        assert math.isfinite(high)

    def test_zero_signal(self, small_vt: VoiceTransform, small_grid: SpatialGrid) -> None:
        assert decay_constant(small_vt, GridSignal.zeros(small_grid), 2) == 0.0
