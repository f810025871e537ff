from __future__ import annotations

import math

import numpy as np
import pytest

from varcoorbit.exceptions import InvalidParameterError
from varcoorbit.grid import ScaleAxis, SpatialGrid, XField
from varcoorbit.varexp import ExponentField
from varcoorbit.weights import (
    CallableWeight,
    MicrolocalWeight,
    ReservoirWeight,
    check_admissible,
    embedding_ratio,
    estimate_class_parameters,
    m_nu,
    make_weight,
    weight_sequence,
    wtilde,
)


def test_microlocal_weight_values() -> None:
    w = MicrolocalWeight(s=1.0, sprime=2.0, x0=1.0)
    # t^{-1}(1 + 2/0.5)^2 = 2 * 25
    assert w(3.0, 0.5).item() == pytest.approx(50.0)
    assert w(3.0, math.inf).item() == pytest.approx(9.0)
    assert w(1.0, 0.25).item() == pytest.approx(4.0)


@pytest.mark.parametrize(
    ("s", "sprime", "expected"),
    [(1.0, 0.0, (1.0, 1.0, 0.0)), (0.5, -1.5, (-1.0, 0.5, 1.5)), (0.0, 2.0, (0.0, 2.0, 2.0))],
)
def test_class_parameters(s: float, sprime: float, expected: tuple[float, float, float]) -> None:
    assert MicrolocalWeight(s=s, sprime=sprime).class_parameters == expected


def test_tilde_weight_shifts_scale_exponents() -> None:
    w = wtilde(MicrolocalWeight(s=1.0, sprime=-1.0))
    assert w.class_parameters == (0.5, 1.5, 1.0)
    assert w(2.0, 0.25).item() == pytest.approx(2.0 * MicrolocalWeight(s=1.0, sprime=-1.0)(2.0, 0.25).item())
    assert w(2.0, math.inf).item() == pytest.approx(1 / 3)


def test_on_cells_puts_infinity_sheet_first(small_grid: SpatialGrid, small_axis: ScaleAxis) -> None:
    cells = MicrolocalWeight(s=1.0).on_cells(small_grid, small_axis)
    assert cells.shape == (small_axis.size + 1, small_grid.n)
    np.testing.assert_allclose(cells[0], 1.0)
    np.testing.assert_allclose(cells[1:, 0], 1 / small_axis.scales)


def test_weight_sequence() -> None:
    seq = weight_sequence(MicrolocalWeight(s=-0.5), 4, SpatialGrid(n=8))
    assert seq.shape == (5, 8)
    np.testing.assert_allclose(seq[:, 3], [1.0, 2**-0.5, 0.5, 2**-1.5, 0.25])
    with pytest.raises(InvalidParameterError, match="nonnegative"):
        weight_sequence(MicrolocalWeight(), -1, SpatialGrid(n=8))


@pytest.mark.parametrize(("alpha1", "alpha2", "alpha3"), [(1.0, 0.0, 0.0), (0.0, 1.0, -0.5)])
def test_callable_weight_validates_class(alpha1: float, alpha2: float, alpha3: float) -> None:
    with pytest.raises(InvalidParameterError, match="Class parameter"):
        CallableWeight(lambda x, t: np.ones_like(x * t), alpha1=alpha1, alpha2=alpha2, alpha3=alpha3)


class TestMakeWeight:
    def test_names(self) -> None:
        assert make_weight("constant").class_parameters == (0.0, 0.0, 0.0)
        w = make_weight("w2ml", {"s": 0.5, "sprime": 1.0})
        assert isinstance(w, MicrolocalWeight)
        assert w.s == 0.5

    @pytest.mark.parametrize(
        ("name", "params", "match"),
        [
            ("constant", {"s": 1.0}, "no parameters"),
            ("w2ml", {"beta": 1.0}, "Unknown w2ml parameters"),
            ("gaussian", None, "Unknown weight"),
        ],
    )
    def test_errors(self, name: str, params: dict[str, float] | None, match: str) -> None:
        with pytest.raises(InvalidParameterError, match=match):
            make_weight(name, params)


class TestAdmissibility:
    @pytest.mark.parametrize(("s", "sprime"), [(0.0, 0.0), (1.0, 0.0), (0.5, -1.5), (-0.5, 2.0)])
    def test_microlocal_weights_pass(self, s: float, sprime: float) -> None:
        w = MicrolocalWeight(s=s, sprime=sprime, x0=0.3)
        assert check_admissible(w, 2000, seed=3).passes
        assert check_admissible(wtilde(w), 500, seed=4).passes

    def test_understated_class_is_caught(self) -> None:
        base = MicrolocalWeight(s=1.0)
        w = CallableWeight(base.evaluate, alpha1=0.0, alpha2=0.5, alpha3=0.0, name="understated")
        report = check_admissible(w, 500)
        assert not report.passes
        assert report.violations["w1_upper"] > 0.1
        assert report.worst[1] >= report.violations["w1_upper"]

    def test_spatial_growth_is_caught(self) -> None:
        base = MicrolocalWeight(sprime=2.0)
        w = CallableWeight(base.evaluate, alpha1=0.0, alpha2=2.0, alpha3=1.0)
        assert check_admissible(w, 1000).violations["w2"] > 0

    def test_estimate_is_within_declared_class(self) -> None:
        w = MicrolocalWeight(s=1.0, sprime=0.5)
        estimate = estimate_class_parameters(w, 2000, seed=5)
        assert estimate.alpha1 >= w.alpha1 - 1e-9
        assert estimate.alpha2 <= w.alpha2 + 1e-9
        assert estimate.alpha3 <= w.alpha3 + 1e-9
        assert estimate.alpha1 == pytest.approx(1.0, abs=0.05)

    def test_estimate_of_constant_weight_is_zero(self) -> None:
        estimate = estimate_class_parameters(MicrolocalWeight(), 300)
        assert (estimate.alpha1, estimate.alpha2, estimate.alpha3) == (0.0, 0.0, 0.0)


class TestReservoir:
    def test_associated_weight_is_at_least_one(self, small_grid: SpatialGrid, small_axis: ScaleAxis) -> None:
        w = MicrolocalWeight(s=1.0, sprime=0.5)
        nu = ReservoirWeight.associated(w, ExponentField.constant(small_grid, 2.0), small_axis)
        assert nu.scale_exponent == pytest.approx(w.alpha1 - 0.5)
        assert nu.evaluate_cells(small_grid, small_axis).min() == pytest.approx(1.0)
        assert nu.scale >= 1.0

    @pytest.mark.parametrize(("p_minus", "scale"), [(0.0, 1.0), (2.0, -1.0)])
    def test_rejects_bad_parameters(self, p_minus: float, scale: float) -> None:
        with pytest.raises(InvalidParameterError, match="positive"):
            ReservoirWeight(alpha1=0.0, alpha3=0.0, p_minus=p_minus, scale=scale)

    def test_two_point_weight_is_symmetric(self) -> None:
        nu = ReservoirWeight(alpha1=1.0, alpha3=1.0, p_minus=1.0)
        x, y = (np.array([0.0, 2.0]), np.array([0.5, math.inf])), (np.array([3.0, -1.0]), np.array([0.25, 0.5]))
        forward, backward = m_nu(nu, x, y), m_nu(nu, y, x)
        np.testing.assert_allclose(forward, backward)
        assert np.all(forward >= 1.0)

    def test_embedding_ratio(self, random_field: XField) -> None:
        nu = ReservoirWeight(alpha1=0.0, alpha3=0.0, p_minus=math.inf)
        peak = float(np.abs(random_field.values).max())
        assert embedding_ratio(nu, random_field, 2.0) == pytest.approx(peak / 2.0)
        assert embedding_ratio(nu, random_field, 0.0) == 0.0
