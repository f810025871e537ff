from __future__ import annotations

import math

import numpy as np
import pytest

from varcoorbit.analyzers import AnalyzerPair
from varcoorbit.exceptions import GridMismatchError, InvalidParameterError, InvalidSpaceSpecError, TruncationWarning
from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid, XField
from varcoorbit.spaces import (
    SpaceSpec,
    aoki_rolewicz_exponent,
    b_norm,
    default_levels,
    equivalence_study,
    evaluate_norm,
    f_norm,
    geometric_smoothing,
    hypothesis_flags,
    local_means,
    lw_norm,
    mixed_norm_lp_lq,
    mixed_norm_lq_lp,
    pw_norm,
    quasi_triangle_constant,
    space_norm,
)
from varcoorbit.varexp import ExponentField, make_exponent
from varcoorbit.weights import MicrolocalWeight


def _bump(grid: SpatialGrid, sigma: float = 1.0) -> GridSignal:
    return GridSignal.from_function(grid, lambda x: np.exp(-(x**2) / (2 * sigma**2)) * np.cos(1.5 * x))


class TestSpaceSpec:
    @pytest.mark.parametrize(
        ("kwargs", "match"),
        [
            ({"family": "X", "p": 2.0, "q": 2.0}, "Unknown space family"),
            ({"family": "F", "p": math.inf, "q": 2.0}, "finite p_plus"),
            ({"family": "F", "p": 2.0, "q": math.inf}, "q_plus < inf"),
            ({"family": "B", "p": 2.0, "q": 0.0}, r"\(0, inf\]"),
            ({"family": "B", "p": 2.0, "q": 2.0, "a": 0.0}, "Peetre exponent"),
            ({"family": "B", "p": 2.0, "q": 2.0, "variant": "norm5"}, "Unknown norm variant"),
        ],
    )
    def test_validation(self, small_grid: SpatialGrid, kwargs: dict[str, object], match: str) -> None:
        params = {"w": MicrolocalWeight(), **kwargs}
        with pytest.raises(InvalidSpaceSpecError, match=match):
            SpaceSpec.constant(grid=small_grid, **params)  # type: ignore[arg-type]

    def test_exponent_kinds(self, small_grid: SpatialGrid) -> None:
        p = ExponentField.constant(small_grid, 2.0)
        with pytest.raises(InvalidSpaceSpecError, match="variable exponent"):
            SpaceSpec(family="F", p=p, q=2.0, w=MicrolocalWeight())
        with pytest.raises(InvalidSpaceSpecError, match="constant q"):
            SpaceSpec(family="L", p=p, q=p, w=MicrolocalWeight())
        with pytest.raises(GridMismatchError, match="same grid"):
            SpaceSpec(family="P", p=p, q=ExponentField.constant(small_grid.refined(), 2.0), w=MicrolocalWeight())

    def test_siblings(self, small_grid: SpatialGrid) -> None:
        spec = SpaceSpec.constant("F", small_grid, p=2.0, q=3.0, w=MicrolocalWeight(), variant="norm2")
        sibling = spec.with_family("P", MicrolocalWeight(s=1.0))
        assert sibling.family == "P"
        assert sibling.q is spec.q
        assert sibling.variant == "norm2"
        assert spec.with_variant("def").variant == "def"
        assert spec.q_minus == 3.0
        assert spec.grid == small_grid


class TestMixedNorms:
    def test_equal_exponents_commute(self, small_grid: SpatialGrid, rng: np.random.Generator) -> None:
        rows = rng.standard_normal((5, small_grid.n))
        for p0 in (1.0, 2.0, 3.5):
            p = ExponentField.constant(small_grid, p0)
            assert mixed_norm_lq_lp(rows, p, p0) == pytest.approx(mixed_norm_lp_lq(rows, p, p), rel=1e-9)

    def test_weights_and_zero_rows(self, small_grid: SpatialGrid) -> None:
        p = ExponentField.constant(small_grid, 2.0)
        rows = np.ones((2, small_grid.n))
        norm = math.sqrt(small_grid.period)
        assert mixed_norm_lq_lp(rows, p, 2.0, np.array([1.0, 3.0])) == pytest.approx(2 * norm)
        assert mixed_norm_lq_lp(np.zeros((3, small_grid.n)), p, 2.0) == 0.0
        assert mixed_norm_lp_lq(np.zeros((3, small_grid.n)), p, p) == 0.0

    def test_huge_entries_stay_finite(self, small_grid: SpatialGrid) -> None:
        p = ExponentField.constant(small_grid, 4.0)
        rows = np.full((3, small_grid.n), 1e250)
        expected = 1e250 * mixed_norm_lp_lq(np.ones((3, small_grid.n)), p, p)
        assert mixed_norm_lp_lq(rows, p, p) == pytest.approx(expected, rel=1e-9)


class TestDyadicNorms:
    def test_default_levels_cover_the_band(self, grid: SpatialGrid) -> None:
        levels = default_levels(grid)
        assert 2**levels >= grid.band > 2 ** (levels - 1)

    @pytest.mark.parametrize("p0", [1.0, 2.0, 3.0])
    def test_b_and_f_agree_when_p_equals_q(self, grid: SpatialGrid, p0: float) -> None:
        f = _bump(grid)
        w = MicrolocalWeight(s=0.5)
        b = b_norm(SpaceSpec.constant("B", grid, p=p0, q=p0, w=w), f)
        assert f_norm(SpaceSpec.constant("F", grid, p=p0, q=p0, w=w), f) == pytest.approx(b, rel=1e-9)

    def test_smoothness_weight_increases_the_norm(self, grid: SpatialGrid) -> None:
        f = _bump(grid, sigma=0.5)
        rough = f_norm(SpaceSpec.constant("F", grid, p=2.0, q=2.0, w=MicrolocalWeight()), f)
        smooth = f_norm(SpaceSpec.constant("F", grid, p=2.0, q=2.0, w=MicrolocalWeight(s=1.0)), f)
        assert smooth > rough > 0

    def test_b_infinity_is_the_largest_band(self, grid: SpatialGrid) -> None:
        f = _bump(grid)
        sup = b_norm(SpaceSpec.constant("B", grid, p=2.0, q=math.inf, w=MicrolocalWeight()), f)
        square = b_norm(SpaceSpec.constant("B", grid, p=2.0, q=2.0, w=MicrolocalWeight()), f)
        assert 0 < sup <= square

    def test_variable_exponents(self, grid: SpatialGrid) -> None:
        spec = SpaceSpec(
            family="F",
            p=make_exponent("sin-perturbed(base=1.5, amplitude=1.0)", grid),
            q=make_exponent("cos-perturbed", grid),
            w=MicrolocalWeight(s=0.5, sprime=-0.5),
        )
        value = f_norm(spec, _bump(grid))
        assert math.isfinite(value)
        assert value > 0
        assert f_norm(spec, GridSignal.zeros(grid)) == 0.0

    def test_truncation_warns(self, grid: SpatialGrid) -> None:
        spec = SpaceSpec.constant("F", grid, p=2.0, q=2.0, w=MicrolocalWeight())
        with pytest.warns(TruncationWarning, match="beyond level 1"):
            f_norm(spec, _bump(grid, sigma=0.1), levels=1)

    def test_evaluate_norm_reports_truncation(self, grid: SpatialGrid) -> None:
        spec = SpaceSpec.constant("B", grid, p=2.0, q=2.0, w=MicrolocalWeight())
        report = evaluate_norm(spec, _bump(grid, sigma=0.1), levels=1)
        assert report.flags == ("truncation",)
        assert report.to_record() == {"family": "B", "variant": "def", "value": report.value, "flags": ["truncation"]}
        assert evaluate_norm(spec, _bump(grid)).flags == ()

    def test_refinement_flag(self, grid: SpatialGrid) -> None:
        spec = SpaceSpec.constant("B", grid, p=2.0, q=2.0, w=MicrolocalWeight(s=1.0))
        report = evaluate_norm(spec, _bump(grid), check_refinement=True)
        assert report.flags == ()
        assert report.value == evaluate_norm(spec, _bump(grid)).value

        rough = SpaceSpec.constant("B", grid, p=1.0, q=1.0, w=MicrolocalWeight())
        spike = GridSignal(grid=grid, values=np.where(np.arange(grid.n) == grid.n // 2, 1.0, 0.0))
        assert "discretization" in evaluate_norm(rough, spike, check_refinement=True).flags
        assert "discretization" not in evaluate_norm(rough, spike).flags

    def test_spec_refined(self, grid: SpatialGrid) -> None:
        spec = SpaceSpec(
            family="F",
            p=make_exponent("sin-perturbed", grid),
            q=make_exponent("cos-perturbed", grid),
            w=MicrolocalWeight(s=0.5),
            variant="norm2",
        )
        fine = spec.refined()
        assert fine.grid == grid.refined()
        assert isinstance(fine.q, ExponentField)
        assert fine.q.grid == fine.grid
        assert (fine.family, fine.variant, fine.w) == (spec.family, spec.variant, spec.w)

    def test_family_and_grid_checks(self, grid: SpatialGrid, small_grid: SpatialGrid) -> None:
        spec = SpaceSpec.constant("B", grid, p=2.0, q=2.0, w=MicrolocalWeight())
        with pytest.raises(InvalidSpaceSpecError, match="f_norm is defined"):
            f_norm(spec, _bump(grid))
        with pytest.raises(GridMismatchError, match="Signal lives on"):
            b_norm(spec, _bump(small_grid))
        with pytest.raises(InvalidParameterError, match="At least one dyadic level"):
            b_norm(spec, _bump(grid), levels=0)
        with pytest.raises(InvalidParameterError, match="analyzing pair"):
            evaluate_norm(spec.with_variant("norm1"), _bump(grid))


class TestContinuousCharacterizations:
    def test_local_means_shape(self, meyer_pair: AnalyzerPair, small_grid: SpatialGrid, small_axis: ScaleAxis) -> None:
        means = local_means(meyer_pair, _bump(small_grid), small_axis)
        assert means.shape == (small_axis.size + 1, small_grid.n)

    def test_maximal_variants_dominate_local_means(
        self, meyer_pair: AnalyzerPair, grid: SpatialGrid, axis: ScaleAxis
    ) -> None:
        spec = SpaceSpec.constant("F", grid, p=2.0, q=2.0, w=MicrolocalWeight(s=0.5))
        f = _bump(grid)
        values = {
            variant: evaluate_norm(spec.with_variant(variant), f, pair=meyer_pair, axis=axis).value
            for variant in ("norm1", "norm2", "norm3")
        }
        assert 0 < values["norm1"] <= values["norm2"] <= values["norm3"]

    def test_hypothesis_flags(self, meyer_pair: AnalyzerPair, small_grid: SpatialGrid) -> None:
        spec = SpaceSpec.constant("B", small_grid, p=2.0, q=2.0, w=MicrolocalWeight(), a=0.25, variant="norm2")
        assert hypothesis_flags(spec, meyer_pair) == ("peetre-exponent",)
        assert hypothesis_flags(spec.with_variant("def")) == ()

    def test_equivalence_study(
        self,
        meyer_pair: AnalyzerPair,
        small_grid: SpatialGrid,
        small_axis: ScaleAxis,
        small_battery: list[GridSignal],
    ) -> None:
        spec = SpaceSpec.constant("F", small_grid, p=2.0, q=2.0, w=MicrolocalWeight())
        variants = ("def", "norm1", "norm4")
        study = equivalence_study(spec, small_battery, pair=meyer_pair, axis=small_axis, variants=variants)
        assert study.variants == variants
        assert all(len(study.values[v]) == len(small_battery) for v in variants)
        assert len(study.rows()) == len(variants) * len(small_battery)
        low, high = study.bands["def", "norm1"]
        assert 0 < low <= high
        assert study.band_width("def", "norm1") >= 1.0
        assert study.bands["norm1", "def"] == pytest.approx((1 / high, 1 / low))

    def test_equivalence_study_needs_signals(
        self, meyer_pair: AnalyzerPair, small_grid: SpatialGrid, small_axis: ScaleAxis
    ) -> None:
        spec = SpaceSpec.constant("F", small_grid, p=2.0, q=2.0, w=MicrolocalWeight())
        with pytest.raises(InvalidParameterError, match="nonempty battery"):
            equivalence_study(spec, [], pair=meyer_pair, axis=small_axis)


class TestXSpaces:
    def test_p_and_l_agree_when_p_equals_q(self, random_field: XField) -> None:
        grid = random_field.grid
        w = MicrolocalWeight(s=0.5)
        p_value = pw_norm(SpaceSpec.constant("P", grid, p=2.0, q=2.0, w=w), random_field)
        l_value = lw_norm(SpaceSpec.constant("L", grid, p=2.0, q=2.0, w=w), random_field)
        assert p_value == pytest.approx(l_value, rel=1e-9)

    def test_solid_and_homogeneous(self, random_field: XField) -> None:
        spec = SpaceSpec.constant("L", random_field.grid, p=1.5, q=3.0, w=MicrolocalWeight())
        value = space_norm(spec, random_field)
        half = random_field.with_values(0.5 * np.abs(random_field.values))
        assert space_norm(spec, half) == pytest.approx(0.5 * value, rel=1e-9)
        damped = random_field.with_values(random_field.values * (np.arange(random_field.grid.n) % 2))
        assert space_norm(spec, damped) <= value

    def test_family_and_grid_checks(self, random_field: XField, grid: SpatialGrid) -> None:
        with pytest.raises(InvalidSpaceSpecError, match="pw_norm"):
            pw_norm(SpaceSpec.constant("L", random_field.grid, p=2.0, q=2.0, w=MicrolocalWeight()), random_field)
        with pytest.raises(GridMismatchError, match="Field lives on"):
            space_norm(SpaceSpec.constant("P", grid, p=2.0, q=2.0, w=MicrolocalWeight()), random_field)


class TestQuasiNorms:
    @pytest.mark.parametrize(("p0", "q0", "expected"), [(2.0, 2.0, 1.0), (0.5, 2.0, 2.0), (2.0, 0.25, 8.0)])
    def test_quasi_triangle_constant(self, small_grid: SpatialGrid, p0: float, q0: float, expected: float) -> None:
        spec = SpaceSpec.constant("B", small_grid, p=p0, q=q0, w=MicrolocalWeight())
        assert quasi_triangle_constant(spec) == pytest.approx(expected)

    def test_aoki_rolewicz(self) -> None:
        assert aoki_rolewicz_exponent(1.0) == 1.0
        assert aoki_rolewicz_exponent(2.0) == 0.5
        with pytest.raises(InvalidParameterError, match=">= 1"):
            aoki_rolewicz_exponent(0.5)

    def test_geometric_smoothing(self) -> None:
        g = np.zeros((5, 2))
        g[2] = [1.0, 2.0]
        smoothed = geometric_smoothing(2.0, g)
        np.testing.assert_allclose(smoothed[:, 0], [1 / 16, 1 / 4, 1.0, 1 / 4, 1 / 16])
        np.testing.assert_allclose(smoothed[:, 1], 2 * smoothed[:, 0])
        with pytest.raises(InvalidParameterError, match="positive"):
            geometric_smoothing(0.0, g)
