"""Quasi-norms of Besov and Triebel-Lizorkin type with variable exponents and 2-microlocal weights.

The module evaluates

* the dyadic definitions of B^w_{p(·),q} and F^w_{p(·),q(·)} through a smooth dyadic partition of unity,
* the four continuous characterizations through local means, Peetre and Peetre-Wiener maximal functions,
* the Peetre-Wiener type spaces P^w_{p(·),q(·)} and L^w_{p(·),q} of functions on X,
* the sequence spaces Y♭ and Y♮ of a covering and the decomposition-space norm.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import logsumexp

from varcoorbit._utils import qualified_type_name
from varcoorbit.analyzers import AnalyzerPair, DyadicPU, moment_check
from varcoorbit.exceptions import GridMismatchError, InvalidParameterError, InvalidSpaceSpecError, TruncationWarning
from varcoorbit.grid import SQRT_2PI, GridSignal, ScaleAxis, XField, convolve, dilate_filter
from varcoorbit.transform import peetre_maximal, peetre_maximal_rows, peetre_wiener_maximal
from varcoorbit.varexp import DISCRETIZATION_TOLERANCE, ExponentField, luxemburg_norm, luxemburg_rows, relative_change
from varcoorbit.weights import weight_sequence

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from varcoorbit.coorbit import Covering, SeqCoeffs
    from varcoorbit.grid import SpatialGrid
    from varcoorbit.typing import Family, FloatArray, NormRecord, Variant
    from varcoorbit.weights import Weight2ML

__all__ = (
    "EquivalenceStudy",
    "NormReport",
    "SpaceSpec",
    "aoki_rolewicz_exponent",
    "b_norm",
    "decomposition_norm",
    "equivalence_study",
    "evaluate_norm",
    "f_norm",
    "geometric_smoothing",
    "hypothesis_flags",
    "lw_norm",
    "mixed_norm_lp_lq",
    "mixed_norm_lq_lp",
    "norm_variant",
    "pw_norm",
    "quasi_triangle_constant",
    "seq_norms",
    "space_norm",
)

logger = logging.getLogger(__name__)

TRUNCATION_TOLERANCE = 1e-10
DIMENSION = 1

_FUNCTION_FAMILIES = frozenset({"F", "B"})
_X_FAMILIES = frozenset({"P", "L"})
_POINTWISE_Q = frozenset({"F", "P"})


@dataclass(frozen=True, slots=True, kw_only=True, eq=False)
class SpaceSpec:
    """Parameters of a function space.

    Attributes:
        family: `"F"` or `"B"` for distributions on the line, `"P"` or `"L"` for functions on X.
        p: Integrability exponent p(·); p⁺ must be finite.
        q: Summability exponent. An [`ExponentField`][varcoorbit.varexp.ExponentField] with finite q⁺ for the
            pointwise families F and P; a constant q̃ in (0, ∞] for B and L.
        w: Admissible 2-microlocal weight.
        a: Peetre exponent of the maximal functions.
        variant: `"def"` for the dyadic definition, `"norm1"`..`"norm4"` for the continuous characterizations.

    Examples:
        >>> from varcoorbit.grid import SpatialGrid
        >>> from varcoorbit.weights import MicrolocalWeight
        >>> grid = SpatialGrid(n=64, period=16.0)
        >>> spec = SpaceSpec.constant("B", grid, p=2.0, q=math.inf, w=MicrolocalWeight())
        >>> spec.q
        inf
    """

    family: Family
    p: ExponentField
    q: ExponentField | float
    w: Weight2ML
    a: float = 4.0
    variant: Variant = "def"

    def __post_init__(self) -> None:
        if self.family not in _FUNCTION_FAMILIES | _X_FAMILIES:
            msg = f"Unknown space family {self.family!r}; expected one of F, B, P, L"
            raise InvalidSpaceSpecError(msg)
        if self.variant not in {"def", "norm1", "norm2", "norm3", "norm4"}:
            msg = f"Unknown norm variant {self.variant!r}"
            raise InvalidSpaceSpecError(msg)
        if not math.isfinite(self.p.p_plus):
            msg = "Integrability exponent must have finite p_plus"
            raise InvalidSpaceSpecError(msg)
        if self.family in _POINTWISE_Q:
            if not isinstance(self.q, ExponentField):
                msg = f"Family {self.family} needs a variable exponent q(·), found {qualified_type_name(self.q)}"
                raise InvalidSpaceSpecError(msg)
            if self.q.grid != self.p.grid:
                msg = "p(·) and q(·) must share the same grid"
                raise GridMismatchError(msg)
            if self.q.infinity_mask.any():
                msg = f"Family {self.family} requires q_plus < inf"
                raise InvalidSpaceSpecError(msg)
        else:
            if isinstance(self.q, ExponentField):
                msg = f"Family {self.family} takes a constant q, found an exponent field"
                raise InvalidSpaceSpecError(msg)
            if not float(self.q) > 0:
                msg = f"q must lie in (0, inf], found {self.q}"
                raise InvalidSpaceSpecError(msg)
        if not self.a > 0:
            msg = f"Peetre exponent must be positive, found a={self.a}"
            raise InvalidSpaceSpecError(msg)

    @classmethod
    def constant(
        cls,
        family: Family,
        grid: SpatialGrid,
        *,
        p: float,
        q: float,
        w: Weight2ML,
        a: float = 4.0,
        variant: Variant = "def",
    ) -> SpaceSpec:
        """Spec with constant exponents, promoting q to a field for the pointwise families."""
        q_value: ExponentField | float = ExponentField.constant(grid, q) if family in _POINTWISE_Q else float(q)
        return cls(family=family, p=ExponentField.constant(grid, p), q=q_value, w=w, a=a, variant=variant)

    @property
    def grid(self) -> SpatialGrid:
        return self.p.grid

    @property
    def q_minus(self) -> float:
        return self.q.p_minus if isinstance(self.q, ExponentField) else float(self.q)

    def with_variant(self, variant: Variant) -> SpaceSpec:
        return SpaceSpec(family=self.family, p=self.p, q=self.q, w=self.w, a=self.a, variant=variant)

    def refined(self, factor: int = 2) -> SpaceSpec:
        """Same space with its exponents re-sampled on `grid.refined(factor)`."""
        q = self.q.refined(factor) if isinstance(self.q, ExponentField) else self.q
        return SpaceSpec(family=self.family, p=self.p.refined(factor), q=q, w=self.w, a=self.a, variant=self.variant)

    def with_family(self, family: Family, weight: Weight2ML | None = None) -> SpaceSpec:
        """Same exponents under the sibling family (F ↔ P, B ↔ L), optionally with another weight."""
        return SpaceSpec(
            family=family, p=self.p, q=self.q, w=self.w if weight is None else weight, a=self.a, variant=self.variant
        )


def peetre_threshold(spec: SpaceSpec) -> float:
    """Lower bound d/p⁻ + α₃ (B, L) or max(d/p⁻, d/q⁻) + α₃ (F, P) on the Peetre exponent."""
    bound = DIMENSION / spec.p.p_minus
    if spec.family in _POINTWISE_Q:
        bound = max(bound, DIMENSION / spec.q_minus)
    return bound + spec.w.alpha3


def hypothesis_flags(spec: SpaceSpec, pair: AnalyzerPair | None = None) -> tuple[str, ...]:
    """Standing hypotheses of the continuous characterizations that the spec or the pair violates."""
    flags = []
    if spec.variant != "def" and not spec.a > peetre_threshold(spec):
        flags.append("peetre-exponent")
    if pair is not None:
        moments = moment_check(pair, max(math.ceil(spec.w.alpha2), 0))
        if not moments.vanishing_order + 1 > spec.w.alpha2:
            flags.append("moment-order")
    return tuple(flags)


def _log_abs(values: FloatArray) -> FloatArray:
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def mixed_norm_lq_lp(
    rows: FloatArray,
    p: ExponentField,
    q: float,
    weights: FloatArray | float = 1.0,
) -> float:
    """ℓ_q(L_{p(·)}) norm (Σ_k c_k ‖g_k‖_{p(·)}^q)^{1/q} of the rows g_k; `q = inf` takes the maximum.

    Examples:
        >>> from varcoorbit.grid import SpatialGrid
        >>> grid = SpatialGrid(n=8, period=8.0)
        >>> rows = np.array([np.ones(8), 2 * np.ones(8)])
        >>> round(mixed_norm_lq_lp(rows, ExponentField.constant(grid, 1.0), math.inf), 12)
        16.0
    """
    norms = luxemburg_rows(p, np.abs(rows))
    if math.isinf(q):
        return float(norms.max(initial=0.0))
    if not np.any(norms > 0):
        return 0.0
    log_c = np.log(np.broadcast_to(np.asarray(weights, dtype=np.float64), norms.shape))
    return float(np.exp(logsumexp(q * _log_abs(norms) + log_c) / q))


def mixed_norm_lp_lq(
    rows: FloatArray,
    p: ExponentField,
    q: ExponentField,
    weights: FloatArray | float = 1.0,
) -> float:
    """L_{p(·)}(ℓ_{q(·)}) norm ‖(Σ_k c_k |g_k|^{q(·)})^{1/q(·)}‖_{p(·)}, with the inner sum taken in log space."""
    rows = np.abs(np.atleast_2d(rows))
    if not np.any(rows > 0):
        return 0.0
    log_c = np.log(np.broadcast_to(np.asarray(weights, dtype=np.float64), rows.shape[:1]))[:, None]
    exponent = q.values[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = logsumexp(exponent * _log_abs(rows) + log_c, axis=0) / q.values
        pointwise = np.where(np.isneginf(inner), 0.0, np.exp(inner))
    return luxemburg_norm(p, GridSignal(grid=p.grid, values=pointwise))


def _combine(spec: SpaceSpec, weighted: FloatArray, weights: FloatArray | float) -> float:
    """Row 0 enters through its L_{p(·)} norm; the remaining rows through the family's mixed norm."""
    top = luxemburg_norm(spec.p, GridSignal(grid=spec.grid, values=weighted[0]))
    rest = weighted[1:]
    if rest.shape[0] == 0:
        return top
    if isinstance(spec.q, ExponentField):
        return top + mixed_norm_lp_lq(rest, spec.p, spec.q, weights)
    return top + mixed_norm_lq_lp(rest, spec.p, float(spec.q), weights)


def default_levels(grid: SpatialGrid) -> int:
    """Smallest J with 2^J >= π/h, so that Σ_{j<=J} φ_j = 1 on the whole working band."""
    return max(1, math.ceil(math.log2(grid.band)))


def _require(spec: SpaceSpec, families: frozenset[str], operation: str) -> None:
    if spec.family not in families:
        msg = f"{operation} is defined for families {sorted(families)}, found {spec.family!r}"
        raise InvalidSpaceSpecError(msg)


def _check_signal(spec: SpaceSpec, f: GridSignal) -> None:
    if f.grid != spec.grid:
        msg = f"Signal lives on {f.grid}, exponents on {spec.grid}"
        raise GridMismatchError(msg)


def _dyadic_bands(spec: SpaceSpec, f: GridSignal, pu: DyadicPU, levels: int) -> tuple[FloatArray, bool]:
    """|w_j·φ_j(D)f| for j = 0..J and whether the last band carries more than the truncation tolerance."""
    filters = pu.samples(f.grid, levels)
    bands = np.stack([convolve(phi / SQRT_2PI, f).values for phi in filters])
    weighted = weight_sequence(spec.w, levels, f.grid) * np.abs(bands)
    energy = float(np.sum(np.abs(f.values) ** 2))
    truncated = energy > 0 and float(np.sum(np.abs(bands[-1]) ** 2)) > TRUNCATION_TOLERANCE * energy
    return weighted, truncated


def _warn_truncation(levels: int) -> None:
    msg = f"Spectral mass beyond level {levels} exceeds {TRUNCATION_TOLERANCE:g}; increase the number of levels"
    warnings.warn(msg, TruncationWarning, stacklevel=3)


def _dyadic_norm(spec: SpaceSpec, f: GridSignal, pu: DyadicPU, levels: int | None) -> tuple[float, bool]:
    _check_signal(spec, f)
    levels = default_levels(f.grid) if levels is None else levels
    if levels < 1:
        msg = f"At least one dyadic level is required, found {levels}"
        raise InvalidParameterError(msg)
    weighted, truncated = _dyadic_bands(spec, f, pu, levels)
    if isinstance(spec.q, ExponentField):
        value = mixed_norm_lp_lq(weighted, spec.p, spec.q)
    else:
        value = mixed_norm_lq_lp(weighted, spec.p, float(spec.q))
    return value, truncated


def f_norm(spec: SpaceSpec, f: GridSignal, pu: DyadicPU | None = None, *, levels: int | None = None) -> float:
    """‖f | F^w_{p(·),q(·)}‖ = ‖(Σ_{j<=J} |w_j·φ_j(D)f|^{q(·)})^{1/q(·)}‖_{p(·)}.

    Arguments:
        spec: Space of family F.
        f: Signal on the spec's grid.
        pu: Dyadic partition of unity; the smooth one by default.
        levels: Last level J; by default the smallest level whose band covers the grid.

    Warns:
        TruncationWarning: If level J carries more than 1e-10 of the spectral energy of f.
    """
    _require(spec, frozenset({"F"}), "f_norm")
    value, truncated = _dyadic_norm(spec, f, pu or DyadicPU(), levels)
    if truncated:
        _warn_truncation(levels or default_levels(f.grid))
    return value


def b_norm(spec: SpaceSpec, f: GridSignal, pu: DyadicPU | None = None, *, levels: int | None = None) -> float:
    """‖f | B^w_{p(·),q}‖ = (Σ_{j<=J} ‖w_j·φ_j(D)f‖_{p(·)}^q)^{1/q}, the supremum over j for q = ∞.

    Warns:
        TruncationWarning: If level J carries more than 1e-10 of the spectral energy of f.
    """
    _require(spec, frozenset({"B"}), "b_norm")
    value, truncated = _dyadic_norm(spec, f, pu or DyadicPU(), levels)
    if truncated:
        _warn_truncation(levels or default_levels(f.grid))
    return value


def local_means(pair: AnalyzerPair, f: GridSignal, axis: ScaleAxis) -> XField:
    """A₁f: row 0 is Φ₀∗f and row m is Φ_{t_m}∗f with (Φ_t)^ = Φ̂(t·)."""
    rows = [convolve(dilate_filter(pair.phi0_hat, math.inf, f.grid), f).values]
    rows.extend(convolve(dilate_filter(pair.phi_hat, float(t), f.grid), f).values for t in axis.scales)
    return XField(grid=f.grid, axis=axis, values=np.stack(rows))


def _dyadic_peetre(spec: SpaceSpec, f: GridSignal, pair: AnalyzerPair, levels: int) -> FloatArray:
    scales = np.concatenate(([np.inf], 2.0 ** -np.arange(1, levels + 1, dtype=np.float64)))
    rows = np.stack([
        convolve(dilate_filter(pair.phi0_hat if math.isinf(t) else pair.phi_hat, float(t), f.grid), f).values
        for t in scales
    ])
    maximal = peetre_maximal_rows(np.abs(rows), scales, f.grid, spec.a)
    return weight_sequence(spec.w, levels, f.grid) * maximal


def norm_variant(spec: SpaceSpec, f: GridSignal, pair: AnalyzerPair, axis: ScaleAxis) -> float:
    """One of the four continuous characterizations of B^w_{p(·),q} or F^w_{p(·),q(·)}.

    * `norm1`: local means Φ_t∗f,
    * `norm2`: their Peetre maximal function,
    * `norm3`: their Peetre-Wiener maximal function,
    * `norm4`: Peetre maximal functions at the dyadic scales 2^{-j}, summed over j.

    The integral over t ∈ (0, 1) runs over the axis with the midpoint rule. Violated hypotheses are logged
    and reported by [`hypothesis_flags`][varcoorbit.spaces.hypothesis_flags]; the value is computed anyway.
    """
    _require(spec, _FUNCTION_FAMILIES, "norm_variant")
    _check_signal(spec, f)
    flags = hypothesis_flags(spec, pair)
    if flags:
        logger.warning("Continuous characterization %s outside its hypotheses: %s", spec.variant, ", ".join(flags))

    if spec.variant == "norm4":
        levels = max(1, round(axis.octaves * math.log2(axis.base)))
        return _combine(spec, _dyadic_peetre(spec, f, pair, levels), 1.0)

    means = local_means(pair, f, axis)
    if spec.variant == "norm1":
        magnitude = np.abs(means.values)
    elif spec.variant == "norm2":
        magnitude = peetre_maximal(means, spec.a).values.real
    elif spec.variant == "norm3":
        magnitude = peetre_wiener_maximal(means, spec.a).values.real
    else:
        msg = f"norm_variant needs one of norm1..norm4, found {spec.variant!r}"
        raise InvalidSpaceSpecError(msg)
    weighted = spec.w.on_cells(f.grid, axis) * magnitude
    return _combine(spec, weighted, axis.log_weight)


def _x_norm(spec: SpaceSpec, xfield: XField) -> float:
    if xfield.grid != spec.grid:
        msg = f"Field lives on {xfield.grid}, exponents on {spec.grid}"
        raise GridMismatchError(msg)
    maximal = peetre_wiener_maximal(xfield, spec.a).values.real
    weighted = spec.w.on_cells(xfield.grid, xfield.axis) * maximal
    return _combine(spec, weighted, xfield.axis.log_weight)


def pw_norm(spec: SpaceSpec, xfield: XField) -> float:
    """‖F | P^w_{p(·),q(·)}‖ built on the Peetre-Wiener maximal function P*_aF.

    ‖w(·,∞)P*_aF(·,∞)‖_{p(·)} + ‖(∫₀¹ [w(·,t)P*_aF(·,t)]^{q(·)} dt/t)^{1/q(·)}‖_{p(·)}.
    """
    _require(spec, frozenset({"P"}), "pw_norm")
    return _x_norm(spec, xfield)


def lw_norm(spec: SpaceSpec, xfield: XField) -> float:
    """‖F | L^w_{p(·),q}‖ = ‖w(·,∞)P*_aF(·,∞)‖_{p(·)} + (∫₀¹ ‖w(·,t)P*_aF(·,t)‖_{p(·)}^q dt/t)^{1/q}."""
    _require(spec, frozenset({"L"}), "lw_norm")
    return _x_norm(spec, xfield)


def space_norm(spec: SpaceSpec, xfield: XField) -> float:
    """Norm of a field in the X-space of the spec, P or L."""
    _require(spec, _X_FAMILIES, "space_norm")
    return _x_norm(spec, xfield)


def seq_norms(spec: SpaceSpec, coeffs: SeqCoeffs) -> tuple[float, float]:
    """Norms of a coefficient sequence in Y♭ and Y♮.

    Returns:
        `(flat, natural)` with flat = ‖Σ_i |λ_i|χ_{U_i}‖_Y and natural = ‖Σ_i |λ_i|μ(U_i)^{-1}χ_{U_i}‖_Y.
    """
    covering = coeffs.covering
    magnitude = np.abs(coeffs.entries)
    flat = covering.indicator_field(magnitude)
    natural = covering.indicator_field(magnitude / covering.masses)
    return space_norm(spec, flat), space_norm(spec, natural)


def decomposition_norm(spec: SpaceSpec, field: XField, covering: Covering) -> float:
    """‖Σ_i sup_{U_i}|F|·χ_{U_i}‖_Y, the norm of F in the decomposition space D(Y, U)."""
    return space_norm(spec, covering.indicator_field(covering.local_sup(field)))


def geometric_smoothing(delta: float, g: FloatArray) -> FloatArray:
    """G_ℓ = Σ_k 2^{-|ℓ-k|δ} g_k along the first axis.

    Examples:
        >>> geometric_smoothing(1.0, np.array([0.0, 1.0, 0.0])).tolist()
        [0.5, 1.0, 0.5]
    """
    if not delta > 0:
        msg = f"Smoothing decay must be positive, found {delta}"
        raise InvalidParameterError(msg)
    g = np.asarray(g, dtype=np.float64)
    index = np.arange(g.shape[0])
    kernel = 2.0 ** (-np.abs(index[:, None] - index[None, :]) * delta)
    return np.tensordot(kernel, g, axes=(1, 0))


def quasi_triangle_constant(spec: SpaceSpec) -> float:
    """C_Y = 2^{1/r - 1} with r = min(1, p⁻, q⁻).

    Examples:
        >>> from varcoorbit.grid import SpatialGrid
        >>> from varcoorbit.weights import MicrolocalWeight
        >>> spec = SpaceSpec.constant("L", SpatialGrid(n=8), p=0.5, q=2.0, w=MicrolocalWeight())
        >>> quasi_triangle_constant(spec)
        2.0
    """
    r = min(1.0, spec.p.p_minus, spec.q_minus)
    return 2.0 ** (1.0 / r - 1.0)


def aoki_rolewicz_exponent(c_y: float) -> float:
    """Exponent r = 1/(log₂ C_Y + 1) for which the quasi-norm is equivalent to an r-norm."""
    if not c_y >= 1:
        msg = f"Quasi-triangle constant must be >= 1, found {c_y}"
        raise InvalidParameterError(msg)
    return 1.0 / (math.log2(c_y) + 1.0)


@dataclass(frozen=True, slots=True, kw_only=True)
class NormReport:
    """Outcome of a single norm evaluation, with the caveats met on the way."""

    family: str
    variant: str
    value: float
    flags: tuple[str, ...] = ()

    def to_record(self) -> NormRecord:
        return {"family": self.family, "variant": self.variant, "value": self.value, "flags": list(self.flags)}


def evaluate_norm(
    spec: SpaceSpec,
    f: GridSignal,
    *,
    pu: DyadicPU | None = None,
    pair: AnalyzerPair | None = None,
    axis: ScaleAxis | None = None,
    levels: int | None = None,
    check_refinement: bool = False,
) -> NormReport:
    """Evaluate the spec's variant and collect caveats as flags instead of warning.

    Flags are `"truncation"` when the dyadic definition leaves spectral mass beyond its finest level, the
    hypotheses of [`hypothesis_flags`][varcoorbit.spaces.hypothesis_flags] for the continuous variants, and
    `"discretization"` when `check_refinement` is set and re-evaluating on a grid refined by 2 moves the value by
    [`DISCRETIZATION_TOLERANCE`][varcoorbit.varexp.DISCRETIZATION_TOLERANCE] or more.
    """
    _require(spec, _FUNCTION_FAMILIES, "evaluate_norm")
    if spec.variant != "def" and (pair is None or axis is None):
        msg = f"Variant {spec.variant} needs an analyzing pair and a scale axis"
        raise InvalidParameterError(msg)

    def _evaluate(spec: SpaceSpec, f: GridSignal) -> tuple[float, bool]:
        if spec.variant == "def":
            return _dyadic_norm(spec, f, pu or DyadicPU(), levels)
        return norm_variant(spec, f, pair, axis), False  # type: ignore[arg-type]

    value, truncated = _evaluate(spec, f)
    flags = ["truncation"] if truncated else []
    if spec.variant != "def":
        flags.extend(hypothesis_flags(spec, pair))
    if check_refinement:
        fine, _ = _evaluate(spec.refined(), f.refined())
        change = relative_change(value, fine)
        logger.debug("%s %s norm %g -> %g under refinement", spec.family, spec.variant, value, fine)
        if change >= DISCRETIZATION_TOLERANCE:
            flags.append("discretization")
    return NormReport(family=spec.family, variant=spec.variant, value=value, flags=tuple(flags))


@dataclass(frozen=True, slots=True, kw_only=True)
class EquivalenceStudy:
    """Norm values of a battery under several variants and the ratio bands between every pair of variants.

    Attributes:
        values: `values[variant][i]` is the norm of the i-th battery signal.
        bands: `(min, max)` of `values[v] / values[u]` over the nonzero signals, keyed by `(u, v)`.
    """

    variants: tuple[str, ...]
    values: Mapping[str, tuple[float, ...]]
    bands: Mapping[tuple[str, str], tuple[float, float]] = field(default_factory=dict)

    def band_width(self, left: str, right: str) -> float:
        """max/min of the ratio band, 1 for exactly proportional variants."""
        low, high = self.bands[left, right]
        return high / low

    def rows(self) -> list[dict[str, object]]:
        """Long-format records `(signal_id, variant, value)`."""
        return [
            {"signal_id": i, "variant": variant, "value": value}
            for variant in self.variants
            for i, value in enumerate(self.values[variant])
        ]


def equivalence_study(
    spec: SpaceSpec,
    battery: Sequence[GridSignal] | Iterable[GridSignal],
    *,
    pair: AnalyzerPair,
    axis: ScaleAxis,
    variants: Sequence[Variant] = ("def", "norm1", "norm2", "norm3", "norm4"),
    pu: DyadicPU | None = None,
) -> EquivalenceStudy:
    """Empirical equivalence bands between norm variants over a signal battery.

    Raises:
        InvalidParameterError: If the battery is empty.
    """
    battery = list(battery)
    if not battery:
        msg = "Equivalence study needs a nonempty battery"
        raise InvalidParameterError(msg)
    values: dict[str, tuple[float, ...]] = {}
    for variant in variants:
        variant_spec = spec.with_variant(variant)
        values[variant] = tuple(
            evaluate_norm(variant_spec, f, pu=pu, pair=pair, axis=axis).value for f in battery
        )
        logger.debug("Variant %s evaluated on %d signals", variant, len(battery))

    bands = {}
    for left, right in itertools.permutations(variants, 2):
        lhs, rhs = np.array(values[left]), np.array(values[right])
        nonzero = (lhs > 0) & (rhs > 0)
        if nonzero.any():
            ratios = rhs[nonzero] / lhs[nonzero]
            bands[left, right] = (float(ratios.min()), float(ratios.max()))
    return EquivalenceStudy(variants=tuple(variants), values=values, bands=bands)
