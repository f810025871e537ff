"""2-microlocal weights w(x, t) on X, their class parameters and the associated reservoir weight ν."""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, TypeAlias

import numpy as np

from varcoorbit.exceptions import InvalidParameterError

if TYPE_CHECKING:
    from collections.abc import Mapping

    from typing_extensions import Self

    from varcoorbit.grid import ScaleAxis, SpatialGrid, XField
    from varcoorbit.typing import FloatArray, WeightFunc
    from varcoorbit.varexp import ExponentField

__all__ = (
    "AdmissibilityReport",
    "CallableWeight",
    "ClassEstimate",
    "MicrolocalWeight",
    "ReservoirWeight",
    "TildeWeight",
    "Weight2ML",
    "check_admissible",
    "embedding_ratio",
    "estimate_class_parameters",
    "m_nu",
    "make_weight",
    "weight_sequence",
    "wtilde",
)

logger = logging.getLogger(__name__)

XPoint: TypeAlias = "tuple[FloatArray | float, FloatArray | float]"

DEFAULT_TOLERANCE = 1e-10
SAMPLE_RADIUS = 16.0
SMALLEST_SCALE = 1e-4


def _split_sheets(t: FloatArray) -> tuple[FloatArray, FloatArray]:
    # Finite-scale values with t = ∞ replaced by 1, and the ∞ mask
    t = np.asarray(t, dtype=np.float64)
    at_infinity = np.isinf(t)
    return np.where(at_infinity, 1.0, t), at_infinity


class Weight2ML(ABC):
    """Abstract weight w: X → (0, ∞) of the class W^{α₃}_{α₁,α₂}.

    Concrete weights implement `evaluate`, which receives broadcastable arrays `x` and `t`; entries with
    `t = inf` address the ∞ sheet.

    Attributes:
        alpha1: Lower scale exponent.
        alpha2: Upper scale exponent, `alpha2 >= alpha1`.
        alpha3: Spatial transfer exponent, nonnegative.

    Examples:
        >>> import numpy as np
        >>> w = MicrolocalWeight(s=1.0, sprime=0.0)
        >>> w.evaluate(np.array([0.0, 3.0]), np.array([0.5, np.inf])).tolist()
        [2.0, 1.0]
    """

    alpha1: float
    alpha2: float
    alpha3: float

    def __init__(self, alpha1: float, alpha2: float, alpha3: float) -> None:
        if alpha1 > alpha2:
            msg = f"Class parameters need alpha1 <= alpha2, found {alpha1} > {alpha2}"
            raise InvalidParameterError(msg)
        if alpha3 < 0:
            msg = f"Class parameter alpha3 must be nonnegative, found {alpha3}"
            raise InvalidParameterError(msg)
        self.alpha1, self.alpha2, self.alpha3 = float(alpha1), float(alpha2), float(alpha3)

    @abstractmethod
    def evaluate(self, x: FloatArray, t: FloatArray) -> FloatArray:
        """Evaluate w(x, t) elementwise; `t = inf` selects the ∞ sheet."""
        ...

    def __call__(self, x: FloatArray | float, t: FloatArray | float) -> FloatArray:
        return self.evaluate(np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))

    def on_cells(self, grid: SpatialGrid, axis: ScaleAxis) -> FloatArray:
        """Weight sampled on every cell of an XField, shape `(axis.size + 1, grid.n)`."""
        return self.evaluate(grid.nodes[None, :], axis.slot_scales[:, None])

    @property
    def class_parameters(self) -> tuple[float, float, float]:
        return (self.alpha1, self.alpha2, self.alpha3)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(alpha1={self.alpha1}, alpha2={self.alpha2}, alpha3={self.alpha3})"


class MicrolocalWeight(Weight2ML):
    """The 2-microlocal weight w_{s,s′}(x, t) = t^{-s}(1 + |x - x₀|/t)^{s′}.

    On the ∞ sheet it is (1 + |x - x₀|)^{s′}.
    Its class parameters are α₁ = s + min(s′, 0), α₂ = s + max(s′, 0) and α₃ = |s′|.
    """

    def __init__(self, s: float = 0.0, sprime: float = 0.0, x0: float = 0.0) -> None:
        self.s, self.sprime, self.x0 = float(s), float(sprime), float(x0)
        super().__init__(s + min(sprime, 0.0), s + max(sprime, 0.0), abs(sprime))

    def evaluate(self, x: FloatArray, t: FloatArray) -> FloatArray:
        tt, at_infinity = _split_sheets(t)
        dist = np.abs(np.asarray(x, dtype=np.float64) - self.x0)
        finite = tt ** (-self.s) * (1.0 + dist / tt) ** self.sprime
        return np.where(at_infinity, (1.0 + dist) ** self.sprime, finite)

    def __repr__(self) -> str:
        return f"MicrolocalWeight(s={self.s}, sprime={self.sprime}, x0={self.x0})"


class CallableWeight(Weight2ML):
    """User-supplied weight with declared class parameters.

    The parameters are taken on trust; [`check_admissible`][varcoorbit.weights.check_admissible] verifies them.
    """

    def __init__(
        self, func: WeightFunc, *, alpha1: float, alpha2: float, alpha3: float, name: str = "callable"
    ) -> None:
        self.func = func
        self.name = name
        super().__init__(alpha1, alpha2, alpha3)

    def evaluate(self, x: FloatArray, t: FloatArray) -> FloatArray:
        return np.asarray(self.func(x, t), dtype=np.float64)

    def __repr__(self) -> str:
        params = f"alpha1={self.alpha1}, alpha2={self.alpha2}, alpha3={self.alpha3}"
        return f"CallableWeight(name={self.name!r}, {params})"


class TildeWeight(Weight2ML):
    """The weight w̃(x, t) = t^{-1/2}·w(x, t) on the finite sheet, unchanged on the ∞ sheet."""

    def __init__(self, base: Weight2ML) -> None:
        self.base = base
        super().__init__(base.alpha1 + 0.5, base.alpha2 + 0.5, base.alpha3)

    def evaluate(self, x: FloatArray, t: FloatArray) -> FloatArray:
        tt, at_infinity = _split_sheets(t)
        return self.base.evaluate(x, t) * np.where(at_infinity, 1.0, tt**-0.5)

    def __repr__(self) -> str:
        return f"TildeWeight({self.base!r})"


def wtilde(w: Weight2ML) -> TildeWeight:
    """Return w̃ with class parameters (α₁ + 1/2, α₂ + 1/2, α₃).

    Examples:
        >>> w = wtilde(MicrolocalWeight())
        >>> w(0.0, 0.25).item(), w(0.0, float("inf")).item()
        (2.0, 1.0)
    """
    return TildeWeight(w)


def make_weight(name: str, params: Mapping[str, Any] | None = None) -> Weight2ML:
    """Build a weight by configuration name.

    Arguments:
        name: `"w2ml"` for [`MicrolocalWeight`][varcoorbit.weights.MicrolocalWeight], `"constant"` for w ≡ 1.
        params: Keyword parameters of the weight (`s`, `sprime`, `x0` for `"w2ml"`).

    Raises:
        InvalidParameterError: For unknown names or parameters.
    """
    params = dict(params or {})
    if name == "constant":
        if params:
            msg = f"The constant weight takes no parameters, found {sorted(params)}"
            raise InvalidParameterError(msg)
        return MicrolocalWeight()
    if name == "w2ml":
        unknown = set(params) - {"s", "sprime", "x0"}
        if unknown:
            msg = f"Unknown w2ml parameters {sorted(unknown)}; expected s, sprime, x0"
            raise InvalidParameterError(msg)
        return MicrolocalWeight(**params)
    msg = f"Unknown weight {name!r}; expected 'w2ml' or 'constant'"
    raise InvalidParameterError(msg)


def weight_sequence(w: Weight2ML, j_max: int, grid: SpatialGrid) -> FloatArray:
    """Semi-discrete weights w₀(x) = w(x, ∞) and w_j(x) = w(x, 2^{-j}) for 1 <= j <= j_max.

    Returns:
        Array of shape `(j_max + 1, grid.n)`.

    Examples:
        >>> from varcoorbit.grid import SpatialGrid
        >>> seq = weight_sequence(MicrolocalWeight(s=1.0), 3, SpatialGrid(n=8))
        >>> seq[:, 0].tolist()
        [1.0, 2.0, 4.0, 8.0]
    """
    if j_max < 0:
        msg = f"j_max must be nonnegative, found {j_max}"
        raise InvalidParameterError(msg)
    scales = np.concatenate(([np.inf], 2.0 ** -np.arange(1, j_max + 1, dtype=np.float64)))
    return w.evaluate(grid.nodes[None, :], scales[:, None])


@dataclass(frozen=True, slots=True)
class _Samples:
    x: FloatArray
    y: FloatArray
    s: FloatArray
    t: FloatArray
    c: FloatArray


def _draw_samples(size: int, seed: int, radius: float) -> _Samples:
    rng = np.random.default_rng(seed)
    # Points cluster near the origin so that both |x - y| << t and |x - y| >> t are hit
    x = radius * rng.uniform(-1.0, 1.0, size) ** 5
    y = radius * rng.uniform(-1.0, 1.0, size) ** 5
    log_lo = math.log(SMALLEST_SCALE)
    s = np.exp(rng.uniform(log_lo, 0.0, size))
    t = np.exp(rng.uniform(log_lo, 0.0, size))
    c = rng.uniform(0.01, 1.0, size)
    return _Samples(x=x, y=y, s=s, t=t, c=c)


def _excess(log_lhs: FloatArray, log_rhs: FloatArray) -> float:
    # Largest amount by which log(lhs) exceeds log(rhs), i.e. a relative violation
    return float(max(0.0, np.max(log_lhs - log_rhs))) if log_lhs.size else 0.0


@dataclass(frozen=True, slots=True, kw_only=True)
class AdmissibilityReport:
    """Largest log-violations of the class conditions over a random sample.

    The keys of `violations` are `w1_lower`, `w1_upper`, `w1_infinity_lower`, `w1_infinity_upper`, `w2`,
    `w2_infinity`, `w1_reverse`, `st1`, `st2` and `comparability`.
    """

    alpha1: float
    alpha2: float
    alpha3: float
    samples: int
    violations: dict[str, float] = field(default_factory=dict)
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def passes(self) -> bool:
        return all(value <= self.tolerance for value in self.violations.values())

    @property
    def worst(self) -> tuple[str, float]:
        """Name and size of the largest violation."""
        return max(self.violations.items(), key=lambda item: item[1])


def check_admissible(
    w: Weight2ML,
    sample_budget: int = 2000,
    *,
    seed: int = 0,
    radius: float = SAMPLE_RADIUS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> AdmissibilityReport:
    """Check (W1), (W2) and the estimates derived from them on sampled tuples (x, y, s, t).

    All comparisons are made between logarithms, so a violation is the log of the ratio by which an
    inequality fails.

    Arguments:
        w: Weight with declared class parameters.
        sample_budget: Number of sampled tuples.
        seed: Seed of the sampler.
        radius: Spatial sampling radius.
        tolerance: Largest violation still counted as a pass.

    Examples:
        >>> check_admissible(MicrolocalWeight(s=1.0), 200).passes
        True
    """
    a1, a2, a3 = w.class_parameters
    smp = _draw_samples(sample_budget, seed, radius)
    big, small = np.maximum(smp.s, smp.t), np.minimum(smp.s, smp.t)

    def log_w(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.log(w.evaluate(x, t))

    violations: dict[str, float] = {}
    # growth across scales, s >= t
    log_q = np.log(big / small)
    diff = log_w(smp.x, small) - log_w(smp.x, big)
    violations["w1_lower"] = _excess(a1 * log_q, diff)
    violations["w1_upper"] = _excess(diff, a2 * log_q)
    # growth towards the ∞ sheet
    inf = np.full_like(smp.t, np.inf)
    diff_inf = log_w(smp.x, smp.t) - log_w(smp.x, inf)
    log_inv_t = -np.log(smp.t)
    violations["w1_infinity_lower"] = _excess(a1 * log_inv_t, diff_inf)
    violations["w1_infinity_upper"] = _excess(diff_inf, a2 * log_inv_t)
    # spatial moderation
    dist = np.abs(smp.x - smp.y)
    violations["w2"] = _excess(log_w(smp.x, smp.t) - log_w(smp.y, smp.t), a3 * np.log1p(dist / smp.t))
    violations["w2_infinity"] = _excess(log_w(smp.x, inf) - log_w(smp.y, inf), a3 * np.log1p(dist))
    # s <= t: reverse sandwich
    diff_rev = log_w(smp.x, big) - log_w(smp.x, small)
    log_r = np.log(small / big)
    violations["w1_reverse"] = _excess(a2 * log_r, diff_rev) + _excess(diff_rev, a1 * log_r)
    # 0 < c < s/t and 0 < c < t/s, with (s, t) in sampled order
    ratio = smp.s / smp.t
    diff_st = log_w(smp.x, smp.t) - log_w(smp.x, smp.s)
    for key, c, exponent in (("st1", smp.c * ratio, a2), ("st2", smp.c / ratio, a1)):
        log_const = np.maximum(0.0, (a1 - a2) * np.log(c))
        violations[key] = _excess(diff_st, log_const + exponent * np.log(ratio))
    # s/t in [1/2, 2]
    near = np.clip(smp.t * 2.0 ** (2.0 * smp.c - 1.0), None, 1.0 - 1e-12)
    log_comp = max(0.0, (a2 - a1) * math.log(2.0)) + max(abs(a1), abs(a2)) * math.log(2.0)
    diff_near = np.abs(log_w(smp.x, smp.t) - log_w(smp.x, near))
    violations["comparability"] = _excess(diff_near, np.full_like(diff_near, log_comp))

    report = AdmissibilityReport(
        alpha1=a1, alpha2=a2, alpha3=a3, samples=sample_budget, violations=violations, tolerance=tolerance
    )
    if not report.passes:
        logger.warning("Weight %r violates %s by %.3g", w, *report.worst)
    return report


@dataclass(frozen=True, slots=True, kw_only=True)
class ClassEstimate:
    """Tightest class parameters consistent with a sample of quotients."""

    alpha1: float
    alpha2: float
    alpha3: float


def estimate_class_parameters(
    w: Weight2ML, samples: int = 2000, *, seed: int = 0, radius: float = SAMPLE_RADIUS
) -> ClassEstimate:
    """Empirical extremes of the scale and spatial exponents of `w`.

    Uses the same sampler as [`check_admissible`][varcoorbit.weights.check_admissible], so a weight declared
    with the returned parameters passes (W1) and (W2) on that sample.
    """
    smp = _draw_samples(samples, seed, radius)
    big, small = np.maximum(smp.s, smp.t), np.minimum(smp.s, smp.t)
    keep = big / small > 1.0 + 1e-6

    def log_w(x: FloatArray, t: FloatArray) -> FloatArray:
        return np.log(w.evaluate(x, t))

    scale_exp = (log_w(smp.x, small) - log_w(smp.x, big))[keep] / np.log(big / small)[keep]
    inf = np.full_like(smp.t, np.inf)
    inf_exp = (log_w(smp.x, smp.t) - log_w(smp.x, inf)) / -np.log(smp.t)
    exponents = np.concatenate((scale_exp, inf_exp))

    dist = np.abs(smp.x - smp.y)
    far = dist > 0
    spatial = np.concatenate(
        (
            (log_w(smp.x, smp.t) - log_w(smp.y, smp.t))[far] / np.log1p(dist / smp.t)[far],
            (log_w(smp.x, inf) - log_w(smp.y, inf))[far] / np.log1p(dist)[far],
        )
    )
    return ClassEstimate(
        alpha1=float(exponents.min()),
        alpha2=float(exponents.max()),
        alpha3=float(max(0.0, spatial.max())),
    )


class ReservoirWeight:
    """Associated weight ν(x, t) = κ·t^{α₁ - 1/p⁻}(1 + |x|)^{α₃}, and κ(1 + |x|)^{α₃} at t = ∞.

    The factor κ >= 1 is chosen by [`associated`][varcoorbit.weights.ReservoirWeight.associated] so that ν >= 1
    on the working window.
    """

    __slots__ = ("alpha1", "alpha3", "p_minus", "scale")

    def __init__(self, *, alpha1: float, alpha3: float, p_minus: float, scale: float = 1.0) -> None:
        if not p_minus > 0:
            msg = f"p_minus must be positive, found {p_minus}"
            raise InvalidParameterError(msg)
        if not scale > 0:
            msg = f"Rescaling factor must be positive, found {scale}"
            raise InvalidParameterError(msg)
        self.alpha1, self.alpha3, self.p_minus, self.scale = alpha1, alpha3, p_minus, scale

    @classmethod
    def associated(cls, w: Weight2ML, p: ExponentField, axis: ScaleAxis) -> Self:
        """Associated weight of (w, p), normalized to be at least 1 on the grid of `p` and on `axis`."""
        raw = cls(alpha1=w.alpha1, alpha3=w.alpha3, p_minus=p.p_minus)
        smallest = float(raw.evaluate_cells(p.grid, axis).min())
        scale = 1.0 / smallest if smallest < 1 else 1.0
        logger.debug("Associated weight rescaled by %g", scale)
        return cls(alpha1=w.alpha1, alpha3=w.alpha3, p_minus=p.p_minus, scale=scale)

    @property
    def scale_exponent(self) -> float:
        return self.alpha1 - 1.0 / self.p_minus

    def evaluate(self, x: FloatArray | float, t: FloatArray | float) -> FloatArray:
        tt, at_infinity = _split_sheets(np.asarray(t, dtype=np.float64))
        spatial = (1.0 + np.abs(np.asarray(x, dtype=np.float64))) ** self.alpha3
        return self.scale * spatial * np.where(at_infinity, 1.0, tt**self.scale_exponent)

    def evaluate_cells(self, grid: SpatialGrid, axis: ScaleAxis) -> FloatArray:
        return self.evaluate(grid.nodes[None, :], axis.slot_scales[:, None])

    def __repr__(self) -> str:
        return (
            f"ReservoirWeight(alpha1={self.alpha1}, alpha3={self.alpha3}, p_minus={self.p_minus}, "
            f"scale={self.scale})"
        )


def m_nu(nu: ReservoirWeight, x: XPoint, y: XPoint) -> FloatArray:
    """Two-point weight m_ν(x, y) = max(ν(x)/ν(y), ν(y)/ν(x)) for X-points given as (position, scale).

    Examples:
        >>> nu = ReservoirWeight(alpha1=0.0, alpha3=1.0, p_minus=2.0)
        >>> float(m_nu(nu, (0.0, float("inf")), (1.0, float("inf"))))
        2.0
    """
    left, right = nu.evaluate(*x), nu.evaluate(*y)
    return np.maximum(left / right, right / left)


def embedding_ratio(nu: ReservoirWeight, xfield: XField, norm: float) -> float:
    """Ratio sup |F|/ν over the field divided by its norm in a Peetre-Wiener space.

    The embedding into L_∞ with weight 1/ν states that this ratio stays bounded.
    """
    if norm == 0:
        return 0.0
    nu_cells = nu.evaluate_cells(xfield.grid, xfield.axis)
    return float(np.max(np.abs(xfield.values) / nu_cells)) / norm
