"""Variable-exponent Lebesgue machinery: exponent fields, the modular, Luxemburg norm and maximal operators."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np
from scipy import fft as sp_fft
from scipy import optimize
from scipy.special import logsumexp

from varcoorbit.exceptions import BracketError, GridMismatchError, InvalidParameterError
from varcoorbit.grid import GridSignal, SpatialGrid
from varcoorbit.serde import deserialize_generator

if TYPE_CHECKING:
    from collections.abc import Callable

    from typing_extensions import Self

    from varcoorbit.typing import FloatArray, IntArray

__all__ = (
    "DISCRETIZATION_TOLERANCE",
    "EXPONENT_GENERATORS",
    "ExponentField",
    "LogHolderReport",
    "MaximalRatio",
    "eta_convolve",
    "hl_maximal",
    "holder_defect",
    "log_holder_report",
    "luxemburg_norm",
    "luxemburg_refinement",
    "make_exponent",
    "maximal_ratio",
    "modular",
    "relative_change",
)

logger = logging.getLogger(__name__)

BRACKET_OCTAVES = 60
MAX_ITERATIONS = 200
MAX_BRACKET_EXPANSIONS = 64
JUMP_RATIO = 0.95
DISCRETIZATION_TOLERANCE = 1e-4
"""Largest relative change under grid refinement before a result is flagged as discretization-limited."""


@dataclass(frozen=True, slots=True, kw_only=True, eq=False)
class ExponentField:
    """A variable exponent p(·) sampled on a grid, with values in (0, ∞]."""

    grid: SpatialGrid
    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.n,):
            msg = f"Expected {self.grid.n} exponent values, found shape {values.shape}"
            raise InvalidParameterError(msg)
        if np.any(np.isnan(values)) or not np.all(values > 0):
            msg = f"Exponents must lie in (0, inf], found minimum {np.nanmin(values)}"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: SpatialGrid, p0: float) -> Self:
        return cls(grid=grid, values=np.full(grid.n, float(p0)))

    @property
    def infinity_mask(self) -> np.ndarray:
        return np.isinf(self.values)

    @property
    def p_minus(self) -> float:
        return float(self.values.min())

    @property
    def p_plus(self) -> float:
        """Largest finite value; infinite when every node carries p = ∞."""
        finite = self.values[~self.infinity_mask]
        return float(finite.max()) if finite.size else math.inf

    def reciprocal(self) -> FloatArray:
        """1/p with 1/∞ = 0."""
        return np.where(self.infinity_mask, 0.0, 1.0 / np.where(self.infinity_mask, 1.0, self.values))

    def conjugate(self) -> ExponentField:
        """Dual exponent p′ with 1/p + 1/p′ = 1; requires p >= 1."""
        if self.p_minus < 1:
            msg = f"Dual exponent requires p >= 1, found p_minus={self.p_minus}"
            raise InvalidParameterError(msg)
        recip = 1.0 - self.reciprocal()
        dual = np.where(recip == 0, np.inf, 1.0 / np.where(recip == 0, 1.0, recip))
        return ExponentField(grid=self.grid, values=dual)

    def refined(self, factor: int = 2) -> ExponentField:
        """Exponent on `grid.refined(factor)`, interpolating 1/p linearly around the torus.

        p = ∞ survives only between two ∞ nodes.
        """
        fine = self.grid.refined(factor)
        g = np.interp(fine.nodes, self.grid.nodes, self.reciprocal(), period=self.grid.period)
        with np.errstate(divide="ignore"):
            return ExponentField(grid=fine, values=1.0 / g)


def _exp_constant(grid: SpatialGrid, *, p0: float = 2.0) -> FloatArray:
    return np.full(grid.n, float(p0))


def _exp_sin(grid: SpatialGrid, *, base: float = 2.0, amplitude: float = 1.0, power: float = 2.0) -> FloatArray:
    return base + amplitude * np.abs(np.sin(grid.nodes)) ** power


def _exp_cos(grid: SpatialGrid, *, base: float = 2.0, amplitude: float = 1.0, power: float = 2.0) -> FloatArray:
    return base + amplitude * np.abs(np.cos(grid.nodes)) ** power


def _exp_two_level(grid: SpatialGrid, *, left: float = 1.0, right: float = 3.0) -> FloatArray:
    return np.where(grid.nodes < 0, float(left), float(right))


def _exp_log_decay(grid: SpatialGrid, *, p_inf: float = 2.0, amplitude: float = 1.0) -> FloatArray:
    return p_inf + amplitude / np.log(np.e + np.abs(grid.nodes))


EXPONENT_GENERATORS: dict[str, Callable[..., FloatArray]] = {
    "constant": _exp_constant,
    "sin-perturbed": _exp_sin,
    "cos-perturbed": _exp_cos,
    "two-level": _exp_two_level,
    "log-decay": _exp_log_decay,
}


def make_exponent(spec: str, grid: SpatialGrid) -> ExponentField:
    """Build an exponent field from a generator spec such as `"sin-perturbed(base=2.0, amplitude=1.0)"`.

    A bare number is read as a constant exponent; `"inf"` gives p ≡ ∞.
    """
    try:
        p0 = float(spec)
    except ValueError:
        pass
    else:
        return ExponentField.constant(grid, p0)
    name, params = deserialize_generator(spec)
    if (builder := EXPONENT_GENERATORS.get(name)) is None:
        msg = f"Unknown exponent generator {name!r}; expected one of {sorted(EXPONENT_GENERATORS)}"
        raise InvalidParameterError(msg)
    return ExponentField(grid=grid, values=builder(grid, **params))


def _ensure_grid(p: ExponentField, *signals: GridSignal) -> None:
    for s in signals:
        if s.grid != p.grid:
            msg = f"Exponent lives on {p.grid} but signal lives on {s.grid}"
            raise GridMismatchError(msg)


def _modular(abs_f: FloatArray, p: FloatArray, step: float) -> float:
    finite = ~np.isinf(p)
    total = float(np.sum(abs_f[finite] ** p[finite]) * step)
    if (~finite).any():
        total += float(abs_f[~finite].max())
    return total


def modular(p: ExponentField, f: GridSignal) -> float:
    """Modular ρ(f) = Σ_{p<∞} |f|^p·h + max_{p=∞} |f|.

    Examples:
        >>> grid = SpatialGrid(n=64, period=8.0)
        >>> indicator = GridSignal(grid=grid, values=((grid.nodes >= -0.5) & (grid.nodes < 0.5)).astype(float))
        >>> modular(ExponentField.constant(grid, 3.0), indicator)
        1.0
    """
    _ensure_grid(p, f)
    return _modular(f.magnitude, p.values, p.grid.step)


def _log_modular(log_f: FloatArray, p: FloatArray, log_step: float, u: float) -> float:
    # log ρ(f·e^{-u}); log_f holds log|f| on the support of f only
    finite = ~np.isinf(p)
    parts = []
    if finite.any():
        parts.append(float(logsumexp(p[finite] * (log_f[finite] - u))) + log_step)
    if (~finite).any():
        parts.append(float(log_f[~finite].max()) - u)
    return float(np.logaddexp.reduce(parts))


def _luxemburg(abs_f: FloatArray, p: FloatArray, step: float, period: float) -> float:
    support = abs_f > 0
    if not support.any():
        return 0.0
    log_f = np.log(abs_f[support])
    p_s = p[support]
    log_step = math.log(step)

    def objective(u: float) -> float:
        return _log_modular(log_f, p_s, log_step, u)

    peak = float(abs_f.max())
    center = math.log(peak + period * peak)
    span = BRACKET_OCTAVES * math.log(2.0)
    lo, hi = center - span, center + span
    for _ in range(MAX_BRACKET_EXPANSIONS):
        if objective(lo) > 0 and objective(hi) < 0:
            break
        span *= 2.0
        lo, hi = center - span, center + span
        logger.debug("Widening Luxemburg bracket to ±%g around %g", span, center)
    else:
        msg = "Could not bracket the Luxemburg norm"
        raise BracketError(msg)
    root = optimize.brentq(objective, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=MAX_ITERATIONS)
    return math.exp(root)


def luxemburg_norm(p: ExponentField, f: GridSignal) -> float:
    """Luxemburg quasi-norm inf{λ > 0 : ρ(f/λ) <= 1}.

    The root of λ ↦ log ρ(f/λ) is searched in u = log λ, so neither |f/λ|^p nor ρ ever overflows.

    Examples:
        >>> grid = SpatialGrid(n=64, period=8.0)
        >>> f = GridSignal(grid=grid, values=np.exp(-grid.nodes**2))
        >>> l2 = float(np.sqrt(np.sum(np.abs(f.values) ** 2) * grid.step))
        >>> abs(luxemburg_norm(ExponentField.constant(grid, 2.0), f) / l2 - 1) < 1e-10
        True
    """
    _ensure_grid(p, f)
    return _luxemburg(f.magnitude, p.values, p.grid.step, p.grid.period)


def relative_change(coarse: float, fine: float) -> float:
    scale = max(abs(coarse), abs(fine))
    return abs(fine - coarse) / scale if scale > 0 else 0.0


def luxemburg_refinement(p: ExponentField, f: GridSignal, factor: int = 2) -> float:
    """Relative change of ‖f‖_{p(·)} when p and f are re-sampled on a `factor` times finer grid.

    Values at or above [`DISCRETIZATION_TOLERANCE`][varcoorbit.varexp.DISCRETIZATION_TOLERANCE] mean the grid
    Riemann sum has not converged for this pair.
    """
    _ensure_grid(p, f)
    coarse = luxemburg_norm(p, f)
    fine = luxemburg_norm(p.refined(factor), f.refined(factor))
    change = relative_change(coarse, fine)
    logger.debug("Luxemburg norm %g -> %g under refinement by %d", coarse, fine, factor)
    return change


def luxemburg_rows(p: ExponentField, rows: FloatArray) -> FloatArray:
    """Luxemburg norm of every row of a nonnegative `(k, n)` array."""
    rows = np.atleast_2d(rows)
    return np.array([_luxemburg(row, p.values, p.grid.step, p.grid.period) for row in rows])


@dataclass(frozen=True, slots=True, kw_only=True)
class LogHolderReport:
    """Empirical log-Hölder constants of g = 1/p.

    Attributes:
        local_constant: max over node pairs of |g(x) - g(y)|·log(e + 1/|x - y|).
        tail_constant: max over nodes of |g(x) - g_∞|·log(e + |x|).
        g_infinity: Median of g over the far nodes |x| >= L/4.
        neighbour_ratio: Largest nearest-neighbour jump at step h over the one at step 2h.
        fails: True when the jumps do not shrink under refinement, so no finite constant exists.
    """

    local_constant: float
    tail_constant: float
    g_infinity: float
    neighbour_ratio: float
    fails: bool


def _max_neighbour_jump(g: FloatArray) -> float:
    # interior neighbours only; the seam x_{n-1} -> x_0 is not a jump of p
    return float(np.abs(np.diff(g)).max())


def log_holder_report(p: ExponentField) -> LogHolderReport:
    """Empirical local and decay log-Hölder constants of 1/p.

    The local constant is refined-grid sensitive: a discontinuous exponent keeps a fixed jump between
    neighbours as h shrinks, which the report flags as failing.
    """
    g = p.reciprocal()
    grid = p.grid
    local = 0.0
    for k in range(1, grid.n // 2 + 1):
        diff = float(np.abs(g - np.roll(g, -k)).max())
        local = max(local, diff * math.log(math.e + 1.0 / (k * grid.step)))

    nodes = grid.nodes
    far = np.abs(nodes) >= grid.period / 4
    g_inf = float(np.median(g[far]))
    tail = float(np.max(np.abs(g - g_inf) * np.log(math.e + np.abs(nodes))))

    fine, coarse = _max_neighbour_jump(g), _max_neighbour_jump(g[::2])
    ratio = fine / coarse if coarse > 0 else 0.0
    fails = fine > 1e-12 and ratio > JUMP_RATIO
    return LogHolderReport(
        local_constant=local, tail_constant=tail, g_infinity=g_inf, neighbour_ratio=ratio, fails=fails
    )


def _cumulative(a: FloatArray) -> FloatArray:
    # running sums of the tripled magnitudes; nondecreasing, so window sums are monotone in the radius
    return np.concatenate(([0.0], np.cumsum(np.tile(a, 3))))


def _window_ratio(
    cumulative: FloatArray, centers: IntArray, outer: IntArray | int, inner: IntArray | int
) -> FloatArray:
    """Sum over the window of radius `outer` divided by the length 2·inner + 1 of the window of radius `inner`.

    With `outer == inner` this is the window average. For `inner <= k <= outer` it bounds the average at radius k
    from above in floating point too, since every operation involved rounds monotonically.
    """
    sums = cumulative[centers + outer + 1] - cumulative[centers - outer]
    return sums / (2 * np.asarray(inner) + 1)


def _hl_reference(a: FloatArray) -> FloatArray:
    n = a.size
    cumulative = _cumulative(a)
    centers = np.arange(n) + n
    best = a.copy()
    for k in range(1, n // 2):
        np.maximum(best, _window_ratio(cumulative, centers, k, k), out=best)
    return best


def _hl_prefix(a: FloatArray, chunk: int = 1 << 18) -> FloatArray:
    n = a.size
    top = n // 2 - 1
    cumulative = _cumulative(a)
    best = a.copy()
    step = max(1, chunk // (top + 1))
    for start in range(0, n, step):
        local = best[start : start + step]
        # one radius interval [lo, hi] per row; its lower end is already folded into `local`
        owner = np.arange(local.size)
        lo = np.zeros(local.size, dtype=np.intp)
        hi = np.full(local.size, top, dtype=np.intp)
        while owner.size:
            keep = (lo < hi) & (_window_ratio(cumulative, owner + start + n, hi, lo) > local[owner])
            owner, lo, hi = owner[keep], lo[keep], hi[keep]
            mid = (lo + hi) // 2
            np.maximum.at(local, owner, _window_ratio(cumulative, owner + start + n, mid + 1, mid + 1))
            owner = np.concatenate((owner, owner))
            lo, hi = np.concatenate((lo, mid + 1)), np.concatenate((mid, hi))
    return best


def hl_maximal(f: GridSignal, *, method: Literal["prefix", "reference"] = "prefix") -> GridSignal:
    """Centered Hardy-Littlewood maximal function over all grid-aligned radii on the torus.

    Both methods read window sums off one cumulative sum of the tripled signal, so they return identical floats.

    Arguments:
        f: Input signal.
        method: `"reference"` evaluates every radius at every node, O(n²). `"prefix"` bisects the radius range
            and drops every interval whose bound does not beat the running maximum. It takes about n log n steps on
            signals with isolated peaks. Flat stretches, where many radii tie, push it back towards quadratic.

    Returns:
        Mf as a real-valued signal.
    """
    a = f.magnitude
    best = _hl_reference(a) if method == "reference" else _hl_prefix(a)
    return f.with_values(best)


def holder_defect(p: ExponentField, f: GridSignal, g: GridSignal, *, dual: ExponentField | None = None) -> float:
    """Ratio ∫|fg| / (‖f‖_{p(·)}·‖g‖_{p′(·)}), bounded by 4 for p >= 1.

    Raises:
        InvalidParameterError: If a norm vanishes while the pairing does not.
    """
    _ensure_grid(p, f, g)
    numerator = float(np.sum(f.magnitude * g.magnitude) * p.grid.step)
    if numerator == 0:
        return 0.0
    dual = p.conjugate() if dual is None else dual
    denominator = luxemburg_norm(p, f) * luxemburg_norm(dual, g)
    if denominator == 0:
        msg = "Hölder denominator vanishes with a nonzero pairing"
        raise InvalidParameterError(msg)
    return numerator / denominator


@dataclass(frozen=True, slots=True, kw_only=True)
class MaximalRatio:
    """Empirical ‖Mf‖/‖f‖ in L_{p(·)}; `below_one` marks p⁻ <= 1, where no bound is asserted."""

    ratio: float
    below_one: bool


def maximal_ratio(p: ExponentField, f: GridSignal) -> MaximalRatio:
    norm = luxemburg_norm(p, f)
    ratio = luxemburg_norm(p, hl_maximal(f)) / norm if norm > 0 else 0.0
    return MaximalRatio(ratio=ratio, below_one=p.p_minus <= 1)


def _eta_primitive(x: FloatArray, scale: float, m: float) -> FloatArray:
    return np.sign(x) * (1.0 - (1.0 + scale * np.abs(x)) ** (1.0 - m)) / (m - 1.0)


def eta_cell_masses(nu: float, m: float, grid: SpatialGrid, *, images: int = 64) -> FloatArray:
    """Integrals of the periodized η_{ν,m}(x) = 2^ν(1 + 2^ν|x|)^{-m} over the cell of each node offset.

    Images beyond `images` periods are folded in as their exact total mass, spread uniformly.
    """
    scale = 2.0**nu
    k = np.arange(grid.n)
    offsets = np.where(k < grid.n // 2, k, k - grid.n) * grid.step
    shifts = grid.period * np.arange(-images, images + 1)[:, None]
    upper = _eta_primitive(offsets + 0.5 * grid.step + shifts, scale, m)
    lower = _eta_primitive(offsets - 0.5 * grid.step + shifts, scale, m)
    masses = (upper - lower).sum(axis=0)
    tail = 2.0 * (1.0 + scale * (images + 0.5) * grid.period) ** (1.0 - m) / (m - 1.0)
    return masses + tail * grid.step / grid.period


def eta_convolve(nu: float, m: float, f: GridSignal, *, images: int = 64) -> GridSignal:
    """Periodic convolution η_{ν,m} ∗ f with cell-averaged kernel samples.

    Raises:
        InvalidParameterError: If `m <= 1`, where η is not integrable.
    """
    if not m > 1:
        msg = f"Decay order must exceed the dimension 1, found m={m}"
        raise InvalidParameterError(msg)
    masses = eta_cell_masses(nu, m, f.grid, images=images)
    values = sp_fft.ifft(sp_fft.fft(masses) * sp_fft.fft(f.values))
    return f.with_values(values)
