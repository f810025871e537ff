"""Discretization substrate: periodic grid, Fourier transforms, log-scale axis and fields over X."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy import fft as sp_fft
from scipy import signal as sp_signal

from varcoorbit._utils import qualified_type_name
from varcoorbit.exceptions import GridMismatchError, InvalidParameterError

if TYPE_CHECKING:
    from collections.abc import Callable

    from typing_extensions import Self

    from varcoorbit.typing import ComplexArray, DilationNorm, Domain, FloatArray

__all__ = (
    "GridSignal",
    "ScaleAxis",
    "SpatialGrid",
    "XField",
    "convolve",
    "dilate_filter",
    "forward_transform",
    "inverse_transform",
    "scale_integral",
    "to_frequency",
    "to_space",
)

SQRT_2PI = math.sqrt(2.0 * math.pi)
MIN_NODES = 8


@dataclass(frozen=True, slots=True, kw_only=True)
class SpatialGrid:
    """Uniform periodic grid on the torus [-L/2, L/2).

    Attributes:
        n: Number of nodes, a power of two not smaller than 8.
        period: Torus length L.

    Examples:
        >>> grid = SpatialGrid(n=8, period=4.0)
        >>> grid.step
        0.5
        >>> grid.nodes.tolist()
        [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]
    """

    n: int
    period: float = 64.0

    def __post_init__(self) -> None:
        if self.n < MIN_NODES or self.n & (self.n - 1):
            msg = f"Grid size must be a power of two not smaller than {MIN_NODES}, found n={self.n}"
            raise InvalidParameterError(msg)
        if not (math.isfinite(self.period) and self.period > 0):
            msg = f"Grid period must be positive and finite, found {self.period}"
            raise InvalidParameterError(msg)

    @property
    def step(self) -> float:
        """Spatial step h = L/n."""
        return self.period / self.n

    @property
    def nodes(self) -> FloatArray:
        """Sample abscissae x_i = -L/2 + i·h."""
        return -0.5 * self.period + self.step * np.arange(self.n, dtype=np.float64)

    @property
    def frequencies(self) -> FloatArray:
        """Frequency nodes 2πk/L in FFT order."""
        return 2.0 * np.pi * sp_fft.fftfreq(self.n, d=self.step)

    @property
    def frequency_step(self) -> float:
        """Spacing 2π/L of the frequency nodes, the Parseval weight of a spectrum sample."""
        return 2.0 * math.pi / self.period

    @property
    def band(self) -> float:
        """Nyquist frequency π/h bounding the working band."""
        return math.pi / self.step

    def offset_distances(self) -> FloatArray:
        """Torus distance min(k, n-k)·h of every node offset k = 0, ..., n-1."""
        k = np.arange(self.n)
        return np.minimum(k, self.n - k) * self.step

    def refined(self, factor: int = 2) -> SpatialGrid:
        """Grid with `factor` times as many nodes on the same torus."""
        return SpatialGrid(n=self.n * factor, period=self.period)


def _ensure_same_grid(left: SpatialGrid, right: SpatialGrid) -> None:
    if left != right:
        msg = f"Operands live on different grids: {left} and {right}"
        raise GridMismatchError(msg)


@dataclass(frozen=True, slots=True, kw_only=True, eq=False)
class GridSignal:
    """Samples of a function on a [`SpatialGrid`][varcoorbit.grid.SpatialGrid].

    Spatial samples follow the node order; frequency samples follow FFT order. Real input is kept as float64,
    anything else is stored as complex128.
    """

    grid: SpatialGrid
    values: ComplexArray | FloatArray
    domain: Domain = "space"

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        values = values.astype(np.float64 if np.isrealobj(values) else np.complex128, copy=False)
        if values.shape != (self.grid.n,):
            msg = f"Expected {self.grid.n} samples, found array of shape {values.shape}"
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(values)):
            msg = "Signal samples must be finite"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> Self:
        return cls(grid=grid, values=np.zeros(grid.n, dtype=np.complex128))

    @classmethod
    def from_function(cls, grid: SpatialGrid, func: Callable[[FloatArray], FloatArray | ComplexArray]) -> Self:
        """Sample `func` at the grid nodes."""
        return cls(grid=grid, values=np.asarray(func(grid.nodes), dtype=np.complex128))

    @property
    def magnitude(self) -> FloatArray:
        return np.abs(self.values)

    def with_values(self, values: ComplexArray | FloatArray) -> Self:
        return type(self)(grid=self.grid, values=values, domain=self.domain)

    def scaled(self, factor: complex) -> Self:
        return self.with_values(factor * self.values)

    def __add__(self, other: GridSignal) -> Self:
        _ensure_same_grid(self.grid, other.grid)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: GridSignal) -> Self:
        _ensure_same_grid(self.grid, other.grid)
        return self.with_values(self.values - other.values)

    def _weight(self) -> float:
        return self.grid.step if self.domain == "space" else self.grid.frequency_step

    def inner(self, other: GridSignal) -> complex:
        """Discrete L2 pairing ⟨self, other⟩ = Σ self·conj(other)·weight."""
        _ensure_same_grid(self.grid, other.grid)
        return complex(np.vdot(other.values, self.values) * self._weight())

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self._weight()))

    def refined(self, factor: int = 2) -> Self:
        """Trigonometric interpolation onto `grid.refined(factor)`, exact for signals band-limited below the grid band.

        Raises:
            InvalidParameterError: For frequency samples.
        """
        if self.domain != "space":
            msg = "Only spatial samples can be refined"
            raise InvalidParameterError(msg)
        values = sp_signal.resample(self.values, self.grid.n * factor)
        return type(self)(grid=self.grid.refined(factor), values=values)


def _phase(n: int) -> FloatArray:
    # (-1)^k accounts for the first node sitting at -L/2
    return np.where(np.arange(n) % 2 == 0, 1.0, -1.0)


def forward_transform(values: ComplexArray | FloatArray, grid: SpatialGrid) -> ComplexArray:
    """Continuous-normalized Fourier transform along the last axis.

    Computes (2π)^{-1/2}·h·Σ_i v_i·exp(-i x_i ξ_k) at the frequency nodes, in FFT order.
    """
    return (grid.step / SQRT_2PI) * _phase(grid.n) * sp_fft.fft(values, axis=-1)


def inverse_transform(spectrum: ComplexArray, grid: SpatialGrid) -> ComplexArray:
    """Inverse of [`forward_transform`][varcoorbit.grid.forward_transform] along the last axis."""
    return sp_fft.ifft(spectrum * (_phase(grid.n) * (SQRT_2PI / grid.step)), axis=-1)


def to_frequency(s: GridSignal) -> GridSignal:
    """Fourier transform of a spatial signal with the (2π)^{-1/2} convention.

    Examples:
        >>> grid = SpatialGrid(n=8, period=2 * math.pi)
        >>> spec = to_frequency(GridSignal(grid=grid, values=np.ones(8)))
        >>> round(abs(spec.values[0]), 12) == round(math.sqrt(2 * math.pi), 12)
        True
    """
    if s.domain != "space":
        msg = "to_frequency expects a spatial signal"
        raise InvalidParameterError(msg)
    return GridSignal(grid=s.grid, values=forward_transform(s.values, s.grid), domain="frequency")


def to_space(s: GridSignal) -> GridSignal:
    """Inverse of [`to_frequency`][varcoorbit.grid.to_frequency]."""
    if s.domain != "frequency":
        msg = "to_space expects a frequency-domain signal"
        raise InvalidParameterError(msg)
    return GridSignal(grid=s.grid, values=inverse_transform(s.values, s.grid), domain="space")


def convolve(filter_hat: ComplexArray | FloatArray, s: GridSignal) -> GridSignal:
    """Convolve a spatial signal with the kernel whose Fourier transform is sampled in `filter_hat`.

    The product is taken as (Φ∗f)^ = (2π)^{1/2}·Φ̂·f̂, so `filter_hat ≡ (2π)^{-1/2}` is the identity.

    Arguments:
        filter_hat: Kernel spectrum at the frequency nodes, in FFT order.
        s: Spatial signal.

    Returns:
        The convolution sampled at the nodes.
    """
    filter_hat = np.asarray(filter_hat)
    if filter_hat.shape != (s.grid.n,):
        msg = f"Filter has shape {filter_hat.shape}, expected ({s.grid.n},)"
        raise InvalidParameterError(msg)
    spectrum = forward_transform(s.values, s.grid) * filter_hat * SQRT_2PI
    return GridSignal(grid=s.grid, values=inverse_transform(spectrum, s.grid))


def dilate_filter(
    phi_hat: Callable[[FloatArray], FloatArray | ComplexArray],
    t: float,
    grid: SpatialGrid,
    *,
    normalization: DilationNorm = "l1",
) -> ComplexArray:
    """Sample the dilated profile Φ̂(tξ) (or t^{1/2}Φ̂(tξ) for `normalization="l2"`) at the frequency nodes.

    `t = inf` evaluates the profile at unit scale; callers pass Φ̂₀ there.

    Raises:
        InvalidParameterError: If `t <= 0`.
    """
    if not t > 0:
        msg = f"Scale must be positive, found t={t}"
        raise InvalidParameterError(msg)
    xi = grid.frequencies
    if math.isinf(t):
        return np.asarray(phi_hat(xi), dtype=np.complex128)
    samples = np.asarray(phi_hat(t * xi), dtype=np.complex128)
    return samples * math.sqrt(t) if normalization == "l2" else samples


@dataclass(frozen=True, slots=True, kw_only=True)
class ScaleAxis:
    """Geometric discretization of the scale interval (0, 1) plus the ∞ slot.

    Scale m sits at the log-midpoint t_m = β^{-(m-1/2)/M} of the cell [β^{-m/M}, β^{-(m-1)/M}), so that
    Σ_m g(t_m)·Δ is the midpoint rule for ∫ g(t) dt/t with Δ = ln(β)/M.

    Examples:
        >>> axis = ScaleAxis(base=2.0, per_octave=1, octaves=2)
        >>> [round(t, 6) for t in axis.scales.tolist()]
        [0.707107, 0.353553]
    """

    base: float = 2.0
    per_octave: int = 16
    octaves: int = 5
    has_infinity: bool = field(default=True, init=False)

    def __post_init__(self) -> None:
        if not self.base > 1:
            msg = f"Axis base must exceed 1, found {self.base}"
            raise InvalidParameterError(msg)
        if self.per_octave < 1 or self.octaves < 1:
            msg = f"per_octave and octaves must be >= 1, found {self.per_octave} and {self.octaves}"
            raise InvalidParameterError(msg)

    @property
    def size(self) -> int:
        """Number J·M of finite scales."""
        return self.per_octave * self.octaves

    @property
    def log_weight(self) -> float:
        """Quadrature weight Δ = ln(β)/M."""
        return math.log(self.base) / self.per_octave

    @property
    def scales(self) -> FloatArray:
        m = np.arange(1, self.size + 1, dtype=np.float64)
        return self.base ** (-(m - 0.5) / self.per_octave)

    @property
    def log_weights(self) -> FloatArray:
        return np.full(self.size, self.log_weight)

    @property
    def lowest_scale(self) -> float:
        """Bottom edge β^{-J} of the discretized scale range."""
        return float(self.base ** (-self.octaves))

    @property
    def slot_scales(self) -> FloatArray:
        """Scale of each slot of an [`XField`][varcoorbit.grid.XField]: ∞ first, then decreasing t_m."""
        return np.concatenate(([np.inf], self.scales))

    @property
    def sheet_weights(self) -> FloatArray:
        """μ-mass per unit length of each slot: 1 on the ∞ sheet and Δ/t_m on the finite sheet."""
        return np.concatenate(([1.0], self.log_weight / self.scales))

    def window_slots(self, ratio: float = 2.0) -> int:
        """Largest slot offset w with β^{w/M} <= ratio."""
        return int(math.floor(self.per_octave * math.log(ratio) / math.log(self.base) + 1e-9))

    def refined(self, factor: int = 2) -> ScaleAxis:
        return ScaleAxis(base=self.base, per_octave=self.per_octave * factor, octaves=self.octaves)


def scale_integral(g: FloatArray | ComplexArray, axis: ScaleAxis) -> float:
    """Midpoint-rule approximation Σ_m g(t_m)·Δ of ∫₀¹ g(t) dt/t over the axis range.

    Examples:
        >>> axis = ScaleAxis(base=2.0, per_octave=4, octaves=3)
        >>> round(scale_integral(np.ones(12), axis), 12) == round(3 * math.log(2), 12)
        True
    """
    g = np.asarray(g)
    if g.shape != (axis.size,):
        msg = f"Expected {axis.size} per-scale values, found shape {g.shape}"
        raise InvalidParameterError(msg)
    if not np.all(np.isfinite(g)):
        msg = "Scale integrand must be finite"
        raise InvalidParameterError(msg)
    total = 0.0
    for value in g.real.tolist():
        total += value * axis.log_weight
    return total


@dataclass(frozen=True, slots=True, kw_only=True, eq=False)
class XField:
    """Samples of a function on the discretized index space X.

    `values` has shape `(axis.size + 1, grid.n)`: row 0 is the ∞ sheet, row m the scale t_m.
    """

    grid: SpatialGrid
    axis: ScaleAxis
    values: ComplexArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.complex128)
        expected = (self.axis.size + 1, self.grid.n)
        if values.shape != expected:
            msg = f"Expected field of shape {expected}, found {values.shape}"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: SpatialGrid, axis: ScaleAxis) -> Self:
        return cls(grid=grid, axis=axis, values=np.zeros((axis.size + 1, grid.n), dtype=np.complex128))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis.size + 1, self.grid.n)

    @property
    def mu_weights(self) -> FloatArray:
        """Cell measures h on the ∞ sheet and h·Δ/t_m on the finite sheet."""
        return np.broadcast_to(self.grid.step * self.axis.sheet_weights[:, None], self.shape)

    @property
    def infinity(self) -> ComplexArray:
        return self.values[0]

    @property
    def finite(self) -> ComplexArray:
        return self.values[1:]

    def with_values(self, values: ComplexArray | FloatArray) -> Self:
        return type(self)(grid=self.grid, axis=self.axis, values=np.asarray(values, dtype=np.complex128))

    def _check_compatible(self, other: XField) -> None:
        if not isinstance(other, XField):
            msg = f"Expected XField, found {qualified_type_name(other)}"
            raise TypeError(msg)
        _ensure_same_grid(self.grid, other.grid)
        if self.axis != other.axis:
            msg = f"Fields live on different scale axes: {self.axis} and {other.axis}"
            raise GridMismatchError(msg)

    def __add__(self, other: XField) -> Self:
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: XField) -> Self:
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def scaled(self, factor: complex) -> Self:
        return self.with_values(factor * self.values)

    def inner(self, other: XField) -> complex:
        """Discrete L2(X, μ) pairing."""
        self._check_compatible(other)
        return complex(np.sum(self.values * np.conj(other.values) * self.mu_weights))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2 * self.mu_weights)))
