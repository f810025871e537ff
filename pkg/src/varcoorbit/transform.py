"""Continuous wavelet transform on X, its adjoint, and the Peetre and Peetre-Wiener maximal operators."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np
from scipy.ndimage import maximum_filter1d

from varcoorbit.exceptions import GridMismatchError, InvalidParameterError
from varcoorbit.grid import SQRT_2PI, GridSignal, XField, forward_transform, inverse_transform

if TYPE_CHECKING:
    from collections.abc import Iterable

    from varcoorbit.analyzers import AnalyzerPair, MeyerSystem
    from varcoorbit.grid import ScaleAxis, SpatialGrid
    from varcoorbit.typing import ComplexArray, FloatArray, ProfileFunc

__all__ = (
    "AtomFamily",
    "VoiceTransform",
    "decay_constant",
    "peetre_maximal",
    "peetre_maximal_rows",
    "peetre_truncation_radius",
    "peetre_wiener_maximal",
    "reproduce",
    "tightness_defect",
    "voice_adjoint",
    "voice_transform",
)

logger = logging.getLogger(__name__)

PEETRE_TOLERANCE = 1e-12
NOISE_FLOOR = 1e-10

MaximalMethod = Literal["truncated", "exhaustive"]


@dataclass(frozen=True, slots=True, kw_only=True)
class AtomFamily:
    """Atoms ψ_{(x,∞)} = T_x G₀ and ψ_{(x,t)} = T_x t^{-1/2}G(·/t) described by their Fourier profiles."""

    infinity_profile: ProfileFunc
    scale_profile: ProfileFunc
    name: str = "atoms"

    @classmethod
    def from_pair(cls, pair: AnalyzerPair) -> AtomFamily:
        """The frame {φ_x} generated by an analyzing pair."""
        return cls(infinity_profile=pair.phi0_hat, scale_profile=pair.phi_hat, name=pair.name)

    @classmethod
    def meyer(cls, system: MeyerSystem) -> AtomFamily:
        """Meyer system with the scaling function on the ∞ sheet and the wavelet on the finite scales."""
        return cls(infinity_profile=system.psi0_hat, scale_profile=system.psi1_hat, name="meyer")

    def spectra(self, grid: SpatialGrid, axis: ScaleAxis) -> ComplexArray:
        """Atom spectra at the origin, shape `(axis.size + 1, n)`: row 0 is G₀, row m is t_m^{1/2}Ĝ(t_m ξ)."""
        xi = grid.frequencies
        rows = [np.asarray(self.infinity_profile(xi), dtype=np.complex128)]
        rows.extend(
            math.sqrt(t) * np.asarray(self.scale_profile(t * xi), dtype=np.complex128) for t in axis.scales
        )
        return np.stack(rows)


class VoiceTransform:
    """The voice transform V f(x, t) = ⟨f, φ_{(x,t)}⟩ of a frame generated by an analyzing pair.

    The atom spectra are computed once at construction; `atoms[0]` is Φ̂₀ and `atoms[m]` is t_m^{1/2}Φ̂(t_m ξ).

    Examples:
        >>> from varcoorbit.analyzers import make_analyzer
        >>> from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid
        >>> grid, axis = SpatialGrid(n=64, period=16.0), ScaleAxis(per_octave=4, octaves=3)
        >>> vt = VoiceTransform(make_analyzer("meyer"), grid, axis)
        >>> vt.apply(GridSignal.zeros(grid)).l2_norm()
        0.0
    """

    __slots__ = ("_atoms", "axis", "grid", "pair")

    def __init__(self, pair: AnalyzerPair, grid: SpatialGrid, axis: ScaleAxis) -> None:
        self.pair = pair
        self.grid = grid
        self.axis = axis
        self._atoms = AtomFamily.from_pair(pair).spectra(grid, axis)
        logger.debug("Voice transform %r on n=%d with %d scales", pair.name, grid.n, axis.size)

    @property
    def atoms(self) -> ComplexArray:
        return self._atoms

    def __repr__(self) -> str:
        return f"VoiceTransform(pair={self.pair.name!r}, grid={self.grid}, axis={self.axis})"

    def _check_signal(self, f: GridSignal) -> None:
        if f.grid != self.grid:
            msg = f"Signal lives on {f.grid}, transform on {self.grid}"
            raise GridMismatchError(msg)

    def _check_field(self, field: XField) -> None:
        if field.grid != self.grid or field.axis != self.axis:
            msg = "Field and transform use different discretizations of X"
            raise GridMismatchError(msg)

    def apply(self, f: GridSignal) -> XField:
        """Rows (Φ̃₀ ∗ f) and t^{1/2}(Φ̃_t ∗ f) with Φ̃ = conj(Φ(-·))."""
        self._check_signal(f)
        spectrum = forward_transform(f.values, self.grid)
        values = inverse_transform(SQRT_2PI * np.conj(self._atoms) * spectrum, self.grid)
        return XField(grid=self.grid, axis=self.axis, values=values)

    def adjoint(self, field: XField) -> GridSignal:
        """μ-weighted superposition Σ F(x_i, t_m)·φ_{(x_i, t_m)}·μ_cell, accumulated per scale in frequency."""
        self._check_field(field)
        spectra = forward_transform(field.values, self.grid)
        weights = self.axis.sheet_weights[:, None]
        spectrum = SQRT_2PI * np.sum(weights * self._atoms * spectra, axis=0)
        return GridSignal(grid=self.grid, values=inverse_transform(spectrum, self.grid))

    def atom(self, node: int, slot: int) -> GridSignal:
        """The frame atom φ_{(x_node, t_slot)} in space; slot 0 is the ∞ sheet."""
        shift = np.exp(-1j * self.grid.nodes[node] * self.grid.frequencies)
        return GridSignal(grid=self.grid, values=inverse_transform(self._atoms[slot] * shift, self.grid))


def voice_transform(vt: VoiceTransform, f: GridSignal) -> XField:
    return vt.apply(f)


def voice_adjoint(vt: VoiceTransform, field: XField) -> GridSignal:
    return vt.adjoint(field)


def reproduce(vt: VoiceTransform, field: XField) -> XField:
    """Frame projection R F = V(V* F), the fast path of the frame kernel."""
    return vt.apply(vt.adjoint(field))


def tightness_defect(vt: VoiceTransform, battery: Iterable[GridSignal]) -> float:
    """max over the battery of |‖Vf‖²_μ / ‖f‖² - 1|.

    Raises:
        InvalidParameterError: If the battery is empty.
    """
    defects = []
    for f in battery:
        energy = f.l2_norm() ** 2
        if energy > 0:
            defects.append(abs(vt.apply(f).l2_norm() ** 2 / energy - 1.0))
    if not defects:
        msg = "Tightness needs at least one nonzero battery signal"
        raise InvalidParameterError(msg)
    return max(defects)


def peetre_truncation_radius(a: float, t: float, tol: float = PEETRE_TOLERANCE) -> float:
    """Offset Z beyond which (1 + |z|/t)^{-a} <= tol.

    Examples:
        >>> peetre_truncation_radius(1.0, 0.5, 1e-2)
        49.5
    """
    return t * (tol ** (-1.0 / a) - 1.0)


def _check_exponent(a: float) -> None:
    if not a > 0:
        msg = f"Peetre exponent must be positive, found a={a}"
        raise InvalidParameterError(msg)


def peetre_maximal_rows(
    rows: FloatArray,
    scales: FloatArray,
    grid: SpatialGrid,
    a: float,
    *,
    method: MaximalMethod = "truncated",
    tol: float = PEETRE_TOLERANCE,
) -> FloatArray:
    """sup_z |F(x + z)|/(1 + |z|/t)^a per row, with torus distances; `t = inf` rows use t = 1.

    Arguments:
        rows: Nonnegative values, shape `(k, n)`.
        scales: Scale of each row.
        grid: Grid of the rows.
        a: Peetre exponent.
        method: `"truncated"` stops at the offset Z(a, t) where the penalty drops below `tol`; `"exhaustive"`
            compares every pair of nodes.
        tol: Truncation tolerance, relative to max |F|.

    Raises:
        InvalidParameterError: If `a <= 0`.
    """
    _check_exponent(a)
    rows = np.abs(np.atleast_2d(rows))
    t_eff = np.where(np.isinf(scales), 1.0, np.asarray(scales, dtype=np.float64))

    if method == "exhaustive":
        dist = grid.offset_distances()
        index = np.arange(grid.n)
        pair_dist = dist[(index[None, :] - index[:, None]) % grid.n]
        out = np.empty_like(rows)
        for r, t in enumerate(t_eff):
            out[r] = np.max((1.0 + pair_dist / t) ** (-a) * rows[r][None, :], axis=1)
        return out

    # Rows sorted by decreasing t so that those still active at offset k form a prefix
    order = np.argsort(-t_eff, kind="stable")
    sorted_rows, sorted_t = rows[order], t_eff[order]
    reach = sorted_t * (tol ** (-1.0 / a) - 1.0)
    best = sorted_rows.copy()
    for k in range(1, grid.n // 2 + 1):
        z = k * grid.step
        active = int(np.searchsorted(-reach, -z, side="right"))
        if active == 0:
            break
        block = sorted_rows[:active]
        shifted = np.maximum(np.roll(block, -k, axis=1), np.roll(block, k, axis=1))
        penalty = (1.0 + z / sorted_t[:active, None]) ** (-a)
        np.maximum(best[:active], shifted * penalty, out=best[:active])
    out = np.empty_like(best)
    out[order] = best
    return out


def peetre_maximal(field: XField, a: float, *, method: MaximalMethod = "truncated") -> XField:
    """Peetre maximal function P_a F(x, t) = sup_z |F(x + z, t)|/(1 + |z|/t)^a, with (1 + |z|)^a at t = ∞.

    Examples:
        >>> import numpy as np
        >>> from varcoorbit.grid import ScaleAxis, SpatialGrid, XField
        >>> grid, axis = SpatialGrid(n=16, period=16.0), ScaleAxis(per_octave=1, octaves=1)
        >>> spike = XField.zeros(grid, axis).values.copy()
        >>> spike[:, 0] = 1.0
        >>> out = peetre_maximal(XField(grid=grid, axis=axis, values=spike), 1.0)
        >>> out.values[0, :3].real.tolist()
        [1.0, 0.5, 0.3333333333333333]
    """
    values = peetre_maximal_rows(np.abs(field.values), field.axis.slot_scales, field.grid, a, method=method)
    return field.with_values(values)


def peetre_wiener_maximal(field: XField, a: float, *, method: MaximalMethod = "truncated") -> XField:
    """Peetre-Wiener maximal function: the Peetre maximal function maximized over slots with t/2 <= τ <= 2t.

    Slots outside the axis count as empty; the ∞ sheet is left as the Peetre maximal function.
    """
    peetre = peetre_maximal(field, a, method=method).values.real
    width = field.axis.window_slots(2.0)
    out = peetre.copy()
    if width > 0:
        out[1:] = maximum_filter1d(peetre[1:], size=2 * width + 1, axis=0, mode="constant", cval=0.0)
    return field.with_values(out)


def decay_constant(vt: VoiceTransform, f: GridSignal, order: int) -> float:
    """Empirical C_N = max |Vf(x, t)| / (t^N (1 + |x|)^{-N}) over cells above the noise floor.

    The ∞ sheet enters with t = 1.
    """
    magnitude = np.abs(vt.apply(f).values)
    t = np.where(np.isinf(vt.axis.slot_scales), 1.0, vt.axis.slot_scales)[:, None]
    envelope = t**order * (1.0 + np.abs(vt.grid.nodes)[None, :]) ** (-order)
    peak = magnitude.max()
    if peak == 0:
        return 0.0
    significant = magnitude > NOISE_FLOOR * peak
    return float(np.max(magnitude[significant] / envelope[significant]))
