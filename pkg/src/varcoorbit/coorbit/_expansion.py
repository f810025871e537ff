from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from varcoorbit.coorbit._covering import Covering, SeqCoeffs
from varcoorbit.exceptions import GridMismatchError, InvalidParameterError
from varcoorbit.grid import SQRT_2PI, GridSignal, ScaleAxis, forward_transform, inverse_transform
from varcoorbit.spaces import seq_norms, space_norm
from varcoorbit.weights import wtilde

if TYPE_CHECKING:
    from collections.abc import Mapping

    from varcoorbit.analyzers import MeyerSystem
    from varcoorbit.grid import SpatialGrid
    from varcoorbit.spaces import SpaceSpec
    from varcoorbit.transform import VoiceTransform
    from varcoorbit.typing import ComplexArray, IntArray

__all__ = ("MeyerExpansion", "coorbit_norm", "meyer_atom", "wavelet_frame_expand")

logger = logging.getLogger(__name__)

_SIBLING = {"F": "P", "B": "L"}


def _level_spectrum(system: MeyerSystem, c: int, j: int, grid: SpatialGrid) -> ComplexArray:
    """2^{-j/2}ψ̂^c(2^{-j}ξ), the spectrum of 2^{j/2}ψ^c(2^j·)."""
    profile = system.psi0_hat if c == 0 else system.psi1_hat
    scale = 2.0**-j
    return math.sqrt(scale) * np.asarray(profile(scale * grid.frequencies), dtype=np.complex128)


def _stride(grid: SpatialGrid, j: int) -> int:
    """Nodes between consecutive translates 2^{-j}k."""
    if not (grid.period / 2).is_integer():
        msg = f"Meyer translates need a torus of even integer length, found {grid.period}"
        raise InvalidParameterError(msg)
    stride = grid.n / (grid.period * 2**j)
    if stride < 1 or not stride.is_integer():
        msg = f"Level {j} translates 2^-{j}k do not fall on the nodes of {grid}"
        raise InvalidParameterError(msg)
    return int(stride)


def _check_band(system: MeyerSystem, grid: SpatialGrid, c: int, j: int) -> None:
    """The level's frequency support must lie inside the grid band, or the atoms lose orthonormality."""
    top = system.scaling_support if c == 0 else 2.0**j * system.wavelet_support[1]
    if top > grid.band * (1.0 + 1e-12):
        msg = (
            f"Level {j} Meyer atoms reach |ξ| = {top:.6g}, beyond the grid band {grid.band:.6g} of {grid}; "
            f"use a finer grid or a coarser level"
        )
        raise InvalidParameterError(msg)


def meyer_atom(system: MeyerSystem, grid: SpatialGrid, c: int, j: int, k: int) -> GridSignal:
    """The periodized Meyer function 2^{j/2}ψ^c(2^j· - k) on the grid.

    Raises:
        InvalidParameterError: For invalid indices, or if the level's frequency support exceeds the grid band.
    """
    if c not in {0, 1} or j < 0 or (c == 0 and j != 0):
        msg = f"Meyer atoms exist for c = 1, j >= 0 and for c = 0, j = 0; found c={c}, j={j}"
        raise InvalidParameterError(msg)
    _check_band(system, grid, c, j)
    shift = np.exp(-1j * (k * 2.0**-j) * grid.frequencies)
    return GridSignal(grid=grid, values=inverse_transform(_level_spectrum(system, c, j, grid) * shift, grid))


@dataclass(frozen=True, slots=True, kw_only=True, eq=False)
class MeyerExpansion:
    """Orthonormal Meyer expansion of a signal up to level J.

    Attributes:
        levels: Finest level J.
        scaling: λ⁰_{0,k}, ordered by increasing k.
        wavelets: λ¹_{j,k} for j = 0..J, each ordered by increasing k.
        translations: The k of every level, shared by both factors at level 0.
        reconstruction: Σ λ·ψ over all computed coefficients.
        residual: ‖f - reconstruction‖₂/‖f‖₂.
        norms: `(flat, natural)` sequence norms per factor c, when a space was given.
    """

    levels: int
    scaling: ComplexArray
    wavelets: tuple[ComplexArray, ...]
    translations: tuple[IntArray, ...]
    reconstruction: GridSignal
    residual: float
    norms: Mapping[int, tuple[float, float]] = field(default_factory=dict)

    def sequence(self, c: int, covering: Covering) -> SeqCoeffs:
        """λ^c as coefficients of the dyadic covering (α = 1, β = 2): level 0 on the ∞ sheet, level j >= 1 finite."""
        entries = np.zeros(covering.size, dtype=np.complex128)
        rows = [(0, self.scaling)] if c == 0 else list(enumerate(self.wavelets))
        for j, values in rows:
            index = covering.index_of(np.full(values.shape, j), self.translations[j])
            if np.any(index < 0):
                msg = f"Level {j} of the expansion is outside the covering window"
                raise InvalidParameterError(msg)
            entries[index] = values
        return SeqCoeffs(covering=covering, entries=entries)


def _coefficients(f: GridSignal, spectrum: ComplexArray, stride: int, j: int) -> tuple[ComplexArray, IntArray]:
    correlation = inverse_transform(SQRT_2PI * np.conj(spectrum) * forward_transform(f.values, f.grid), f.grid)
    nodes = np.arange(0, f.grid.n, stride)
    ks = np.rint(f.grid.nodes[nodes] * 2.0**j).astype(np.int64)
    order = np.argsort(ks)
    return correlation[nodes][order], ks[order]


def _synthesis(coeffs: ComplexArray, ks: IntArray, spectrum: ComplexArray, grid: SpatialGrid, j: int) -> ComplexArray:
    # impulses λ_k at x_k = 2^{-j}k convolved with the level atom
    impulses = np.zeros(grid.n, dtype=np.complex128)
    nodes = np.rint((ks * 2.0**-j - grid.nodes[0]) / grid.step).astype(np.int64) % grid.n
    impulses[nodes] = coeffs
    return spectrum * forward_transform(impulses, grid) * (SQRT_2PI / grid.step)


def wavelet_frame_expand(
    f: GridSignal,
    system: MeyerSystem,
    levels: int,
    spec: SpaceSpec | None = None,
    *,
    axis: ScaleAxis | None = None,
) -> MeyerExpansion:
    """Expand f in the periodized Meyer basis {ψ⁰(· - k), 2^{j/2}ψ¹(2^j· - k) : 0 <= j <= J}.

    Band-limited inputs with spectrum inside |ξ| <= 2^J·4π/3 are reproduced exactly.

    Arguments:
        f: Signal on a torus of even integer length.
        system: Meyer generators.
        levels: Finest level J; 2^{-J} must be a multiple of the grid step and
            2^J·8π/3 must not exceed the grid band π/h.
        spec: Function space (F or B). When given, each coefficient sequence is measured in (P^{w̃})♮ or
            (L^{w̃})♮ through the dyadic covering.
        axis: Scale axis carrying the covering; base 2 with J octaves by default.
    """
    if levels < 0:
        msg = f"Expansion level must be nonnegative, found {levels}"
        raise InvalidParameterError(msg)
    grid = f.grid
    _check_band(system, grid, 1, levels)
    spectrum_total = np.zeros(grid.n, dtype=np.complex128)

    base = _level_spectrum(system, 0, 0, grid)
    scaling, ks0 = _coefficients(f, base, _stride(grid, 0), 0)
    spectrum_total += _synthesis(scaling, ks0, base, grid, 0)

    wavelets, translations = [], [ks0]
    for j in range(levels + 1):
        spectrum = _level_spectrum(system, 1, j, grid)
        coeffs, ks = _coefficients(f, spectrum, _stride(grid, j), j)
        spectrum_total += _synthesis(coeffs, ks, spectrum, grid, j)
        wavelets.append(coeffs)
        if j > 0:
            translations.append(ks)

    reconstruction = GridSignal(grid=grid, values=inverse_transform(spectrum_total, grid))
    norm = f.l2_norm()
    residual = (f - reconstruction).l2_norm() / norm if norm > 0 else 0.0
    expansion = MeyerExpansion(
        levels=levels,
        scaling=scaling,
        wavelets=tuple(wavelets),
        translations=tuple(translations),
        reconstruction=reconstruction,
        residual=residual,
    )
    logger.debug("Meyer expansion to level %d: residual %.3e", levels, residual)
    if spec is None:
        return expansion

    axis = axis or ScaleAxis(base=2.0, per_octave=4, octaves=max(levels, 1))
    covering = Covering(1.0, 2.0, grid, axis)
    x_spec = _x_space(spec)
    norms = {c: seq_norms(x_spec, expansion.sequence(c, covering)) for c in (0, 1)}
    return MeyerExpansion(
        levels=levels,
        scaling=scaling,
        wavelets=tuple(wavelets),
        translations=tuple(translations),
        reconstruction=reconstruction,
        residual=residual,
        norms=norms,
    )


def _x_space(spec: SpaceSpec) -> SpaceSpec:
    """The space on X whose coorbit is the given function space: F ↦ P^{w̃}, B ↦ L^{w̃}."""
    if spec.family in _SIBLING:
        return spec.with_family(_SIBLING[spec.family], wtilde(spec.w))  # type: ignore[arg-type]
    return spec


def coorbit_norm(vt: VoiceTransform, spec: SpaceSpec, f: GridSignal) -> float:
    """‖f | Co(Y)‖ = ‖V f | Y‖ with Y = P^{w̃} for F specs and L^{w̃} for B specs; P and L specs are used as given."""
    if f.grid != vt.grid:
        msg = f"Signal lives on {f.grid}, transform on {vt.grid}"
        raise GridMismatchError(msg)
    return space_norm(_x_space(spec), vt.apply(f))
