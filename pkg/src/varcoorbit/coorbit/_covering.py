from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np

from varcoorbit.exceptions import GridMismatchError, InvalidParameterError
from varcoorbit.grid import XField

if TYPE_CHECKING:
    from varcoorbit.grid import ScaleAxis, SpatialGrid
    from varcoorbit.typing import ComplexArray, FloatArray, IntArray

__all__ = ("Covering", "SeqCoeffs")

logger = logging.getLogger(__name__)

LEVEL_TOLERANCE = 1e-9


class Covering:
    """The covering U^{α,β} of X restricted to the discretized window.

    Boxes are U_{0,k} = αk + α[0, 1) on the ∞ sheet and U_{j,k} = αβ^{-j}(k + [0, 1)) × [β^{-j}, β^{-j+1}) for
    j >= 1. A box collects every cell whose node and scale fall in it; boxes without cells are dropped, and
    boxes are ordered by level, then by k.

    The base β must be a whole number r of axis cells, β = β_axis^{r/M}, with r dividing the number of finite
    scales, so that every scale cell lies in exactly one level.

    Examples:
        >>> from varcoorbit.grid import ScaleAxis, SpatialGrid
        >>> cov = Covering(1.0, 2.0, SpatialGrid(n=16, period=4.0), ScaleAxis(per_octave=2, octaves=2))
        >>> cov.size, cov.cells_per_level
        (28, 2)
    """

    __slots__ = (
        "alpha",
        "axis",
        "beta",
        "box_index",
        "cells_per_level",
        "grid",
        "ks",
        "levels",
        "masses",
        "sample_nodes",
        "sample_slots",
    )

    def __init__(self, alpha: float, beta: float, grid: SpatialGrid, axis: ScaleAxis) -> None:
        if not alpha > 0:
            msg = f"Covering density alpha must be positive, found {alpha}"
            raise InvalidParameterError(msg)
        if not beta > 1:
            msg = f"Covering base beta must exceed 1, found {beta}"
            raise InvalidParameterError(msg)
        ratio = axis.per_octave * math.log(beta) / math.log(axis.base)
        r = round(ratio)
        if r < 1 or abs(ratio - r) > LEVEL_TOLERANCE or axis.size % r:
            msg = (
                f"Covering base {beta} must span a whole number of scale cells dividing {axis.size}; "
                f"it spans {ratio:.6g} cells of the axis"
            )
            raise InvalidParameterError(msg)

        self.alpha, self.beta, self.grid, self.axis = float(alpha), float(beta), grid, axis
        self.cells_per_level = r

        slot_levels = np.concatenate(([0], np.arange(axis.size) // r + 1))
        widths = self.alpha * self.beta ** (-slot_levels.astype(np.float64))
        cell_k = np.floor(grid.nodes[None, :] / widths[:, None] + LEVEL_TOLERANCE).astype(np.int64)
        cell_levels = np.broadcast_to(slot_levels[:, None], cell_k.shape)
        keys = np.stack([cell_levels.ravel(), cell_k.ravel()], axis=1)
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)

        self.levels: IntArray = unique[:, 0]
        self.ks: IntArray = unique[:, 1]
        self.box_index: IntArray = inverse.reshape(cell_k.shape)
        mu = grid.step * axis.sheet_weights[:, None] * np.ones(grid.n)
        self.masses: FloatArray = np.bincount(self.box_index.ravel(), weights=mu.ravel(), minlength=self.size)

        slots = np.broadcast_to(np.arange(axis.size + 1)[:, None], cell_k.shape).ravel()
        nodes = np.broadcast_to(np.arange(grid.n)[None, :], cell_k.shape).ravel()
        # corner cell: smallest scale (largest slot) and leftmost node of the box
        self.sample_slots: IntArray = np.zeros(self.size, dtype=np.int64)
        np.maximum.at(self.sample_slots, self.box_index.ravel(), slots)
        self.sample_nodes: IntArray = np.full(self.size, grid.n, dtype=np.int64)
        np.minimum.at(self.sample_nodes, self.box_index.ravel(), nodes)
        logger.debug("Covering alpha=%g beta=%g has %d boxes", alpha, beta, self.size)

    @property
    def size(self) -> int:
        return int(self.levels.shape[0])

    def __repr__(self) -> str:
        return f"Covering(alpha={self.alpha}, beta={self.beta}, boxes={self.size})"

    @property
    def points(self) -> tuple[FloatArray, FloatArray]:
        """Box corners x_{j,k} = (αβ^{-j}k, β^{-j}) and (αk, ∞) on the ∞ sheet."""
        positions = self.alpha * self.beta ** (-self.levels.astype(np.float64)) * self.ks
        scales = np.where(self.levels == 0, np.inf, self.beta ** (-self.levels.astype(np.float64)))
        return positions, scales

    @property
    def sample_cells(self) -> IntArray:
        """Flat index `slot * n + node` of the sample cell of every box."""
        return self.sample_slots * self.grid.n + self.sample_nodes

    @property
    def sample_weights(self) -> FloatArray:
        """μ-mass of each sample cell."""
        return self.grid.step * self.axis.sheet_weights[self.sample_slots]

    def analytic_measure(self) -> FloatArray:
        """μ(U_{j,k}) of the continuous boxes: α(1 - β^{-1}) for j >= 1 and α on the ∞ sheet."""
        return np.where(self.levels == 0, self.alpha, self.alpha * (1.0 - 1.0 / self.beta))

    def index_of(self, levels: IntArray, ks: IntArray) -> IntArray:
        """Box index of every `(level, k)` pair, -1 where no such box exists."""
        levels, ks = np.asarray(levels, dtype=np.int64), np.asarray(ks, dtype=np.int64)
        width = int(self.ks.max() - self.ks.min()) + 1
        offset = int(self.ks.min())
        own = self.levels * width + (self.ks - offset)
        wanted = levels * width + (ks - offset)
        pos = np.clip(np.searchsorted(own, wanted), 0, self.size - 1)
        valid = (own[pos] == wanted) & (ks >= offset) & (ks - offset < width)
        return np.where(valid, pos, -1)

    def _check_field(self, xfield: XField) -> None:
        if xfield.grid != self.grid or xfield.axis != self.axis:
            msg = "Field and covering use different discretizations of X"
            raise GridMismatchError(msg)

    def indicator_field(self, values: FloatArray | ComplexArray) -> XField:
        """Σ_i v_i·χ_{U_i} as a field."""
        values = np.asarray(values)
        if values.shape != (self.size,):
            msg = f"Expected one value per box ({self.size}), found shape {values.shape}"
            raise InvalidParameterError(msg)
        return XField(grid=self.grid, axis=self.axis, values=values[self.box_index])

    def local_sup(self, xfield: XField) -> FloatArray:
        """max over the cells of each box of |F|."""
        self._check_field(xfield)
        out = np.zeros(self.size)
        np.maximum.at(out, self.box_index.ravel(), np.abs(xfield.values).ravel())
        return out

    def _neighbour_pairs(self) -> IntArray:
        # pairs (box, box of a cell adjacent to it); the ∞ sheet only has spatial neighbours
        index = self.box_index
        pairs = []
        for dn in (-1, 0, 1):
            shifted = np.roll(index, -dn, axis=1)
            pairs.append(np.stack([index.ravel(), shifted.ravel()], axis=1))
            for ds in (-1, 1):
                lo, hi = (1, index.shape[0] - 1) if ds == 1 else (2, index.shape[0])
                if hi <= lo:
                    continue
                src = index[lo:hi]
                dst = shifted[lo + ds : hi + ds]
                pairs.append(np.stack([src.ravel(), dst.ravel()], axis=1))
        return np.unique(np.concatenate(pairs), axis=0)

    def intersection_number(self, method: Literal["geometric", "exhaustive"] = "geometric") -> int:
        """σ(U) = max_i #{j : U_j meets the closure of U_i}, the closure taken one cell wide on the torus."""
        if method == "geometric":
            pairs = self._neighbour_pairs()
            return int(np.bincount(pairs[:, 0], minlength=self.size).max())

        slots, nodes = self.box_index.shape
        cells: list[set[tuple[int, int]]] = [set() for _ in range(self.size)]
        for s in range(slots):
            for x in range(nodes):
                cells[int(self.box_index[s, x])].add((s, x))
        best = 0
        for own in cells:
            closure: set[tuple[int, int]] = set()
            for s, x in own:
                for ds in (-1, 0, 1):
                    t = s + ds
                    if t < 0 or t >= slots or (ds and (s == 0 or t == 0)):
                        continue
                    for dx in (-1, 0, 1):
                        closure.add((t, (x + dx) % nodes))
            best = max(best, sum(1 for other in cells if other & closure))
        return best


@dataclass(frozen=True, slots=True, kw_only=True, eq=False)
class SeqCoeffs:
    """Coefficients λ_i indexed by the boxes of a covering."""

    covering: Covering
    entries: ComplexArray

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.shape != (self.covering.size,):
            msg = f"Expected {self.covering.size} coefficients, found shape {entries.shape}"
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(entries)):
            msg = "Coefficients must be finite"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, covering: Covering) -> SeqCoeffs:
        return cls(covering=covering, entries=np.zeros(covering.size, dtype=np.complex128))

    def scaled_by_measure(self) -> SeqCoeffs:
        """λ_i/μ(U_i), the image under the isometry Y♮ → Y♭."""
        return SeqCoeffs(covering=self.covering, entries=self.entries / self.covering.masses)
