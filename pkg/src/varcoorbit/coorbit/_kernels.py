from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import fft as sp_fft
from scipy.linalg import circulant

from varcoorbit.exceptions import GridMismatchError, InvalidParameterError
from varcoorbit.grid import XField
from varcoorbit.spaces import space_norm
from varcoorbit.transform import AtomFamily, reproduce
from varcoorbit.weights import m_nu

if TYPE_CHECKING:
    from collections.abc import Iterable

    from typing_extensions import Self

    from varcoorbit.coorbit._covering import Covering
    from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid
    from varcoorbit.spaces import SpaceSpec
    from varcoorbit.transform import VoiceTransform
    from varcoorbit.typing import ComplexArray, FloatArray, IntArray, Phase
    from varcoorbit.weights import ReservoirWeight

__all__ = (
    "KernelOp",
    "frame_kernel",
    "gram_cross_kernel",
    "kernel_a1_norm",
    "kernel_amnu_norm",
    "kernel_apply",
    "kernel_op_norm_estimate",
    "osc_kernel",
    "reproducing_defect",
)

logger = logging.getLogger(__name__)

MAX_TABLE_CELLS = 4096


class KernelOp:
    """A kernel K(x, y) on the cells of X, tabulated densely.

    Rows and columns follow the flat cell order `slot * n + node` of
    [`XField.values`][varcoorbit.grid.XField]. The operator acts by (KF)(x) = Σ_y K(x, y)F(y)μ_y.
    """

    __slots__ = ("axis", "grid", "name", "table")

    def __init__(self, table: ComplexArray, grid: SpatialGrid, axis: ScaleAxis, name: str = "kernel") -> None:
        cells = (axis.size + 1) * grid.n
        table = np.asarray(table)
        if table.shape != (cells, cells):
            msg = f"Kernel table must have shape ({cells}, {cells}), found {table.shape}"
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(table)):
            msg = "Kernel entries must be finite"
            raise InvalidParameterError(msg)
        self.table, self.grid, self.axis, self.name = table, grid, axis, name

    @classmethod
    def identity(cls, grid: SpatialGrid, axis: ScaleAxis) -> Self:
        """The kernel δ_{x,y}/μ_y, whose action is the identity."""
        mu = XField.zeros(grid, axis).mu_weights.ravel()
        return cls(np.diag(1.0 / mu).astype(np.complex128), grid, axis, name="identity")

    @property
    def mu(self) -> FloatArray:
        return XField.zeros(self.grid, self.axis).mu_weights.ravel()

    def __repr__(self) -> str:
        return f"KernelOp(name={self.name!r}, cells={self.table.shape[0]})"

    def apply(self, xfield: XField) -> XField:
        if xfield.grid != self.grid or xfield.axis != self.axis:
            msg = "Field and kernel use different discretizations of X"
            raise GridMismatchError(msg)
        flat = self.table @ (xfield.values.ravel() * self.mu)
        return xfield.with_values(flat.reshape(xfield.shape))

    def swapped(self) -> KernelOp:
        """K*(x, y) = K(y, x)."""
        return KernelOp(self.table.T.copy(), self.grid, self.axis, name=f"{self.name}*")

    def magnitude(self) -> KernelOp:
        """|K|."""
        return KernelOp(np.abs(self.table).astype(np.complex128), self.grid, self.axis, name=f"|{self.name}|")


def _check_window(grid: SpatialGrid, axis: ScaleAxis) -> None:
    cells = (axis.size + 1) * grid.n
    if cells > MAX_TABLE_CELLS:
        msg = f"Kernel window of {cells} cells exceeds the dense limit of {MAX_TABLE_CELLS}"
        raise InvalidParameterError(msg)


def _correlations(first: ComplexArray, second: ComplexArray, grid: SpatialGrid) -> ComplexArray:
    """c_ab[d] = (2π/h)·ifft(first_a·conj(second_b))[d] for every pair of rows."""
    products = first[:, None, :] * np.conj(second[None, :, :])
    return (2.0 * np.pi / grid.step) * sp_fft.ifft(products, axis=-1)


def frame_kernel(vt: VoiceTransform) -> KernelOp:
    """Frame kernel R((x, t), (y, s)) = ⟨φ_{(y,s)}, φ_{(x,t)}⟩.

    Each scale pair contributes a circulant block. Only blocks with t-slot <= s-slot are computed; the others are
    their conjugate transposes, so the table is hermitian.
    """
    _check_window(vt.grid, vt.axis)
    n, slots = vt.grid.n, vt.axis.size + 1
    corr = _correlations(vt.atoms, vt.atoms, vt.grid)
    table = np.empty((slots * n, slots * n), dtype=np.complex128)
    for a in range(slots):
        for b in range(a, slots):
            block = circulant(corr[b, a])
            table[a * n : (a + 1) * n, b * n : (b + 1) * n] = block
            if b != a:
                table[b * n : (b + 1) * n, a * n : (a + 1) * n] = block.conj().T
        diagonal = table[a * n : (a + 1) * n, a * n : (a + 1) * n]
        table[a * n : (a + 1) * n, a * n : (a + 1) * n] = 0.5 * (diagonal + diagonal.conj().T)
    logger.debug("Frame kernel tabulated on %d cells", slots * n)
    return KernelOp(table, vt.grid, vt.axis, name="R")


def reproducing_defect(vt: VoiceTransform, f: GridSignal, kernel: KernelOp | None = None) -> float:
    """‖R(Vf) - Vf‖/‖Vf‖ in L2(X, μ); the dense kernel path is used when `kernel` is given."""
    field = vt.apply(f)
    norm = field.l2_norm()
    if norm == 0:
        return 0.0
    projected = kernel.apply(field) if kernel is not None else reproduce(vt, field)
    return (projected - field).l2_norm() / norm


def _cross_table(family: AtomFamily, vt: VoiceTransform) -> ComplexArray:
    # C(x, z) = ⟨φ_x, ψ_z⟩; block (a, b) is circulant(c_ab)ᵀ
    n, slots = vt.grid.n, vt.axis.size + 1
    corr = _correlations(vt.atoms, family.spectra(vt.grid, vt.axis), vt.grid)
    table = np.empty((slots * n, slots * n), dtype=np.complex128)
    for a in range(slots):
        for b in range(slots):
            table[a * n : (a + 1) * n, b * n : (b + 1) * n] = circulant(corr[a, b]).T
    return table


def _box_order(covering: Covering) -> tuple[IntArray, IntArray, IntArray]:
    # cells sorted by box, the start of every box in that order, and the box of every cell
    boxes = covering.box_index.ravel()
    order = np.argsort(boxes, kind="stable")
    starts = np.searchsorted(boxes[order], np.arange(covering.size))
    return order, starts, boxes


def _check_covering(vt: VoiceTransform, covering: Covering) -> None:
    if covering.grid != vt.grid or covering.axis != vt.axis:
        msg = "Covering and transform use different discretizations of X"
        raise GridMismatchError(msg)


def gram_cross_kernel(family: AtomFamily | None, vt: VoiceTransform, covering: Covering) -> KernelOp:
    """Gramian kernel K_U[G, F](x, y) = sup_{z ∈ Q_y} |⟨φ_x, ψ_z⟩| with Q_y the box of y.

    The supremum runs over the cells of the box. `family=None` uses the frame itself, which gives M_U.
    """
    _check_window(vt.grid, vt.axis)
    _check_covering(vt, covering)
    if family is None:
        family = AtomFamily.from_pair(vt.pair)
    magnitude = np.abs(_cross_table(family, vt))
    order, starts, boxes = _box_order(covering)
    box_max = np.maximum.reduceat(magnitude[:, order], starts, axis=1)
    return KernelOp(box_max[:, boxes].astype(np.complex128), vt.grid, vt.axis, name=f"K[{family.name}]")


def osc_kernel(
    vt: VoiceTransform,
    covering: Covering,
    phase: Phase = "trivial",
    frame: KernelOp | None = None,
) -> KernelOp:
    """Oscillation kernel osc(x, y) = sup_{z ∈ Q_y} |R(x, y) - Γ(y, z)R(x, z)| with Γ ≡ 1.

    Arguments:
        vt: Voice transform of the frame.
        covering: Covering whose boxes define the neighbourhoods Q_y.
        phase: Phase function; only `"trivial"` is available.
        frame: Precomputed frame kernel of `vt`.
    """
    if phase != "trivial":
        msg = f"Only the trivial phase is supported, found {phase!r}"
        raise InvalidParameterError(msg)
    _check_covering(vt, covering)
    table = (frame if frame is not None else frame_kernel(vt)).table
    out = np.zeros(table.shape, dtype=np.float64)
    order, starts, _ = _box_order(covering)
    ends = np.append(starts[1:], order.size)
    for start, end in zip(starts, ends, strict=True):
        cells = order[start:end]
        block = table[:, cells]
        out[:, cells] = np.abs(block[:, :, None] - block[:, None, :]).max(axis=2)
    return KernelOp(out.astype(np.complex128), vt.grid, vt.axis, name="osc")


def kernel_a1_norm(kernel: KernelOp) -> float:
    """‖K | A₁‖ = max(sup_x Σ_y |K(x, y)|μ_y, sup_y Σ_x |K(x, y)|μ_x)."""
    magnitude = np.abs(kernel.table)
    mu = kernel.mu
    rows = magnitude @ mu
    cols = mu @ magnitude
    return float(max(rows.max(), cols.max()))


def _m_nu_table(nu: ReservoirWeight, grid: SpatialGrid, axis: ScaleAxis) -> FloatArray:
    x = np.broadcast_to(grid.nodes[None, :], (axis.size + 1, grid.n)).ravel()
    t = np.broadcast_to(axis.slot_scales[:, None], (axis.size + 1, grid.n)).ravel()
    return m_nu(nu, (x[:, None], t[:, None]), (x[None, :], t[None, :]))


def kernel_amnu_norm(kernel: KernelOp, nu: ReservoirWeight) -> float:
    """‖K | A_{m_ν}‖, the A₁ norm of |K|·m_ν."""
    weighted = np.abs(kernel.table) * _m_nu_table(nu, kernel.grid, kernel.axis)
    return kernel_a1_norm(KernelOp(weighted.astype(np.complex128), kernel.grid, kernel.axis))


def kernel_apply(kernel: KernelOp, xfield: XField) -> XField:
    return kernel.apply(xfield)


def kernel_op_norm_estimate(kernel: KernelOp, spec: SpaceSpec, battery: Iterable[XField]) -> float:
    """max over the battery of ‖KF‖_Y/‖F‖_Y, a lower bound on the operator norm on Y.

    Raises:
        InvalidParameterError: If no battery field has a positive norm.
    """
    ratios = []
    for xfield in battery:
        norm = space_norm(spec, xfield)
        if norm > 0:
            ratios.append(space_norm(spec, kernel.apply(xfield)) / norm)
    if not ratios:
        msg = "Operator norm estimate needs a battery field of positive norm"
        raise InvalidParameterError(msg)
    return max(ratios)
