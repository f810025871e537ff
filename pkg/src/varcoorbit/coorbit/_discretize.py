from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from varcoorbit.coorbit._covering import Covering, SeqCoeffs
from varcoorbit.coorbit._kernels import frame_kernel, kernel_a1_norm, kernel_amnu_norm, osc_kernel
from varcoorbit.exceptions import GridMismatchError, InvalidParameterError, NoContractionError, RangeGateWarning
from varcoorbit.grid import GridSignal, XField
from varcoorbit.spaces import quasi_triangle_constant, space_norm
from varcoorbit.transform import reproduce
from varcoorbit.weights import ReservoirWeight

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from varcoorbit.spaces import SpaceSpec
    from varcoorbit.transform import VoiceTransform
    from varcoorbit.typing import SweepRecord

__all__ = (
    "NeumannResult",
    "SweepRow",
    "atomic_decompose",
    "atomic_synthesize",
    "discretization_op",
    "discretization_sweep",
    "gate_value",
    "neumann_invert",
    "pairing_defect",
    "reconstruction_residual",
    "sweep_monotone",
)

logger = logging.getLogger(__name__)

RANGE_GATE = 5e-2
NEUMANN_TOLERANCE = 1e-10
NEUMANN_MAX_ITER = 500
DEFAULT_ALPHAS = (1.0, 0.5, 0.25, 0.125)
DEFAULT_BETAS = (2.0, 2.0**0.5, 2.0**0.25)


def _check(vt: VoiceTransform, covering: Covering, xfield: XField) -> None:
    if covering.grid != vt.grid or covering.axis != vt.axis:
        msg = "Covering and transform use different discretizations of X"
        raise GridMismatchError(msg)
    if xfield.grid != vt.grid or xfield.axis != vt.axis:
        msg = "Field and transform use different discretizations of X"
        raise GridMismatchError(msg)


def _sampled(covering: Covering, projected: XField) -> XField:
    # point masses c_i·(RF)(x_i) at the sample cells, stored as densities
    flat = np.zeros(projected.values.size, dtype=np.complex128)
    cells = covering.sample_cells
    flat[cells] = covering.masses * projected.values.ravel()[cells] / covering.sample_weights
    return projected.with_values(flat.reshape(projected.shape))


def _discretize(vt: VoiceTransform, covering: Covering, xfield: XField) -> XField:
    return reproduce(vt, _sampled(covering, reproduce(vt, xfield)))


def discretization_op(
    vt: VoiceTransform,
    covering: Covering,
    xfield: XField,
    *,
    gate: float | None = RANGE_GATE,
) -> XField:
    """Discretization operator U_Φ F = Σ_i c_i·F(x_i)·R(·, x_i) for the characteristic partition of unity.

    c_i is the μ-mass of box i and F(x_i) is read from RF at the sample cell of the box.

    Arguments:
        vt: Voice transform of the frame.
        covering: Covering providing boxes, masses and sample points.
        xfield: Field on X.
        gate: Largest tolerated ‖RF - F‖/‖F‖; `None` skips the check.

    Warns:
        RangeGateWarning: If F is further than `gate` from the reproducing range.
    """
    _check(vt, covering, xfield)
    projected = reproduce(vt, xfield)
    if gate is not None:
        norm = xfield.l2_norm()
        defect = (projected - xfield).l2_norm() / norm if norm > 0 else 0.0
        if defect > gate:
            msg = f"Field lies {defect:.3g} away from the reproducing range, above the gate {gate:g}"
            warnings.warn(msg, RangeGateWarning, stacklevel=2)
    return reproduce(vt, _sampled(covering, projected))


@dataclass(frozen=True, slots=True, kw_only=True)
class NeumannResult:
    """Outcome of the Neumann iteration for U_Φ G = F.

    Attributes:
        solution: The last iterate G.
        iterations: Number of corrections applied.
        residual: ‖F - U_Φ G‖/‖F‖ in L2(X, μ).
        ratio: Contraction ratio measured on the first correction.
        converged: Whether the residual fell below the tolerance.
        y_residual: The residual measured in the Y quasi-norm, when a space was given.
    """

    solution: XField
    iterations: int
    residual: float
    ratio: float
    converged: bool
    y_residual: float | None = None


def _neumann(
    vt: VoiceTransform,
    covering: Covering,
    xfield: XField,
    tol: float,
    max_iter: int,
    spec: SpaceSpec | None = None,
) -> NeumannResult:
    norm = xfield.l2_norm()
    if norm == 0:
        return NeumannResult(solution=xfield, iterations=0, residual=0.0, ratio=0.0, converged=True)
    solution = xfield
    residual = xfield - _discretize(vt, covering, solution)
    first = residual.l2_norm()
    ratio = 0.0
    iterations = 0
    while residual.l2_norm() / norm >= tol and iterations < max_iter:
        solution = solution + residual
        residual = xfield - _discretize(vt, covering, solution)
        iterations += 1
        if iterations == 1:
            ratio = residual.l2_norm() / first
            if ratio >= 1:
                break
        logger.debug("Neumann step %d: residual %.3e", iterations, residual.l2_norm() / norm)
    relative = residual.l2_norm() / norm
    y_residual = None
    if spec is not None:
        y_norm = space_norm(spec, xfield)
        y_residual = space_norm(spec, residual) / y_norm if y_norm > 0 else 0.0
    return NeumannResult(
        solution=solution,
        iterations=iterations,
        residual=relative,
        ratio=ratio,
        converged=relative < tol,
        y_residual=y_residual,
    )


def neumann_invert(
    vt: VoiceTransform,
    covering: Covering,
    xfield: XField,
    tol: float = NEUMANN_TOLERANCE,
    max_iter: int = NEUMANN_MAX_ITER,
    *,
    spec: SpaceSpec | None = None,
) -> NeumannResult:
    """Solve U_Φ G = F with the Neumann iteration G_{n+1} = G_n + (F - U_Φ G_n), G₀ = F.

    Raises:
        NoContractionError: If the first correction does not shrink the residual.
    """
    _check(vt, covering, xfield)
    result = _neumann(vt, covering, xfield, tol, max_iter, spec)
    if result.ratio >= 1:
        msg = f"No contraction at alpha={covering.alpha:g}, beta={covering.beta:g}: ratio {result.ratio:.4g}"
        raise NoContractionError(msg, ratio=result.ratio)
    if not result.converged:
        logger.warning(
            "Neumann iteration stopped after %d steps at residual %.3e", result.iterations, result.residual
        )
    return result


def atomic_decompose(
    vt: VoiceTransform,
    covering: Covering,
    f: GridSignal,
    tol: float = NEUMANN_TOLERANCE,
    max_iter: int = NEUMANN_MAX_ITER,
) -> SeqCoeffs:
    """Dual-frame coefficients λ_i = c_i·(U_Φ^{-1}Vf)(x_i), so that f = Σ_i λ_i φ_{x_i}.

    Raises:
        NoContractionError: If U_Φ is not a contraction perturbation of the identity at this covering.
    """
    field = vt.apply(f)
    result = neumann_invert(vt, covering, field, tol, max_iter)
    projected = reproduce(vt, result.solution).values.ravel()
    return SeqCoeffs(covering=covering, entries=covering.masses * projected[covering.sample_cells])


def atomic_synthesize(vt: VoiceTransform, covering: Covering, coeffs: SeqCoeffs) -> GridSignal:
    """Σ_i λ_i φ_{x_i}, the adjoint transform of the point masses λ_i at the sample cells."""
    if coeffs.covering is not covering:
        msg = "Coefficients belong to a different covering"
        raise InvalidParameterError(msg)
    flat = np.zeros((vt.axis.size + 1) * vt.grid.n, dtype=np.complex128)
    flat[covering.sample_cells] = coeffs.entries / covering.sample_weights
    atomic = XField(grid=vt.grid, axis=vt.axis, values=flat.reshape(vt.axis.size + 1, vt.grid.n))
    return vt.adjoint(atomic)


def reconstruction_residual(
    vt: VoiceTransform,
    covering: Covering,
    f: GridSignal,
    tol: float = NEUMANN_TOLERANCE,
    max_iter: int = NEUMANN_MAX_ITER,
) -> float:
    """‖f - synthesize(decompose(f))‖₂/‖f‖₂."""
    norm = f.l2_norm()
    if norm == 0:
        return 0.0
    coeffs = atomic_decompose(vt, covering, f, tol, max_iter)
    return (f - atomic_synthesize(vt, covering, coeffs)).l2_norm() / norm


def pairing_defect(vt: VoiceTransform, covering: Covering, left: XField, right: XField) -> float:
    """|⟨U_Φ F, G⟩ - ⟨F, U_Φ G⟩|/(‖F‖‖G‖)."""
    scale = left.l2_norm() * right.l2_norm()
    if scale == 0:
        return 0.0
    forward = discretization_op(vt, covering, left, gate=None).inner(right)
    backward = left.inner(discretization_op(vt, covering, right, gate=None))
    return abs(forward - backward) / scale


def gate_value(osc_norm: float, r_norm: float, c_y: float) -> tuple[float, bool]:
    """Smallness gate δ((1 + C_Y)‖|R|‖ + C_Yδ)C_Y with δ the oscillation norm, and whether it is <= 1.

    Examples:
        >>> value, holds = gate_value(0.1, 1.0, 1.0)
        >>> round(value, 12), holds
        (0.21, True)
    """
    value = osc_norm * ((1.0 + c_y) * r_norm + c_y * osc_norm) * c_y
    return value, value <= 1.0


@dataclass(frozen=True, slots=True, kw_only=True)
class SweepRow:
    """Measurements at one point (α, β) of a discretization sweep."""

    alpha: float
    beta: float
    osc_a1: float
    osc_amnu: float
    contraction_ratio: float
    discretization_residual: float
    recon_residual: float
    gate_value: float
    gate_holds: bool
    converged: bool

    def to_record(self) -> SweepRecord:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "osc_a1": self.osc_a1,
            "osc_amnu": self.osc_amnu,
            "contraction_ratio": self.contraction_ratio,
            "discretization_residual": self.discretization_residual,
            "recon_residual": self.recon_residual,
            "gate_value": self.gate_value,
            "gate_holds": self.gate_holds,
            "converged": self.converged,
        }


def _recon(vt: VoiceTransform, covering: Covering, f: GridSignal, result: NeumannResult) -> float:
    projected = reproduce(vt, result.solution).values.ravel()
    coeffs = SeqCoeffs(covering=covering, entries=covering.masses * projected[covering.sample_cells])
    return (f - atomic_synthesize(vt, covering, coeffs)).l2_norm() / f.l2_norm()


def discretization_sweep(
    vt: VoiceTransform,
    battery: Iterable[GridSignal],
    spec: SpaceSpec,
    *,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    betas: Sequence[float] = DEFAULT_BETAS,
    tol: float = NEUMANN_TOLERANCE,
    max_iter: int = NEUMANN_MAX_ITER,
) -> list[SweepRow]:
    """Oscillation norms, contraction and residuals at every (α, β), β outer and α inner.

    `spec` supplies the quasi-triangle constant of Y and the associated weight ν of its weight and exponent.

    Raises:
        InvalidParameterError: If the battery has no nonzero signal.
    """
    signals = [f for f in battery if f.l2_norm() > 0]
    if not signals:
        msg = "Discretization sweep needs at least one nonzero signal"
        raise InvalidParameterError(msg)
    fields = [vt.apply(f) for f in signals]
    frame = frame_kernel(vt)
    nu = ReservoirWeight.associated(spec.w, spec.p, vt.axis)
    r_norm = kernel_amnu_norm(frame, nu)
    c_y = quasi_triangle_constant(spec)

    rows = []
    for beta in betas:
        for alpha in alphas:
            covering = Covering(alpha, beta, vt.grid, vt.axis)
            osc = osc_kernel(vt, covering, frame=frame)
            osc_a1, osc_amnu = kernel_a1_norm(osc), kernel_amnu_norm(osc, nu)
            value, holds = gate_value(max(osc_a1, osc_amnu), r_norm, c_y)
            residual = max(
                (xfield - _discretize(vt, covering, xfield)).l2_norm() / xfield.l2_norm() for xfield in fields
            )
            results = [_neumann(vt, covering, xfield, tol, max_iter) for xfield in fields]
            ratio = max(result.ratio for result in results)
            converged = ratio < 1 and all(result.converged for result in results)
            recon = (
                max(_recon(vt, covering, f, result) for f, result in zip(signals, results, strict=True))
                if converged
                else math.nan
            )
            rows.append(
                SweepRow(
                    alpha=alpha,
                    beta=beta,
                    osc_a1=osc_a1,
                    osc_amnu=osc_amnu,
                    contraction_ratio=ratio,
                    discretization_residual=residual,
                    recon_residual=recon,
                    gate_value=value,
                    gate_holds=holds,
                    converged=converged,
                )
            )
            logger.info("Sweep alpha=%g beta=%g: osc=%.3g ratio=%.3g", alpha, beta, osc_a1, ratio)
    return rows


def sweep_monotone(rows: Sequence[SweepRow], column: str, *, slack: float = 1e-12) -> bool:
    """Whether `column` is non-increasing along decreasing α at every fixed β."""
    by_beta: dict[float, list[SweepRow]] = {}
    for row in rows:
        by_beta.setdefault(row.beta, []).append(row)
    for group in by_beta.values():
        values = [getattr(row, column) for row in sorted(group, key=lambda row: -row.alpha)]
        if any(later > earlier * (1.0 + slack) + slack for earlier, later in itertools.pairwise(values)):
            return False
    return True
