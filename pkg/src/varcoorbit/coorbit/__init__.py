from __future__ import annotations

from varcoorbit.coorbit._covering import Covering, SeqCoeffs
from varcoorbit.coorbit._discretize import (
    NeumannResult,
    SweepRow,
    atomic_decompose,
    atomic_synthesize,
    discretization_op,
    discretization_sweep,
    gate_value,
    neumann_invert,
    pairing_defect,
    reconstruction_residual,
    sweep_monotone,
)
from varcoorbit.coorbit._expansion import MeyerExpansion, coorbit_norm, meyer_atom, wavelet_frame_expand
from varcoorbit.coorbit._kernels import (
    KernelOp,
    frame_kernel,
    gram_cross_kernel,
    kernel_a1_norm,
    kernel_amnu_norm,
    kernel_apply,
    kernel_op_norm_estimate,
    osc_kernel,
    reproducing_defect,
)

__all__ = (
    "Covering",
    "KernelOp",
    "MeyerExpansion",
    "NeumannResult",
    "SeqCoeffs",
    "SweepRow",
    "atomic_decompose",
    "atomic_synthesize",
    "coorbit_norm",
    "discretization_op",
    "discretization_sweep",
    "frame_kernel",
    "gate_value",
    "gram_cross_kernel",
    "kernel_a1_norm",
    "kernel_amnu_norm",
    "kernel_apply",
    "kernel_op_norm_estimate",
    "meyer_atom",
    "neumann_invert",
    "osc_kernel",
    "pairing_defect",
    "reconstruction_residual",
    "reproducing_defect",
    "sweep_monotone",
    "wavelet_frame_expand",
)
