from __future__ import annotations

from collections.abc import Callable
from typing import TYPE_CHECKING, Any, Literal, TypeAlias, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt


FloatArray: TypeAlias = "npt.NDArray[np.float64]"
"""Real-valued numpy array."""

ComplexArray: TypeAlias = "npt.NDArray[np.complex128]"
"""Complex-valued numpy array."""

IntArray: TypeAlias = "npt.NDArray[np.intp]"
"""Integer index array."""

ProfileFunc: TypeAlias = "Callable[[FloatArray], FloatArray | ComplexArray]"
"""A frequency profile: maps an array of frequencies to (possibly complex) samples of a Fourier transform."""

WeightFunc: TypeAlias = "Callable[[FloatArray, FloatArray], FloatArray]"
"""A weight evaluator: maps broadcastable arrays `(x, t)` to positive values, `t = inf` selecting the ∞ sheet."""

Domain: TypeAlias = Literal["space", "frequency"]
"""Where the samples of a [`GridSignal`][varcoorbit.grid.GridSignal] live."""

Normalization: TypeAlias = Literal["raw", "parseval"]
"""Normalization flag of an [`AnalyzerPair`][varcoorbit.analyzers.AnalyzerPair]."""

DilationNorm: TypeAlias = Literal["l1", "l2"]
"""Dilation convention: `l1` gives Φ̂(tξ), `l2` gives t^{1/2}Φ̂(tξ)."""

RampName: TypeAlias = Literal["polynomial", "smooth"]
"""Transition ramp used by Meyer generators and dyadic partitions of unity."""

AnalyzerName: TypeAlias = Literal["meyer", "dyadic-pu", "bump-band"]
"""Names of the built-in analyzing pairs."""

Family: TypeAlias = Literal["F", "B", "P", "L"]
"""Space family: Triebel-Lizorkin (F), Besov (B), Peetre-Wiener on X with pointwise (P) or outer (L) q."""

Variant: TypeAlias = Literal["def", "norm1", "norm2", "norm3", "norm4"]
"""Norm characterization: the dyadic definition or one of the four continuous characterizations."""

Phase: TypeAlias = Literal["trivial"]
"""Phase function of the oscillation kernel; only Γ ≡ 1 is supported."""

GeneratorParams: TypeAlias = dict[str, Any]
"""Keyword parameters of a named generator, as parsed by [`deserialize_generator`][varcoorbit.serde]."""


class NormRecord(TypedDict):
    """JSON record of a single norm evaluation."""

    family: str
    variant: str
    value: float
    flags: list[str]


class SweepRecord(TypedDict):
    """Row of a discretization sweep."""

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
