"""Analyzing systems: dyadic partitions of unity, Meyer generators and admissible continuous-frame pairs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial import Chebyshev
from numpy.polynomial.legendre import leggauss

from varcoorbit.exceptions import InvalidParameterError, NegativeRadicandError
from varcoorbit.grid import SQRT_2PI

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from varcoorbit.grid import ScaleAxis, SpatialGrid
    from varcoorbit.typing import (
        AnalyzerName,
        ComplexArray,
        FloatArray,
        Normalization,
        ProfileFunc,
        RampName,
    )

__all__ = (
    "AnalyzerPair",
    "DyadicPU",
    "FrequencyProfile",
    "MeyerSystem",
    "MomentReport",
    "TauberianReport",
    "admissibility_defect",
    "dyadic_partition",
    "make_admissible_pair",
    "make_analyzer",
    "meyer_generators",
    "moment_check",
    "ramp",
    "tauberian_check",
    "tensor_wavelet",
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
RADICAND_TOLERANCE = 1e-12
MOMENT_TOLERANCE = 1e-8
TAUBERIAN_MARGIN = 1e-2
MOMENT_DEGREE = 12
MOMENT_HALF_WIDTH = 0.1
BUMP_BAND = (0.5, 2.0)


def _polynomial_ramp(u: FloatArray) -> FloatArray:
    u = np.clip(u, 0.0, 1.0)
    return u**4 * (35.0 - 84.0 * u + 70.0 * u**2 - 20.0 * u**3)


def _smooth_ramp(u: FloatArray) -> FloatArray:
    u = np.asarray(u, dtype=np.float64)
    inner = (u > 0) & (u < 1)
    safe = np.clip(np.where(inner, u, 0.5), 1e-300, 1.0 - 1e-16)
    left, right = np.exp(-1.0 / safe), np.exp(-1.0 / (1.0 - safe))
    return np.where(inner, left / (left + right), np.where(u >= 1, 1.0, 0.0))


_RAMPS: dict[str, Callable[[FloatArray], FloatArray]] = {
    "polynomial": _polynomial_ramp,
    "smooth": _smooth_ramp,
}


def ramp(name: RampName) -> Callable[[FloatArray], FloatArray]:
    """Transition ramp ν with ν = 0 on (-∞, 0], ν = 1 on [1, ∞) and ν(u) + ν(1 - u) = 1.

    `"polynomial"` is the C³ ramp 35u⁴ - 84u⁵ + 70u⁶ - 20u⁷, `"smooth"` the C^∞ quotient of exponentials.

    Examples:
        >>> import numpy as np
        >>> nu = ramp("polynomial")
        >>> nu(np.array([0.0, 0.5, 1.0])).tolist()
        [0.0, 0.5, 1.0]
    """
    if (func := _RAMPS.get(name)) is None:
        msg = f"Unknown ramp {name!r}; expected one of {sorted(_RAMPS)}"
        raise InvalidParameterError(msg)
    return func


@dataclass(frozen=True, slots=True, kw_only=True)
class FrequencyProfile:
    """A Fourier-side generator Φ̂ with its radial support {inner_radius <= |ξ| <= outer_radius}.

    `inner_radius = 0` means Φ̂ does not vanish near the origin.
    """

    func: ProfileFunc
    inner_radius: float
    outer_radius: float
    name: str = "profile"

    def __post_init__(self) -> None:
        if not 0 <= self.inner_radius < self.outer_radius:
            msg = f"Profile support needs 0 <= inner < outer, found [{self.inner_radius}, {self.outer_radius}]"
            raise InvalidParameterError(msg)

    def __call__(self, xi: FloatArray) -> ComplexArray:
        return np.asarray(self.func(np.asarray(xi, dtype=np.float64)), dtype=np.complex128)

    def samples(self, grid: SpatialGrid) -> ComplexArray:
        """Samples at the grid's frequency nodes, FFT order."""
        return self(grid.frequencies)

    def scaled(self, factor: float) -> FrequencyProfile:
        func = self.func
        return replace(self, func=lambda xi: factor * np.asarray(func(xi)))


@dataclass(frozen=True, slots=True, kw_only=True)
class DyadicPU:
    """Smooth dyadic partition of unity: φ₀ = 1 on |ξ| <= 1, φ₀ = 0 on |ξ| >= 2, φ = φ₀ - φ₀(2·).

    With φ_j = φ(2^{-j}·) for j >= 1, Σ_{j<=J} φ_j = φ₀(2^{-J}·).
    """

    ramp_name: RampName = "smooth"

    # 1 - ν(u) is evaluated as ν(1 - u), exact near the support edges
    def phi0(self, xi: FloatArray) -> FloatArray:
        return ramp(self.ramp_name)(2.0 - np.abs(xi))

    def phi(self, xi: FloatArray) -> FloatArray:
        r = np.abs(np.asarray(xi, dtype=np.float64))
        nu = ramp(self.ramp_name)
        return np.where(r <= 1.0, nu(2.0 * r - 1.0), nu(2.0 - r))

    def phi_j(self, j: int, xi: FloatArray) -> FloatArray:
        if j < 0:
            msg = f"Level must be nonnegative, found {j}"
            raise InvalidParameterError(msg)
        return self.phi0(xi) if j == 0 else self.phi(np.asarray(xi) * 2.0**-j)

    def samples(self, grid: SpatialGrid, j_max: int) -> FloatArray:
        """φ_j at the grid's frequency nodes for 0 <= j <= j_max, shape `(j_max + 1, n)`."""
        xi = grid.frequencies
        return np.stack([self.phi_j(j, xi) for j in range(j_max + 1)])

    def band_profile(self) -> FrequencyProfile:
        return FrequencyProfile(func=self.phi, inner_radius=0.5, outer_radius=2.0, name="dyadic-pu")


def dyadic_partition(smoothness: RampName = "smooth") -> DyadicPU:
    """Build the dyadic partition of unity with the given ramp.

    Examples:
        >>> import numpy as np
        >>> pu = dyadic_partition()
        >>> xi = np.array([3.0])
        >>> round(float(sum(pu.phi_j(j, xi)[0] for j in range(6))), 12)
        1.0
    """
    return DyadicPU(ramp_name=smoothness)


def _gauss_panels(edges: Sequence[float], panels: int = 32, order: int = 16) -> tuple[FloatArray, FloatArray]:
    # Composite Gauss-Legendre rule with `panels` equal panels between consecutive edges
    base_x, base_w = leggauss(order)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:], strict=False):
        cuts = np.linspace(lo, hi, panels + 1)
        half = 0.5 * np.diff(cuts)[:, None]
        mid = 0.5 * (cuts[:-1] + cuts[1:])[:, None]
        nodes.append((mid + half * base_x).ravel())
        weights.append((half * base_w).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass(frozen=True, slots=True, kw_only=True)
class MeyerSystem:
    """Meyer scaling function ψ⁰ and wavelet ψ¹, defined on the Fourier side.

    ψ̂⁰ = (2π)^{-1/2} on |ξ| <= 2π/3 and vanishes beyond 4π/3; ψ̂¹ is supported in 2π/3 <= |ξ| <= 8π/3 and
    carries the phase e^{-iξ/2}, so that ψ¹ is real and symmetric about 1/2.
    """

    ramp_name: RampName = "smooth"

    @property
    def scaling_support(self) -> float:
        return 4.0 * math.pi / 3.0

    @property
    def wavelet_support(self) -> tuple[float, float]:
        return (2.0 * math.pi / 3.0, 8.0 * math.pi / 3.0)

    def _nu(self, u: FloatArray) -> FloatArray:
        return ramp(self.ramp_name)(u)

    def psi0_hat(self, xi: FloatArray) -> FloatArray:
        r = np.abs(np.asarray(xi, dtype=np.float64))
        values = np.sin(0.5 * math.pi * self._nu(2.0 - 3.0 * r / TWO_PI)) / SQRT_2PI
        return np.where(r >= self.scaling_support, 0.0, values)

    def psi1_modulus(self, xi: FloatArray) -> FloatArray:
        """|ψ̂¹(ξ)|, the real profile used by the continuous analyzer."""
        r = np.abs(np.asarray(xi, dtype=np.float64))
        rising = np.sin(0.5 * math.pi * self._nu(3.0 * r / TWO_PI - 1.0))
        # cos(πν(u)/2) = sin(πν(1 - u)/2)
        falling = np.sin(0.5 * math.pi * self._nu(2.0 - 3.0 * r / (2.0 * TWO_PI)))
        values = np.where(r <= 2.0 * TWO_PI / 3.0, rising, falling) / SQRT_2PI
        return np.where(r >= self.wavelet_support[1], 0.0, values)

    def psi1_hat(self, xi: FloatArray) -> ComplexArray:
        xi = np.asarray(xi, dtype=np.float64)
        return np.exp(-0.5j * xi) * self.psi1_modulus(xi)

    def _inverse_fourier(self, profile: ProfileFunc, radius: float, x: FloatArray) -> FloatArray:
        kinks = [k * math.pi / 3.0 for k in (2.0, 4.0, 8.0) if k * math.pi / 3.0 <= radius]
        edges = sorted({-radius, *(-k for k in kinks), *kinks, radius})
        xi, w = _gauss_panels(edges)
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        values = np.exp(1j * x[:, None] * xi[None, :]) @ (profile(xi) * w)
        return values.real / SQRT_2PI

    def scaling_function(self, x: FloatArray) -> FloatArray:
        """ψ⁰(x) from Gauss-Legendre quadrature of the inverse Fourier integral."""
        return self._inverse_fourier(self.psi0_hat, self.scaling_support, x)

    def wavelet(self, x: FloatArray) -> FloatArray:
        """ψ¹(x) from Gauss-Legendre quadrature of the inverse Fourier integral."""
        return self._inverse_fourier(self.psi1_hat, self.wavelet_support[1], x)

    def factor(self, c: int) -> Callable[[FloatArray], FloatArray]:
        if c not in {0, 1}:
            msg = f"Meyer factor index must be 0 or 1, found {c}"
            raise InvalidParameterError(msg)
        return self.scaling_function if c == 0 else self.wavelet


def meyer_generators(smoothness: RampName = "smooth") -> MeyerSystem:
    """Meyer generators built from the given ramp.

    Examples:
        >>> import math
        >>> system = meyer_generators()
        >>> float(system.psi0_hat(0.0)) == 1 / math.sqrt(2 * math.pi)
        True
        >>> float(system.psi1_modulus(0.5))
        0.0
    """
    return MeyerSystem(ramp_name=smoothness)


def tensor_wavelet(c: Sequence[int], point: Sequence[float], system: MeyerSystem | None = None) -> float:
    """Tensor Meyer function ψ^c(x) = Π_i ψ^{c_i}(x_i).

    Raises:
        InvalidParameterError: If `c` and `point` differ in length or `c` is empty.
    """
    if len(c) != len(point) or not c:
        msg = f"Sign pattern and point must share a positive dimension, found {len(c)} and {len(point)}"
        raise InvalidParameterError(msg)
    system = system or meyer_generators()
    value = 1.0
    for ci, xi in zip(c, point, strict=True):
        value *= float(system.factor(ci)(np.array([xi]))[0])
    return value


@dataclass(frozen=True, slots=True, kw_only=True)
class AnalyzerPair:
    """Generators (Φ₀, Φ) of a continuous wavelet frame with their verification metadata.

    Attributes:
        phi0_hat: Profile of Φ̂₀, used on the ∞ sheet.
        phi_hat: Profile of Φ̂, dilated over the finite scales.
        epsilon0: Tauberian radius of Φ̂₀.
        epsilon: Tauberian radius of Φ̂.
        moment_order: Number R of vanishing moments of Φ̂; `inf` when Φ̂ vanishes near 0.
        admissibility_constant: C with |Φ̂₀(ξ)|² + ∫₀¹|Φ̂(tξ)|² dt/t = C.
        normalization: `"parseval"` when C = (2π)^{-1}, making the frame tight with bound 1.
        name: Label for reports.
    """

    phi0_hat: FrequencyProfile
    phi_hat: FrequencyProfile
    epsilon0: float
    epsilon: float
    moment_order: float
    admissibility_constant: float
    normalization: Normalization = "raw"
    name: str = "custom"

    def parseval(self) -> AnalyzerPair:
        """Rescale both generators by (2πC)^{-1/2}."""
        if self.normalization == "parseval":
            return self
        factor = 1.0 / math.sqrt(TWO_PI * self.admissibility_constant)
        return replace(
            self,
            phi0_hat=self.phi0_hat.scaled(factor),
            phi_hat=self.phi_hat.scaled(factor),
            admissibility_constant=1.0 / TWO_PI,
            normalization="parseval",
        )


class _ScaleEnergy:
    """G(ξ) = ∫₀¹|Φ̂(tξ)|² dt/t = ∫₀^{|ξ|}|Φ̂(±u)|² du/u by composite Gauss-Legendre panels."""

    __slots__ = ("_cumulative", "_edges", "_profile", "_tails", "_weights", "_x")

    def __init__(self, profile: FrequencyProfile, panels: int = 256, order: int = 16) -> None:
        if profile.inner_radius <= 0:
            msg = f"Profile {profile.name!r} must vanish near the origin for a finite scale energy"
            raise InvalidParameterError(msg)
        self._profile = profile
        self._edges = np.linspace(profile.inner_radius, profile.outer_radius, panels + 1)
        self._x, self._weights = leggauss(order)
        pieces = {sign: self._partial(self._edges[:-1], self._edges[1:], sign) for sign in (1.0, -1.0)}
        self._cumulative = {sign: np.concatenate(([0.0], np.cumsum(p))) for sign, p in pieces.items()}
        # summed from the top so that tails near the outer radius keep their relative precision
        self._tails = {sign: np.concatenate((np.cumsum(p[::-1])[::-1], [0.0])) for sign, p in pieces.items()}

    def _integrand(self, u: FloatArray, sign: float) -> FloatArray:
        return np.abs(self._profile(sign * u)) ** 2 / u

    def _partial(self, lo: FloatArray, hi: FloatArray, sign: float) -> FloatArray:
        half = 0.5 * (hi - lo)[:, None]
        nodes = 0.5 * (hi + lo)[:, None] + half * self._x
        return np.sum(self._integrand(nodes, sign) * half * self._weights, axis=1)

    def total(self, sign: float) -> float:
        return float(self._cumulative[sign][-1])

    def _locate(self, xi: FloatArray) -> tuple[FloatArray, FloatArray, FloatArray]:
        xi = np.atleast_1d(np.asarray(xi, dtype=np.float64))
        r = np.clip(np.abs(xi), self._edges[0], self._edges[-1])
        panel = np.clip(np.searchsorted(self._edges, r, side="right") - 1, 0, self._edges.size - 2)
        return xi, r, panel

    def __call__(self, xi: FloatArray) -> FloatArray:
        xi, r, panel = self._locate(xi)
        out = np.empty_like(r)
        for sign, mask in ((1.0, xi >= 0), (-1.0, xi < 0)):
            if mask.any():
                start = self._edges[panel[mask]]
                out[mask] = self._cumulative[sign][panel[mask]] + self._partial(start, r[mask], sign)
        return out

    def tail(self, xi: FloatArray) -> FloatArray:
        """∫_{|ξ|}^∞|Φ̂(±u)|² du/u, the complement of the scale energy."""
        xi, r, panel = self._locate(xi)
        out = np.empty_like(r)
        for sign, mask in ((1.0, xi >= 0), (-1.0, xi < 0)):
            if mask.any():
                stop = self._edges[panel[mask] + 1]
                out[mask] = self._tails[sign][panel[mask] + 1] + self._partial(r[mask], stop, sign)
        return out


def make_admissible_pair(
    phi_hat: FrequencyProfile,
    constant: float | None = None,
    *,
    epsilon0: float | None = None,
    epsilon: float | None = None,
    name: str | None = None,
) -> AnalyzerPair:
    """Complete a band profile Φ̂ to an admissible pair by Φ̂₀(ξ) = (C - ∫₀¹|Φ̂(tξ)|² dt/t)^{1/2}.

    Arguments:
        phi_hat: Band profile supported in inner_radius <= |ξ| <= outer_radius with inner_radius > 0.
        constant: Target constant C; defaults to the larger of ∫₀^∞|Φ̂(±u)|² du/u.
        epsilon0: Tauberian radius recorded for Φ̂₀; defaults to half the outer radius.
        epsilon: Tauberian radius recorded for Φ̂; defaults to half the outer radius.
        name: Label of the pair.

    Raises:
        NegativeRadicandError: If C is smaller than the scale energy at some frequency.
    """
    energy = _ScaleEnergy(phi_hat)
    largest = max(energy.total(1.0), energy.total(-1.0))
    constant = largest if constant is None else float(constant)
    if constant - largest < -RADICAND_TOLERANCE * max(constant, largest):
        witness = phi_hat.outer_radius if energy.total(1.0) >= energy.total(-1.0) else -phi_hat.outer_radius
        msg = f"Admissibility radicand C - G(ξ) is negative at ξ={witness:g}: C={constant:g} < G={largest:g}"
        raise NegativeRadicandError(msg, witness=witness)

    # C - G(ξ) = (C - G(∞)) + tail(ξ); an excess within round-off of zero is taken as exact
    excess = {sign: constant - energy.total(sign) for sign in (1.0, -1.0)}
    excess = {sign: 0.0 if abs(value) <= RADICAND_TOLERANCE * constant else value for sign, value in excess.items()}

    def phi0(xi: FloatArray) -> FloatArray:
        xi = np.asarray(xi, dtype=np.float64)
        flat = xi.ravel()
        radicand = energy.tail(flat) + np.where(flat >= 0, excess[1.0], excess[-1.0])
        return np.sqrt(np.maximum(radicand, 0.0)).reshape(xi.shape)

    half = 0.5 * phi_hat.outer_radius
    pair = AnalyzerPair(
        phi0_hat=FrequencyProfile(func=phi0, inner_radius=0.0, outer_radius=phi_hat.outer_radius, name="phi0"),
        phi_hat=phi_hat,
        epsilon0=half if epsilon0 is None else epsilon0,
        epsilon=half if epsilon is None else epsilon,
        moment_order=math.inf,
        admissibility_constant=constant,
        name=name or phi_hat.name,
    )
    logger.debug("Built admissible pair %r with C=%g", pair.name, constant)
    return pair


def _bump_band(xi: FloatArray) -> FloatArray:
    a, b = BUMP_BAND
    r = np.abs(np.asarray(xi, dtype=np.float64))
    inner = (r > a) & (r < b)
    safe = np.where(inner, r, 0.5 * (a + b))
    return np.where(inner, np.exp(-1.0 / ((safe - a) * (b - safe))), 0.0)


def make_analyzer(name: AnalyzerName = "meyer", smoothness: RampName = "smooth") -> AnalyzerPair:
    """Parseval-normalized admissible pair by name.

    Arguments:
        name: `"meyer"` uses |ψ̂¹|, `"dyadic-pu"` the partition band φ, `"bump-band"` the bump
            exp(-1/((|ξ| - 1/2)(2 - |ξ|))).
        smoothness: Ramp used by the Meyer and partition profiles.
    """
    if name == "meyer":
        system = meyer_generators(smoothness)
        lo, hi = system.wavelet_support
        profile = FrequencyProfile(func=system.psi1_modulus, inner_radius=lo, outer_radius=hi, name="meyer")
        # Σ_j |ψ̂¹(2^j ξ)|² = (2π)^{-1} off the origin, hence C = ln 2/(2π)
        pair = make_admissible_pair(
            profile, math.log(2.0) / TWO_PI, epsilon0=4 * math.pi / 3, epsilon=4 * math.pi / 3, name=name
        )
    elif name == "dyadic-pu":
        profile = dyadic_partition(smoothness).band_profile()
        pair = make_admissible_pair(profile, epsilon0=1.0, epsilon=1.0, name=name)
    elif name == "bump-band":
        a, b = BUMP_BAND
        profile = FrequencyProfile(func=_bump_band, inner_radius=a, outer_radius=b, name=name)
        pair = make_admissible_pair(profile, epsilon0=1.0, epsilon=1.0, name=name)
    else:
        msg = f"Unknown analyzer {name!r}; expected 'meyer', 'dyadic-pu' or 'bump-band'"
        raise InvalidParameterError(msg)
    return pair.parseval()


@dataclass(frozen=True, slots=True, kw_only=True)
class TauberianReport:
    """Outcome of the Tauberian checks.

    Attributes:
        epsilon0: Radius of the ball {|ξ| < 2ε₀} where Φ̂₀ must not vanish.
        epsilon: Radius of the annulus {ε/2 < |ξ| < 2ε} where Φ̂ must not vanish.
        scaling_passes: Φ̂₀ is nonzero on the sampled ball.
        wavelet_passes: Φ̂ is nonzero on the sampled annulus.
        coverage_infimum: inf over the band of |Φ̂₀|² + ∫₀¹|Φ̂(tξ)|² dt/t.
        witness: A sampled frequency where a condition fails, else None.
    """

    epsilon0: float
    epsilon: float
    scaling_passes: bool
    wavelet_passes: bool
    coverage_infimum: float
    witness: float | None

    @property
    def passes(self) -> bool:
        return self.scaling_passes and self.wavelet_passes and self.coverage_infimum > 0


def _first_zero(values: FloatArray, xi: FloatArray) -> float | None:
    zero = np.flatnonzero(np.abs(values) <= 0)
    return float(xi[zero[0]]) if zero.size else None


def tauberian_check(pair: AnalyzerPair, *, band: float | None = None, samples: int = 4097) -> TauberianReport:
    """Check the Tauberian conditions with independent radii and the coverage infimum.

    Sample points keep a relative distance `TAUBERIAN_MARGIN` from the boundary of the open ball and annulus;
    closer to the edge a C^∞ profile underflows to zero in double precision.

    Arguments:
        pair: The analyzing pair.
        band: Frequency band |ξ| <= band for the coverage infimum; defaults to twice the outer radius of Φ̂.
        samples: Number of sample frequencies per condition.
    """
    inner, outer = 1.0 + TAUBERIAN_MARGIN, 1.0 - TAUBERIAN_MARGIN
    ball = np.linspace(-2 * pair.epsilon0 * outer, 2 * pair.epsilon0 * outer, samples)
    ring = np.linspace(pair.epsilon / 2 * inner, 2 * pair.epsilon * outer, samples)
    ring = np.concatenate((-ring, ring))
    scaling_witness = _first_zero(pair.phi0_hat(ball), ball)
    wavelet_witness = _first_zero(pair.phi_hat(ring), ring)

    band = 2.0 * pair.phi_hat.outer_radius if band is None else band
    xi = np.linspace(-band, band, samples)
    # a profile not vanishing at 0 has divergent scale energy; only the ∞ sheet is counted then
    energy = _ScaleEnergy(pair.phi_hat)(xi) if pair.phi_hat.inner_radius > 0 else np.zeros_like(xi)
    coverage = np.abs(pair.phi0_hat(xi)) ** 2 + energy
    coverage_witness = float(xi[np.argmin(coverage)])
    infimum = float(coverage.min())

    witness = scaling_witness if scaling_witness is not None else wavelet_witness
    if witness is None and infimum <= 0:
        witness = coverage_witness
    return TauberianReport(
        epsilon0=pair.epsilon0,
        epsilon=pair.epsilon,
        scaling_passes=scaling_witness is None,
        wavelet_passes=wavelet_witness is None,
        coverage_infimum=infimum,
        witness=witness,
    )


@dataclass(frozen=True, slots=True, kw_only=True)
class MomentReport:
    """Derivatives of Φ̂ at the origin.

    Attributes:
        order: Requested order R.
        derivatives: |D^k Φ̂(0)| for k = 0..R; empty when Φ̂ vanishes near 0.
        vanishing_order: Largest k with D^0..D^k below tolerance, -1 when Φ̂(0) != 0, inf near-0 support.
        passes: All derivatives up to R vanish.
    """

    order: int
    derivatives: tuple[float, ...]
    vanishing_order: float
    passes: bool


def moment_check(profile: AnalyzerPair | FrequencyProfile, order: int) -> MomentReport:
    """Check D^k Φ̂(0) = 0 for k <= `order`.

    Profiles vanishing near the origin have all moments zero. Otherwise Φ̂ is fitted by a degree-12
    Chebyshev series on [-0.1, 0.1] and the series is differentiated at 0.
    """
    if isinstance(profile, AnalyzerPair):
        profile = profile.phi_hat
    if profile.inner_radius > 0:
        return MomentReport(order=order, derivatives=(), vanishing_order=math.inf, passes=True)

    nodes = MOMENT_HALF_WIDTH * np.cos(np.pi * (np.arange(65) + 0.5) / 65)
    values = profile(nodes)
    fits = [Chebyshev.fit(nodes, part, MOMENT_DEGREE) for part in (values.real, values.imag)]
    top = max(order, 0)
    derivatives = tuple(
        math.hypot(*(float(fit.deriv(k)(0.0)) for fit in fits)) for k in range(top + 1)
    )
    vanishing = -1
    for k, value in enumerate(derivatives):
        if value >= MOMENT_TOLERANCE:
            break
        vanishing = k
    return MomentReport(
        order=order,
        derivatives=derivatives,
        vanishing_order=float(vanishing),
        passes=all(value < MOMENT_TOLERANCE for value in derivatives[: order + 1]),
    )


def admissibility_defect(pair: AnalyzerPair, grid: SpatialGrid, axis: ScaleAxis) -> float:
    """Discrete defect max_ξ ||Φ̂₀(ξ)|² + Σ_m Δ|Φ̂(t_m ξ)|² - C|/C over the grid's frequency nodes.

    Only nodes whose lowest scale already lies below the support of Φ̂ take part, so the defect measures
    the quadrature error and not the truncation of the scale range.
    """
    xi = grid.frequencies
    xi = xi[np.abs(xi) * axis.lowest_scale <= pair.phi_hat.inner_radius]
    total = np.abs(pair.phi0_hat(xi)) ** 2
    for t in axis.scales:
        total = total + axis.log_weight * np.abs(pair.phi_hat(t * xi)) ** 2
    c = pair.admissibility_constant
    return float(np.max(np.abs(total - c)) / c)
