from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from varcoorbit.exceptions import InvalidParameterError
from varcoorbit.grid import GridSignal, inverse_transform
from varcoorbit.serde import deserialize_generator

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from varcoorbit.grid import SpatialGrid
    from varcoorbit.typing import ComplexArray, FloatArray, RampName

__all__ = ("DEFAULT_BATTERY", "SIGNAL_GENERATORS", "make_battery", "make_signal")

logger = logging.getLogger(__name__)

DEFAULT_BATTERY: tuple[str, ...] = (
    "gaussian(sigma=1.0)",
    "gaussian(sigma=0.5, shift=1.5)",
    "modulated-gaussian(sigma=1.0, freq=3.0)",
    "modulated-gaussian(sigma=0.7, freq=6.0, shift=-2.0)",
    "bump(radius=2.0)",
)
"""Deterministic part of the default test battery."""


def _gaussian(grid: SpatialGrid, *, sigma: float = 1.0, shift: float = 0.0) -> FloatArray:
    return np.exp(-0.5 * ((grid.nodes - shift) / sigma) ** 2)


def _modulated_gaussian(
    grid: SpatialGrid, *, sigma: float = 1.0, freq: float = 4.0, shift: float = 0.0
) -> ComplexArray:
    return _gaussian(grid, sigma=sigma, shift=shift) * np.exp(1j * freq * grid.nodes)


def _bump(grid: SpatialGrid, *, radius: float = 1.0, shift: float = 0.0) -> FloatArray:
    u = (grid.nodes - shift) / radius
    inside = np.abs(u) < 1
    safe = np.where(inside, u, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe**2)), 0.0)


def _meyer_wavelet(grid: SpatialGrid, *, j: int = 0, k: int = 0, smoothness: RampName = "smooth") -> ComplexArray:
    from varcoorbit.analyzers import meyer_generators
    from varcoorbit.coorbit import meyer_atom

    return meyer_atom(meyer_generators(smoothness), grid, c=1, j=j, k=k).values


def _random_bandlimited(grid: SpatialGrid, *, seed: int = 0, band: float = 4.0) -> FloatArray:
    """Real signal with standard normal spectrum on |ξ| <= band, unit L2 norm."""
    rng = np.random.default_rng(seed)
    inside = np.abs(grid.frequencies) <= band
    spectrum = np.where(inside, rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n), 0.0)
    values = inverse_transform(spectrum, grid).real
    norm = np.sqrt(np.sum(values**2) * grid.step)
    return values / norm if norm > 0 else values


def _zero(grid: SpatialGrid) -> FloatArray:
    return np.zeros(grid.n)


SIGNAL_GENERATORS: dict[str, Callable[..., FloatArray | ComplexArray]] = {
    "gaussian": _gaussian,
    "modulated-gaussian": _modulated_gaussian,
    "bump": _bump,
    "meyer-wavelet": _meyer_wavelet,
    "random-bandlimited": _random_bandlimited,
    "zero": _zero,
}


def make_signal(spec: str, grid: SpatialGrid) -> GridSignal:
    """Build a signal from a generator spec such as `"gaussian(sigma=0.5)"` or `"random-bandlimited(seed=3)"`.

    Raises:
        InvalidParameterError: For unknown generators or parameters.

    Examples:
        >>> from varcoorbit.grid import SpatialGrid
        >>> make_signal("zero", SpatialGrid(n=8)).l2_norm()
        0.0
    """
    name, params = deserialize_generator(spec)
    if (builder := SIGNAL_GENERATORS.get(name)) is None:
        msg = f"Unknown signal generator {name!r}; expected one of {sorted(SIGNAL_GENERATORS)}"
        raise InvalidParameterError(msg)
    try:
        values = builder(grid, **params)
    except TypeError as exc:
        msg = f"Invalid parameters for signal generator {name!r}: {sorted(params)}"
        raise InvalidParameterError(msg) from exc
    return GridSignal(grid=grid, values=values)


def make_battery(
    grid: SpatialGrid,
    *,
    generators: Sequence[str] = DEFAULT_BATTERY,
    random: int = 15,
    band: float | None = None,
    seed: int = 0,
) -> list[GridSignal]:
    """Test battery: the named generators followed by `random` band-limited signals.

    The i-th random signal uses the seed `seed + i`, so batteries are reproducible. The band defaults to a
    quarter of the grid band.
    """
    if random < 0:
        msg = f"Number of random signals must be nonnegative, found {random}"
        raise InvalidParameterError(msg)
    band = grid.band / 4 if band is None else band
    battery = [make_signal(spec, grid) for spec in generators]
    battery.extend(
        GridSignal(grid=grid, values=_random_bandlimited(grid, seed=seed + i, band=band)) for i in range(random)
    )
    logger.debug("Battery of %d signals on n=%d", len(battery), grid.n)
    return battery
