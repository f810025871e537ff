from __future__ import annotations

import numpy as np
import pytest

from varcoorbit.analyzers import AnalyzerPair, MeyerSystem, make_analyzer, meyer_generators
from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid, XField
from varcoorbit.signals import make_battery
from varcoorbit.transform import VoiceTransform
from varcoorbit.weights import MicrolocalWeight


@pytest.fixture(scope="session")
def grid() -> SpatialGrid:
    return SpatialGrid(n=256, period=32.0)


@pytest.fixture(scope="session")
def small_grid() -> SpatialGrid:
    """Kernel window small enough for dense tables."""
    return SpatialGrid(n=64, period=16.0)


@pytest.fixture(scope="session")
def axis() -> ScaleAxis:
    return ScaleAxis(base=2.0, per_octave=16, octaves=4)


@pytest.fixture(scope="session")
def small_axis() -> ScaleAxis:
    return ScaleAxis(base=2.0, per_octave=4, octaves=2)


@pytest.fixture(scope="session")
def meyer_pair() -> AnalyzerPair:
    return make_analyzer("meyer")


@pytest.fixture(scope="session")
def meyer_system() -> MeyerSystem:
    return meyer_generators()


@pytest.fixture(scope="session")
def flat_weight() -> MicrolocalWeight:
    return MicrolocalWeight()


@pytest.fixture(scope="session")
def vt(meyer_pair: AnalyzerPair, grid: SpatialGrid, axis: ScaleAxis) -> VoiceTransform:
    return VoiceTransform(meyer_pair, grid, axis)


@pytest.fixture(scope="session")
def small_vt(meyer_pair: AnalyzerPair, small_grid: SpatialGrid, small_axis: ScaleAxis) -> VoiceTransform:
    return VoiceTransform(meyer_pair, small_grid, small_axis)


@pytest.fixture(scope="session")
def battery(grid: SpatialGrid) -> list[GridSignal]:
    """Five named signals and fifteen random signals band-limited to a quarter of the grid band."""
    return make_battery(grid, seed=0)


@pytest.fixture(scope="session")
def small_battery(small_grid: SpatialGrid) -> list[GridSignal]:
    return make_battery(small_grid, generators=("gaussian(sigma=1.0)",), random=3, seed=1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def random_field(small_grid: SpatialGrid, small_axis: ScaleAxis, rng: np.random.Generator) -> XField:
    shape = (small_axis.size + 1, small_grid.n)
    return XField(grid=small_grid, axis=small_axis, values=rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
