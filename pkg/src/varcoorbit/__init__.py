from __future__ import annotations

import typing as _t

from varcoorbit._utils import show_versions
from varcoorbit.analyzers import AnalyzerPair, MeyerSystem, make_analyzer, meyer_generators
from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid, XField
from varcoorbit.spaces import SpaceSpec, evaluate_norm
from varcoorbit.transform import VoiceTransform
from varcoorbit.varexp import ExponentField, luxemburg_norm, make_exponent
from varcoorbit.weights import MicrolocalWeight, make_weight

__all__ = (
    "AnalyzerPair",
    "ExponentField",
    "GridSignal",
    "MeyerSystem",
    "MicrolocalWeight",
    "ScaleAxis",
    "SpaceSpec",
    "SpatialGrid",
    "VoiceTransform",
    "XField",
    "evaluate_norm",
    "luxemburg_norm",
    "make_analyzer",
    "make_exponent",
    "make_weight",
    "meyer_generators",
    "show_versions",
)
__title__ = __name__
__version__: str


if not _t.TYPE_CHECKING:

    def __getattr__(name: str) -> _t.Any:
        if name == "__version__":
            global __version__  # noqa: PLW0603

            from importlib import metadata

            __version__ = metadata.version(__name__)
            return __version__
        msg = f"module {__name__!r} has no attribute {name!r}"
        raise AttributeError(msg)
else:  # pragma: no cover
    ...
