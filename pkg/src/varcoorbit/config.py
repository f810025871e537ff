from __future__ import annotations

import json
import logging
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any

from varcoorbit.exceptions import ConfigError
from varcoorbit.signals import DEFAULT_BATTERY

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping

    from varcoorbit.analyzers import AnalyzerPair
    from varcoorbit.grid import GridSignal, ScaleAxis, SpatialGrid
    from varcoorbit.spaces import SpaceSpec
    from varcoorbit.weights import Weight2ML

__all__ = (
    "AnalyzerSection",
    "AxisSection",
    "BatterySection",
    "CoveringSection",
    "ExperimentConfig",
    "ExponentSection",
    "GridSection",
    "KernelWindowSection",
    "OutputSection",
    "ReconSection",
    "SpaceSection",
    "WeightSection",
    "load_config",
    "parse_config",
    "render_defaults",
)

logger = logging.getLogger(__name__)


@contextmanager
def located(section: str, key: str = "") -> Iterator[None]:
    """Re-raise value errors from building library objects as a [`ConfigError`][varcoorbit.exceptions.ConfigError]."""
    try:
        yield
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), section=section, key=key) from exc


@dataclass(frozen=True, slots=True, kw_only=True)
class GridSection:
    n: int = 256
    period: float = 32.0

    def build(self) -> SpatialGrid:
        from varcoorbit.grid import SpatialGrid

        with located("grid"):
            return SpatialGrid(n=self.n, period=self.period)


@dataclass(frozen=True, slots=True, kw_only=True)
class AxisSection:
    base: float = 2.0
    per_octave: int = 8
    octaves: int = 4

    def build(self) -> ScaleAxis:
        from varcoorbit.grid import ScaleAxis

        with located("axis"):
            return ScaleAxis(base=self.base, per_octave=self.per_octave, octaves=self.octaves)


@dataclass(frozen=True, slots=True, kw_only=True)
class ExponentSection:
    """Exponent generator specs; a bare number is a constant exponent."""

    p: str = "2.0"
    q: str = "2.0"


@dataclass(frozen=True, slots=True, kw_only=True)
class WeightSection:
    name: str = "w2ml"
    s: float = 0.0
    sprime: float = 0.0
    x0: float = 0.0

    def build(self) -> Weight2ML:
        from varcoorbit.weights import make_weight

        params = {} if self.name == "constant" else {"s": self.s, "sprime": self.sprime, "x0": self.x0}
        with located("weight", "name"):
            return make_weight(self.name, params)


@dataclass(frozen=True, slots=True, kw_only=True)
class AnalyzerSection:
    name: str = "meyer"
    smoothness: str = "smooth"

    def build(self) -> AnalyzerPair:
        from varcoorbit.analyzers import make_analyzer

        if self.smoothness not in {"smooth", "polynomial"}:
            msg = f"Unknown ramp {self.smoothness!r}; expected 'smooth' or 'polynomial'"
            raise ConfigError(msg, section="analyzer", key="smoothness")
        with located("analyzer", "name"):
            return make_analyzer(self.name, self.smoothness)  # type: ignore[arg-type]


@dataclass(frozen=True, slots=True, kw_only=True)
class SpaceSection:
    family: str = "F"
    variant: str = "def"
    a: float = 4.0
    variants: tuple[str, ...] = ("def", "norm1", "norm2", "norm3", "norm4")


@dataclass(frozen=True, slots=True, kw_only=True)
class CoveringSection:
    alphas: tuple[float, ...] = (1.0, 0.5, 0.25, 0.125)
    betas: tuple[float, ...] = (2.0, math.sqrt(2.0), 2.0**0.25)
    tolerance: float = 1e-10
    max_iter: int = 500


@dataclass(frozen=True, slots=True, kw_only=True)
class KernelWindowSection:
    """Small window on which kernels are tabulated densely; the scale axis has base 2."""

    n: int = 64
    period: float = 16.0
    per_octave: int = 4
    octaves: int = 2

    def build(self) -> tuple[SpatialGrid, ScaleAxis]:
        from varcoorbit.grid import ScaleAxis, SpatialGrid

        with located("kernel_window"):
            return (
                SpatialGrid(n=self.n, period=self.period),
                ScaleAxis(base=2.0, per_octave=self.per_octave, octaves=self.octaves),
            )


@dataclass(frozen=True, slots=True, kw_only=True)
class BatterySection:
    generators: tuple[str, ...] = DEFAULT_BATTERY
    random: int = 15
    band_fraction: float = 0.25

    def build(self, grid: SpatialGrid, seed: int, *, band: float | None = None) -> list[GridSignal]:
        """The battery on `grid`; random signals are limited to `band` or to `band_fraction` of the grid band."""
        from varcoorbit.signals import make_battery

        band = self.band_fraction * grid.band if band is None else band
        with located("battery"):
            return make_battery(grid, generators=self.generators, random=self.random, band=band, seed=seed)


@dataclass(frozen=True, slots=True, kw_only=True)
class ReconSection:
    levels: int = 1
    smoothness: str = "smooth"


@dataclass(frozen=True, slots=True, kw_only=True)
class OutputSection:
    directory: str = "results"
    plots: bool = True


_SECTIONS: dict[str, type[Any]] = {
    "grid": GridSection,
    "axis": AxisSection,
    "exponents": ExponentSection,
    "weight": WeightSection,
    "analyzer": AnalyzerSection,
    "space": SpaceSection,
    "covering": CoveringSection,
    "kernel_window": KernelWindowSection,
    "battery": BatterySection,
    "recon": ReconSection,
    "output": OutputSection,
}


@dataclass(frozen=True, slots=True, kw_only=True)
class ExperimentConfig:
    """Full configuration of a command-line run.

    Examples:
        >>> config = ExperimentConfig()
        >>> config.grid.n, config.space.family, config.seed
        (256, 'F', 0)
    """

    seed: int = 0
    threads: int = 1
    grid: GridSection = field(default_factory=GridSection)
    axis: AxisSection = field(default_factory=AxisSection)
    exponents: ExponentSection = field(default_factory=ExponentSection)
    weight: WeightSection = field(default_factory=WeightSection)
    analyzer: AnalyzerSection = field(default_factory=AnalyzerSection)
    space: SpaceSection = field(default_factory=SpaceSection)
    covering: CoveringSection = field(default_factory=CoveringSection)
    kernel_window: KernelWindowSection = field(default_factory=KernelWindowSection)
    battery: BatterySection = field(default_factory=BatterySection)
    recon: ReconSection = field(default_factory=ReconSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self) -> None:
        if self.threads < 1:
            msg = f"must be >= 1, found {self.threads}"
            raise ConfigError(msg, key="threads")
        if self.seed < 0:
            msg = f"must be nonnegative, found {self.seed}"
            raise ConfigError(msg, key="seed")

    def with_overrides(
        self, *, seed: int | None = None, threads: int | None = None, out: str | None = None
    ) -> ExperimentConfig:
        """Apply command-line flags on top of the file values."""
        config = self
        if seed is not None:
            config = replace(config, seed=seed)
        if threads is not None:
            config = replace(config, threads=threads)
        if out is not None:
            config = replace(config, output=replace(config.output, directory=out))
        return config

    def space_spec(
        self, family: str | None = None, variant: str | None = None, *, grid: SpatialGrid | None = None
    ) -> SpaceSpec:
        """The configured space, on the main grid unless another grid is given."""
        from varcoorbit.spaces import SpaceSpec
        from varcoorbit.varexp import make_exponent

        grid = self.grid.build() if grid is None else grid
        family = family or self.space.family
        with located("exponents", "p"):
            p = make_exponent(self.exponents.p, grid)
        with located("exponents", "q"):
            q_field = make_exponent(self.exponents.q, grid)
        q: Any = q_field
        if family in {"B", "L"}:
            if q_field.p_minus != q_field.p_plus:
                msg = f"family {family} takes a constant q, found {self.exponents.q!r}"
                raise ConfigError(msg, section="exponents", key="q")
            q = q_field.p_plus
        with located("space", "family"):
            return SpaceSpec(
                family=family,  # type: ignore[arg-type]
                p=p,
                q=q,
                w=self.weight.build(),
                a=self.space.a,
                variant=variant or self.space.variant,  # type: ignore[arg-type]
            )


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce(section: str, key: str, value: Any, default: Any) -> Any:
    if isinstance(default, bool):
        ok = isinstance(value, bool)
    elif isinstance(default, float):
        ok = _is_number(value)
        value = float(value) if ok else value
    elif isinstance(default, int):
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif isinstance(default, tuple):
        numeric = isinstance(default[0], float)
        ok = isinstance(value, list) and all(_is_number(v) if numeric else isinstance(v, str) for v in value)
        value = tuple(float(v) if numeric else v for v in value) if ok else value
    else:
        ok = isinstance(value, type(default))
    if not ok:
        msg = f"expected {type(default).__name__}, found {type(value).__name__} {value!r}"
        raise ConfigError(msg, section=section, key=key)
    return value


def _section(name: str, cls: type[Any], raw: Mapping[str, Any]) -> Any:
    defaults = cls()
    known = {f.name for f in fields(cls)}
    if unknown := sorted(set(raw) - known):
        msg = f"unknown key; expected one of {sorted(known)}"
        raise ConfigError(msg, section=name, key=unknown[0])
    return replace(defaults, **{key: _coerce(name, key, value, getattr(defaults, key)) for key, value in raw.items()})


def parse_config(data: Mapping[str, Any]) -> ExperimentConfig:
    """Validate a parsed TOML document; missing keys take their defaults.

    Raises:
        ConfigError: For unknown sections or keys and for values of the wrong type.
    """
    defaults = ExperimentConfig()
    kwargs: dict[str, Any] = {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                msg = "expected a table"
                raise ConfigError(msg, section=key)
            kwargs[key] = _section(key, _SECTIONS[key], value)
        elif key in {"seed", "threads"}:
            kwargs[key] = _coerce("", key, value, getattr(defaults, key))
        else:
            msg = f"unknown key; expected seed, threads or one of the sections {sorted(_SECTIONS)}"
            raise ConfigError(msg, key=key)
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path | None = None) -> ExperimentConfig:
    """Read a TOML experiment file, or the defaults when no path is given."""
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        msg = f"invalid TOML in {path}: {exc}"
        raise ConfigError(msg) from exc
    logger.info("Loaded configuration from %s", path)
    return parse_config(data)


def _render(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_render(item) for item in value) + "]"
    return repr(value)


def render_defaults(config: ExperimentConfig | None = None) -> str:
    """TOML text of a configuration, the defaults by default.

    Examples:
        >>> print(render_defaults().splitlines()[0])
        seed = 0
    """
    config = config or ExperimentConfig()
    lines = [f"seed = {config.seed}", f"threads = {config.threads}"]
    for name in _SECTIONS:
        section = getattr(config, name)
        lines.extend(("", f"[{name}]"))
        lines.extend(f"{f.name} = {_render(getattr(section, f.name))}" for f in fields(section))
    return "\n".join(lines) + "\n"
