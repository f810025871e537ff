from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

import narwhals as nw
import numpy as np

from varcoorbit._dependencies import dataframe_backend
from varcoorbit.exceptions import InvalidParameterError
from varcoorbit.grid import GridSignal, XField
from varcoorbit.varexp import ExponentField

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from varcoorbit._dependencies import Backend
    from varcoorbit.grid import ScaleAxis, SpatialGrid
    from varcoorbit.typing import FloatArray

__all__ = (
    "read_exponent",
    "read_field",
    "read_signal",
    "read_table",
    "rows_to_frame",
    "write_exponent",
    "write_field",
    "write_heatmap",
    "write_plot_data",
    "write_signal",
    "write_table",
)

logger = logging.getLogger(__name__)


def _cell(value: object) -> object:
    # list-valued report fields (flags) are stored as ';'-joined strings
    if isinstance(value, (list, tuple)):
        return ";".join(str(item) for item in value)
    if isinstance(value, np.generic):
        return value.item()
    return value


def rows_to_frame(rows: Sequence[Mapping[str, Any]], *, backend: Backend | None = None) -> nw.DataFrame[Any]:
    """Collect report records into a narwhals DataFrame; every record must have the same keys.

    Raises:
        InvalidParameterError: If there are no rows or the records disagree on their columns.
    """
    if not rows:
        msg = "Cannot build a table from zero rows"
        raise InvalidParameterError(msg)
    columns = list(rows[0])
    for idx, row in enumerate(rows):
        if list(row) != columns:
            msg = f"Row {idx} has columns {list(row)}, expected {columns}"
            raise InvalidParameterError(msg)
    data = {name: [_cell(row[name]) for row in rows] for name in columns}
    return nw.from_dict(data, backend=dataframe_backend(backend))


def write_table(rows: Sequence[Mapping[str, Any]], path: str | Path, *, backend: Backend | None = None) -> Path:
    """Write records as CSV, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows_to_frame(rows, backend=backend).write_csv(str(path))
    logger.info("Wrote %d rows to %s", len(rows), path)
    return path


def write_plot_data(
    x: FloatArray | Sequence[float],
    y: FloatArray | Sequence[float],
    path: str | Path,
    *,
    backend: Backend | None = None,
) -> Path:
    """Write a curve as a two-column (x, y) CSV."""
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        msg = f"Plot data needs two 1-d arrays of equal length, found shapes {x.shape} and {y.shape}"
        raise InvalidParameterError(msg)
    return write_table([{"x": float(a), "y": float(b)} for a, b in zip(x, y, strict=True)], path, backend=backend)


def read_table(path: str | Path, *, backend: Backend | None = None) -> nw.DataFrame[Any]:
    return nw.read_csv(str(path), backend=dataframe_backend(backend))


def _write_columns(data: Mapping[str, Sequence[Any]], path: str | Path, backend: Backend | None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nw.from_dict(dict(data), backend=dataframe_backend(backend)).write_csv(str(path))
    return path


def _require_columns(frame: nw.DataFrame[Any], columns: Sequence[str], path: str | Path) -> None:
    missing = [name for name in columns if name not in frame.columns]
    if missing:
        msg = f"{path} lacks columns {missing}, found {frame.columns}"
        raise InvalidParameterError(msg)


def _floats(series: nw.Series[Any]) -> FloatArray:
    # string columns appear when a file spells out 'inf'
    return np.array([float(str(value)) for value in series.to_list()], dtype=np.float64)


def _node_order(frame: nw.DataFrame[Any], n: int, path: str | Path) -> nw.DataFrame[Any]:
    frame = frame.sort("index")
    if frame["index"].to_list() != list(range(n)):
        msg = f"{path} must list every node index 0..{n - 1} exactly once"
        raise InvalidParameterError(msg)
    return frame


def write_signal(s: GridSignal, path: str | Path, *, backend: Backend | None = None) -> Path:
    """Write the spatial samples of `s` as CSV with columns `index, re, im`."""
    if s.domain != "space":
        msg = "Only spatial samples are stored; transform the signal back to space first"
        raise InvalidParameterError(msg)
    data = {"index": list(range(s.grid.n)), "re": s.values.real.tolist(), "im": s.values.imag.tolist()}
    path = _write_columns(data, path, backend)
    logger.info("Wrote %d samples to %s", s.grid.n, path)
    return path


def read_signal(path: str | Path, grid: SpatialGrid, *, backend: Backend | None = None) -> GridSignal:
    """Load a signal stored by [`write_signal`][varcoorbit.tables.write_signal] onto `grid`.

    Rows may come in any order. A missing `im` column means a real signal.

    Raises:
        InvalidParameterError: If columns are missing or the indices do not enumerate the grid nodes.
    """
    frame = read_table(path, backend=backend)
    _require_columns(frame, ("index", "re"), path)
    frame = _node_order(frame, grid.n, path)
    values = _floats(frame["re"]).astype(np.complex128)
    if "im" in frame.columns:
        values += 1j * _floats(frame["im"])
    return GridSignal(grid=grid, values=values)


def write_exponent(p: ExponentField, path: str | Path, *, backend: Backend | None = None) -> Path:
    """Write an exponent as CSV with columns `index, value`; p = ∞ is stored as `inf`."""
    data = {"index": list(range(p.grid.n)), "value": ["inf" if math.isinf(v) else repr(v) for v in p.values.tolist()]}
    return _write_columns(data, path, backend)


def read_exponent(path: str | Path, grid: SpatialGrid, *, backend: Backend | None = None) -> ExponentField:
    """Load an exponent from CSV with columns `index, value`; the literal `inf` gives p = ∞ at that node.

    Raises:
        InvalidParameterError: If columns are missing, the indices do not enumerate the grid nodes
            or a value lies outside (0, ∞].
    """
    frame = read_table(path, backend=backend)
    _require_columns(frame, ("index", "value"), path)
    frame = _node_order(frame, grid.n, path)
    try:
        values = _floats(frame["value"])
    except ValueError as exc:
        msg = f"{path} holds a non-numeric exponent: {exc}"
        raise InvalidParameterError(msg) from exc
    return ExponentField(grid=grid, values=values)


def write_field(field: XField, path: str | Path, *, backend: Backend | None = None) -> Path:
    """Write an XField as CSV with columns `j, k, re, im`.

    `j` is the sheet (0 for ∞, m for the scale t_m) and `k` the node index.
    """
    rows, cols = field.shape
    j, k = np.divmod(np.arange(rows * cols), cols)
    flat = field.values.ravel()
    data = {"j": j.tolist(), "k": k.tolist(), "re": flat.real.tolist(), "im": flat.imag.tolist()}
    path = _write_columns(data, path, backend)
    logger.info("Wrote %d field cells to %s", flat.size, path)
    return path


def read_field(path: str | Path, grid: SpatialGrid, axis: ScaleAxis, *, backend: Backend | None = None) -> XField:
    """Load an XField stored by [`write_field`][varcoorbit.tables.write_field].

    Raises:
        InvalidParameterError: If columns are missing or the cells do not cover `(axis.size + 1) × grid.n`.
    """
    frame = read_table(path, backend=backend)
    _require_columns(frame, ("j", "k", "re", "im"), path)
    frame = frame.sort("j", "k")
    rows, cols = axis.size + 1, grid.n
    j, k = np.divmod(np.arange(rows * cols), cols)
    if frame["j"].to_list() != j.tolist() or frame["k"].to_list() != k.tolist():
        msg = f"{path} must hold every cell of a {rows}×{cols} field exactly once"
        raise InvalidParameterError(msg)
    values = _floats(frame["re"]) + 1j * _floats(frame["im"])
    return XField(grid=grid, axis=axis, values=values.reshape(rows, cols))


def write_heatmap(field: XField, path: str | Path) -> Path:
    """Write |V| on the finite sheet as a gnuplot `nonuniform matrix`.

    The first row holds the column count and the node positions, every further row a scale t_m followed by the
    magnitudes along the grid. Plot it with `plot 'file' nonuniform matrix with image`.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.empty((field.axis.size + 1, field.grid.n + 1))
    table[0, 0] = field.grid.n
    table[0, 1:] = field.grid.nodes
    table[1:, 0] = field.axis.scales
    table[1:, 1:] = np.abs(field.finite)
    np.savetxt(path, table, fmt="%.17g")
    logger.info("Wrote %d×%d heatmap to %s", field.axis.size, field.grid.n, path)
    return path
