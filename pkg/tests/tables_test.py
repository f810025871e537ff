from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pytest

from varcoorbit.exceptions import InvalidParameterError
from varcoorbit.grid import to_frequency
from varcoorbit.signals import make_signal
from varcoorbit.tables import (
    read_exponent,
    read_field,
    read_signal,
    read_table,
    rows_to_frame,
    write_exponent,
    write_field,
    write_heatmap,
    write_plot_data,
    write_signal,
    write_table,
)
from varcoorbit.varexp import ExponentField

if TYPE_CHECKING:
    from pathlib import Path

    from varcoorbit._dependencies import Backend
    from varcoorbit.grid import ScaleAxis, SpatialGrid
    from varcoorbit.transform import VoiceTransform

BACKENDS: tuple[Backend, ...] = ("polars", "pandas", "pyarrow")


@pytest.mark.parametrize("backend", BACKENDS)
def test_rows_to_frame(backend: Backend) -> None:
    rows = [
        {"variant": "def", "value": np.float64(1.5), "flags": ("truncation",)},
        {"variant": "norm1", "value": 2.0, "flags": ()},
    ]
    frame = rows_to_frame(rows, backend=backend)
    assert frame.columns == ["variant", "value", "flags"]
    assert frame["value"].to_list() == [1.5, 2.0]
    assert frame["flags"].to_list() == ["truncation", ""]


@pytest.mark.parametrize(
    ("rows", "match"),
    [
        ([], "zero rows"),
        ([{"a": 1.0}, {"b": 2.0}], "Row 1 has columns"),
        ([{"a": 1.0, "b": 2.0}, {"b": 2.0, "a": 1.0}], "Row 1 has columns"),
    ],
)
def test_rows_to_frame_errors(rows: list[dict[str, float]], match: str) -> None:
    with pytest.raises(InvalidParameterError, match=match):
        rows_to_frame(rows)


@pytest.mark.parametrize("backend", BACKENDS)
def test_write_and_read(tmp_path: Path, backend: Backend) -> None:
    rows = [{"alpha": 1.0, "converged": True, "recon": 1e-12}, {"alpha": 0.5, "converged": False, "recon": math.nan}]
    path = write_table(rows, tmp_path / "nested" / "sweep.csv", backend=backend)
    assert path.exists()
    frame = read_table(path, backend=backend)
    assert frame.columns == ["alpha", "converged", "recon"]
    assert frame["alpha"].to_list() == [1.0, 0.5]
    assert frame["recon"].to_list()[0] == pytest.approx(1e-12)


def test_plot_data(tmp_path: Path) -> None:
    path = write_plot_data(np.arange(3.0), [0.0, 1.0, 4.0], tmp_path / "plot.csv")
    frame = read_table(path)
    assert frame.columns == ["x", "y"]
    assert frame["y"].to_list() == [0.0, 1.0, 4.0]


@pytest.mark.parametrize(("x", "y"), [([0.0, 1.0], [1.0]), (np.zeros((2, 2)), np.zeros((2, 2)))])
def test_plot_data_shapes(tmp_path: Path, x: object, y: object) -> None:
    with pytest.raises(InvalidParameterError, match="two 1-d arrays"):
        write_plot_data(x, y, tmp_path / "plot.csv")  # type: ignore[arg-type]


@pytest.mark.parametrize("backend", BACKENDS)
def test_signal_csv(tmp_path: Path, small_grid: SpatialGrid, backend: Backend) -> None:
    s = make_signal("modulated-gaussian(sigma=1.0, freq=3.0)", small_grid)
    path = write_signal(s, tmp_path / "signal.csv", backend=backend)
    assert read_table(path).columns == ["index", "re", "im"]
    np.testing.assert_allclose(read_signal(path, small_grid, backend=backend).values, s.values, rtol=0, atol=1e-12)


def test_real_signal_csv_in_any_order(tmp_path: Path, small_grid: SpatialGrid) -> None:
    values = np.linspace(-1.0, 1.0, small_grid.n)
    lines = ["index,re", *(f"{i},{float(values[i])!r}" for i in reversed(range(small_grid.n)))]
    path = tmp_path / "real.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    np.testing.assert_array_equal(read_signal(path, small_grid).values, values)


def test_signal_csv_errors(tmp_path: Path, grid: SpatialGrid, small_grid: SpatialGrid) -> None:
    path = write_signal(make_signal("gaussian", small_grid), tmp_path / "signal.csv")
    with pytest.raises(InvalidParameterError, match="every node index"):
        read_signal(path, grid)
    with pytest.raises(InvalidParameterError, match="spatial samples"):
        write_signal(to_frequency(make_signal("gaussian", small_grid)), tmp_path / "spectrum.csv")
    (tmp_path / "bad.csv").write_text("k,re\n0,1.0\n", encoding="utf-8")
    with pytest.raises(InvalidParameterError, match="lacks columns"):
        read_signal(tmp_path / "bad.csv", small_grid)


def test_exponent_csv_with_inf(tmp_path: Path, small_grid: SpatialGrid) -> None:
    values = np.full(small_grid.n, 2.5)
    values[: small_grid.n // 4] = math.inf
    path = write_exponent(ExponentField(grid=small_grid, values=values), tmp_path / "p.csv")
    assert "inf" in path.read_text(encoding="utf-8")
    p = read_exponent(path, small_grid)
    np.testing.assert_array_equal(p.values, values)
    assert p.infinity_mask.sum() == small_grid.n // 4
    assert p.p_minus == 2.5


def test_exponent_csv_literal(tmp_path: Path, small_grid: SpatialGrid) -> None:
    lines = ["index,value", *(f"{i},{'inf' if i == 3 else 2}" for i in range(small_grid.n))]
    path = tmp_path / "p.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    p = read_exponent(path, small_grid)
    assert np.flatnonzero(p.infinity_mask).tolist() == [3]
    assert p.p_minus == 2.0


@pytest.mark.parametrize(("value", "match"), [("-1.0", "Exponents must lie"), ("two", "non-numeric")])
def test_exponent_csv_errors(tmp_path: Path, small_grid: SpatialGrid, value: str, match: str) -> None:
    lines = ["index,value", *(f"{i},{value if i == 0 else '2.0'}" for i in range(small_grid.n))]
    path = tmp_path / "p.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(InvalidParameterError, match=match):
        read_exponent(path, small_grid)


@pytest.mark.parametrize("backend", BACKENDS)
def test_field_csv(tmp_path: Path, small_vt: VoiceTransform, backend: Backend) -> None:
    field = small_vt.apply(make_signal("gaussian(sigma=1.0)", small_vt.grid))
    path = write_field(field, tmp_path / "field.csv", backend=backend)
    frame = read_table(path)
    assert frame.columns == ["j", "k", "re", "im"]
    assert len(frame) == field.values.size
    loaded = read_field(path, small_vt.grid, small_vt.axis, backend=backend)
    np.testing.assert_allclose(loaded.values, field.values, rtol=0, atol=1e-12)


def test_field_csv_shape_mismatch(tmp_path: Path, small_vt: VoiceTransform, axis: ScaleAxis) -> None:
    field = small_vt.apply(make_signal("gaussian", small_vt.grid))
    path = write_field(field, tmp_path / "field.csv")
    with pytest.raises(InvalidParameterError, match="every cell"):
        read_field(path, small_vt.grid, axis)


def test_heatmap(tmp_path: Path, small_vt: VoiceTransform) -> None:
    field = small_vt.apply(make_signal("gaussian(sigma=1.0)", small_vt.grid))
    table = np.loadtxt(write_heatmap(field, tmp_path / "plots" / "heatmap.dat"))
    assert table.shape == (small_vt.axis.size + 1, small_vt.grid.n + 1)
    assert table[0, 0] == small_vt.grid.n
    np.testing.assert_allclose(table[0, 1:], small_vt.grid.nodes)
    np.testing.assert_allclose(table[1:, 0], small_vt.axis.scales)
    np.testing.assert_allclose(table[1:, 1:], np.abs(field.finite), rtol=1e-15)
