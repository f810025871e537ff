from __future__ import annotations

import ast
import re
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from varcoorbit.exceptions import InvalidParameterError

if TYPE_CHECKING:
    from collections.abc import Mapping

    from varcoorbit.typing import ComplexArray, GeneratorParams

__all__ = (
    "KERNEL_HEADER_DTYPE",
    "KERNEL_VALUE_DTYPE",
    "deserialize_generator",
    "read_kernel_table",
    "serialize_generator",
    "write_kernel_table",
)

KERNEL_HEADER_DTYPE = np.dtype("<i8")
KERNEL_VALUE_DTYPE = np.dtype("<c16")

RGX_GENERATOR = re.compile(
    r"""^
    \s*
    (?P<name>[a-z][a-z0-9_-]*)   # Capture generator name (e.g., "gaussian", "meyer-wavelet")
    \s*
    (?:                          # Optional parameter list
        \(
            (?P<params>.*)       # Capture raw parameters (e.g., "sigma=1.5, shift=0.0")
        \)
    )?
    \s*
    $""",
    re.VERBOSE,
)

RGX_PARAM = re.compile(
    r"""^
    \s*
    (?P<key>[a-z_][a-z0-9_]*)    # Capture parameter name
    \s*=\s*                      # Equal sign, optional whitespace
    (?P<value>.+?)               # Capture value literal (number, string, bool)
    \s*
    $""",
    re.VERBOSE,
)


def serialize_generator(name: str, params: Mapping[str, object] | None = None) -> str:
    """Serialize a named generator and its keyword parameters.

    Examples:
        >>> serialize_generator("gaussian", {"sigma": 1.5})
        'gaussian(sigma=1.5)'
        >>> serialize_generator("meyer-wavelet", {"j": 3, "k": 2})
        'meyer-wavelet(j=3, k=2)'
        >>> serialize_generator("bump")
        'bump'
    """
    if not params:
        return name
    body = ", ".join(f"{key}={value!r}" for key, value in params.items())
    return f"{name}({body})"


def _split_params(raw: str) -> list[str]:
    # Split on top-level commas only, so tuple or string values survive
    parts: list[str] = []
    depth, start, quote = 0, 0, ""
    for idx, char in enumerate(raw):
        if quote:
            quote = "" if char == quote else quote
        elif char in "'\"":
            quote = char
        elif char in "([":
            depth += 1
        elif char in ")]":
            depth -= 1
        elif char == "," and depth == 0:
            parts.append(raw[start:idx])
            start = idx + 1
    parts.append(raw[start:])
    return [part for part in parts if part.strip()]


def deserialize_generator(spec: str) -> tuple[str, GeneratorParams]:
    """Parse a generator spec string back into its name and keyword parameters.

    Arguments:
        spec: String such as `"gaussian(sigma=1.5)"` or `"random-bandlimited(seed=3)"`.

    Returns:
        The generator name and a dict of parameters.

    Raises:
        InvalidParameterError: If the string is not a valid generator spec.

    Examples:
        >>> deserialize_generator("meyer-wavelet(j=3, k=2)")
        ('meyer-wavelet', {'j': 3, 'k': 2})
        >>> deserialize_generator("bump")
        ('bump', {})
    """
    if (match := RGX_GENERATOR.match(spec)) is None:
        msg = f"Invalid generator spec: {spec!r}"
        raise InvalidParameterError(msg)

    params: GeneratorParams = {}
    for raw in _split_params(match.group("params") or ""):
        if (param := RGX_PARAM.match(raw)) is None:
            msg = f"Invalid parameter {raw.strip()!r} in generator spec {spec!r}"
            raise InvalidParameterError(msg)
        try:
            params[param.group("key")] = ast.literal_eval(param.group("value"))
        except (ValueError, SyntaxError) as exc:
            msg = f"Invalid value for {param.group('key')!r} in generator spec {spec!r}"
            raise InvalidParameterError(msg) from exc
    return match.group("name"), params


def write_kernel_table(table: ComplexArray, path: str | Path) -> Path:
    """Write a dense kernel table in the documented binary layout.

    Layout: two little-endian int64 (rows, columns), then the entries in row-major order, each as a
    little-endian float64 pair (real, imaginary).
    """
    table = np.asarray(table)
    if table.ndim != 2:  # noqa: PLR2004
        msg = f"Kernel table must be two-dimensional, found shape {table.shape}"
        raise InvalidParameterError(msg)
    path = Path(path)
    with path.open("wb") as file:
        file.write(np.asarray(table.shape, dtype=KERNEL_HEADER_DTYPE).tobytes())
        file.write(np.ascontiguousarray(table, dtype=KERNEL_VALUE_DTYPE).tobytes())
    return path


def read_kernel_table(path: str | Path) -> ComplexArray:
    """Read a table written by [`write_kernel_table`][varcoorbit.serde.write_kernel_table]."""
    data = Path(path).read_bytes()
    header_size = 2 * KERNEL_HEADER_DTYPE.itemsize
    rows, cols = np.frombuffer(data[:header_size], dtype=KERNEL_HEADER_DTYPE).tolist()
    values = np.frombuffer(data[header_size:], dtype=KERNEL_VALUE_DTYPE)
    if values.size != rows * cols:
        msg = f"Kernel file holds {values.size} entries, header announces {rows}x{cols}"
        raise InvalidParameterError(msg)
    return values.reshape(rows, cols).astype(np.complex128)
