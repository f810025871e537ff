from __future__ import annotations

from importlib.metadata import version as get_version
from importlib.util import find_spec
from typing import TYPE_CHECKING, Literal, TypeAlias

from narwhals.utils import parse_version

if TYPE_CHECKING:
    Version: TypeAlias = tuple[int, ...]

Backend: TypeAlias = Literal["polars", "pyarrow", "pandas"]

MIN_VERSIONS: dict[str, Version] = {
    "polars": (0, 20, 4),
    "pyarrow": (13, 0),
    "pandas": (1, 5),
}
"""Minimum required versions for the optional dataframe backends"""

BACKEND_PREFERENCE: tuple[Backend, ...] = ("polars", "pyarrow", "pandas")


def check_version(package: str) -> bool:
    """Check if a package is installed and meets the minimum version requirement.

    Arguments:
        package: Name of the package to check.

    Returns:
        True if the package is installed and meets the minimum version requirement.

    Raises:
        ImportError: If the package is installed but does not meet the minimum version.
    """
    if find_spec(package) is None:
        return False

    if (min_version := MIN_VERSIONS.get(package)) is None:
        return True

    installed_version = get_version(package)
    if parse_version(installed_version) < min_version:
        min_version_str = ".".join(str(v) for v in min_version)
        msg = f"varcoorbit requires {package}>={min_version_str}, but version {installed_version} is installed."
        raise ImportError(msg)

    return True


def dataframe_backend(preferred: Backend | None = None) -> Backend:
    """Pick the dataframe backend used for tabular I/O.

    Arguments:
        preferred: Backend to use when available; otherwise the first available of polars, pyarrow, pandas.

    Returns:
        Name of an installed backend.

    Raises:
        ImportError: If none of the supported backends is installed.
    """
    candidates = (preferred, *BACKEND_PREFERENCE) if preferred is not None else BACKEND_PREFERENCE
    for backend in candidates:
        if check_version(backend):
            return backend
    msg = "Tabular output requires one of polars, pyarrow or pandas; install e.g. `varcoorbit[pandas]`."
    raise ImportError(msg)
