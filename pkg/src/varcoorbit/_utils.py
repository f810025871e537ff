# ruff: noqa: T201
from __future__ import annotations

from typing import Any


def qualified_type_name(obj: object | type[Any], /) -> str:
    # Copied from Narwhals: https://github.com/narwhals-dev/narwhals/blob/282a3cb08f406e2f319d86b81a7300a2a6c5f390/narwhals/_utils.py#L1922
    # Author: Marco Gorelli
    # License: MIT: https://github.com/narwhals-dev/narwhals/blob/282a3cb08f406e2f319d86b81a7300a2a6c5f390/LICENSE.md
    tp = obj if isinstance(obj, type) else type(obj)
    module = tp.__module__ if tp.__module__ != "builtins" else ""
    return f"{module}.{tp.__name__}".lstrip(".")


def _get_sys_info() -> dict[str, str]:
    """Python version and platform of the running interpreter."""
    import platform
    import sys

    return {"python": sys.version.replace("\n", " "), "machine": platform.platform()}


def _get_deps_info() -> dict[str, str]:
    """Installed versions of the numerical and tabular dependencies.

    Versions are read from package metadata, nothing is imported.

    Returns:
        Mapping from dependency to version, empty string when not installed.
    """
    from importlib.metadata import distributions

    libs = (
        "varcoorbit",
        "numpy",
        "scipy",
        "narwhals",
        "typing_extensions",
        "polars",
        "pyarrow",
        "pandas",
    )
    dist_map = {dist.name.lower(): dist.version for dist in distributions()}
    return {lib: dist_map.get(lib, "") for lib in libs}


def show_versions() -> None:
    """Print useful debugging information.

    Examples:
        >>> from varcoorbit import show_versions
        >>> show_versions()  # doctest: +SKIP
    """
    print("\nSystem:")
    for k, stat in _get_sys_info().items():
        print(f"{k:>10}: {stat}")

    print("\nPython dependencies:")
    for k, stat in _get_deps_info().items():
        print(f"{k:>20}: {stat}")
