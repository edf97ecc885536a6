"""alia: exact computations with automorphic Lie algebras.

The package builds automorphic Lie algebras of a finite group acting on a
simple Lie algebra and on the Riemann sphere, their quotients by jet ideals,
the twisted truncated current algebras that model those quotients, Kac
coordinates of the local torsions and wildness certificates.

Example usage:
    >>> from alia.presets import load_preset
    >>> from alia.kacroots import kac_report_for_config
    >>> kac_report_for_config(load_preset("sl3-d6-b")).s
    (0, 1, 1)

    Notebook rendering of algebras and reports:

    >>> import alia
    >>> alia.activate()
    >>> %load_ext alia
"""

import tomllib
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _installed_version
from pathlib import Path

_SOURCE_MANIFEST = Path(__file__).resolve().parent.parent / "pyproject.toml"


def _source_tree_version() -> str | None:
    """Version from a checkout's manifest, when running from source."""
    try:
        project = tomllib.loads(_SOURCE_MANIFEST.read_text(encoding="utf-8"))["project"]
    except (OSError, KeyError, tomllib.TOMLDecodeError):
        return None
    if project.get("name") == "alia" and project.get("version"):
        return str(project["version"])
    return None


def _package_version() -> str:
    found = _source_tree_version()
    if found:
        return found
    try:
        return _installed_version("alia")
    except PackageNotFoundError:
        return "0+unknown"


__version__ = _package_version()

from alia.errors import (
    AliaError,
    ConfigError,
    InconsistencyError,
    PreconditionError,
    StabilizationError,
)
from alia.extension import (
    activate,
    deactivate,
    is_active,
    load_ipython_extension,
    unload_ipython_extension,
)

__all__ = [
    "__version__",
    # Errors
    "AliaError",
    "ConfigError",
    "InconsistencyError",
    "PreconditionError",
    "StabilizationError",
    # Extension
    "activate",
    "deactivate",
    "is_active",
    "load_ipython_extension",
    "unload_ipython_extension",
]
