"""IPython extension rendering alia algebras and reports.

Each renderable type is listed once in :data:`RENDERERS` together with the
view class that draws it. Activation installs two handlers per type: one for
``text/html`` and one for the ``application/vnd.alia+json`` payload. Types
are registered by module and class name, so nothing heavy is imported until
an object is shown.

Usage:
    In a Jupyter notebook:

    >>> %load_ext alia

    >>> # or programmatically
    >>> import alia
    >>> alia.activate()

    >>> from alia.liealg import sl3
    >>> sl3()  # Displays the bracket table
"""

from __future__ import annotations

import importlib
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Callable, Dict, Iterator, Optional, Tuple

from alia.mime import ALIA_MIME_TYPE

if TYPE_CHECKING:
    from IPython.core.interactiveshell import InteractiveShell

logger = logging.getLogger(__name__)

_extension_active = False


@dataclass(frozen=True)
class Renderer:
    """A displayable alia type and the view class in :mod:`alia.views` for it."""

    module: str
    type_name: str
    view: str

    def make_view(self, obj: Any) -> Any:
        from alia import views

        return getattr(views, self.view)(obj)

    def html(self, obj: Any) -> str:
        return self.make_view(obj).to_html()

    def payload(self, obj: Any) -> Dict[str, Any]:
        return self.make_view(obj)._repr_mimebundle_()[ALIA_MIME_TYPE]

    def resolve(self) -> type:
        return getattr(importlib.import_module(self.module), self.type_name)


RENDERERS: Tuple[Renderer, ...] = (
    Renderer("alia.liealg", "StructLieAlgebra", "BracketTableView"),
    Renderer("alia.kacroots", "KacReport", "KacReportView"),
    Renderer("alia.wildness", "WildnessReport", "WildnessView"),
)


def _renderer(type_name: str) -> Renderer:
    return next(r for r in RENDERERS if r.type_name == type_name)


def _get_algebra_repr_html(obj: Any) -> str:
    return _renderer("StructLieAlgebra").html(obj)


def _get_kac_repr_html(obj: Any) -> str:
    return _renderer("KacReport").html(obj)


def _get_wildness_repr_html(obj: Any) -> str:
    return _renderer("WildnessReport").html(obj)


def _get_mime_formatter(ip: "InteractiveShell") -> Optional[Any]:
    """Formatter for the alia MIME type that accepts dict payloads.

    IPython's default for unknown MIME types is a string-only
    ``BaseFormatter``; it is replaced by a ``JSONFormatter`` in place.
    """
    formatters = getattr(getattr(ip, "display_formatter", None), "formatters", None)
    if formatters is None:
        return None
    current = formatters.get(ALIA_MIME_TYPE)
    accepted = getattr(current, "_return_type", None)
    if not isinstance(accepted, tuple):
        accepted = (accepted,)
    if current is not None and (dict in accepted or list in accepted):
        return current
    try:
        from IPython.core.formatters import JSONFormatter
    except ImportError:
        return None
    replacement = JSONFormatter(parent=ip.display_formatter)
    formatters[ALIA_MIME_TYPE] = replacement
    return replacement


def _shell(ip: Optional["InteractiveShell"]) -> Optional["InteractiveShell"]:
    if ip is not None:
        return ip
    try:
        from IPython import get_ipython
    except ImportError:
        return None
    return get_ipython()


def _slots(
    ip: "InteractiveShell", create_mime: bool
) -> Iterator[Tuple[Any, Callable[[Renderer], Callable[[Any], Any]]]]:
    """Pairs of (formatter, handler factory) for HTML and the alia MIME type."""
    formatters = ip.display_formatter.formatters
    yield formatters["text/html"], lambda r: r.html
    mime = _get_mime_formatter(ip) if create_mime else formatters.get(ALIA_MIME_TYPE)
    if mime is not None:
        yield mime, lambda r: r.payload


def _has_html_formatter(ip: Optional["InteractiveShell"]) -> bool:
    formatters = getattr(getattr(ip, "display_formatter", None), "formatters", None)
    return formatters is not None and "text/html" in formatters


def _install(ip: Optional["InteractiveShell"] = None) -> bool:
    """Register HTML and MIME handlers for every renderer.

    Returns
    -------
    bool
        False when no shell with an HTML formatter is available.
    """
    ip = _shell(ip)
    if not _has_html_formatter(ip):
        return False
    for formatter, handler in _slots(ip, create_mime=True):
        for r in RENDERERS:
            formatter.for_type_by_name(r.module, r.type_name, handler(r))
    logger.debug("registered notebook renderers for %d types", len(RENDERERS))
    return True


def _uninstall(ip: Optional["InteractiveShell"] = None) -> bool:
    ip = _shell(ip)
    if not _has_html_formatter(ip):
        return False
    for formatter, _ in _slots(ip, create_mime=False):
        deferred = getattr(formatter, "deferred_printers", {})
        for r in RENDERERS:
            deferred.pop((r.module, r.type_name), None)
            # a handler moves to the type table once its type has been shown
            try:
                formatter.pop(r.resolve(), None)
            except (ImportError, AttributeError, KeyError):
                pass
    return True


def activate(ip: Optional["InteractiveShell"] = None) -> bool:
    """Activate the alia notebook extension.

    Returns
    -------
    bool
        True if activation was successful.

    Examples
    --------
    >>> import alia
    >>> alia.activate()
    True
    """
    global _extension_active

    if not _extension_active:
        _extension_active = _install(ip)
    return _extension_active


def deactivate(ip: Optional["InteractiveShell"] = None) -> bool:
    """Remove the alia renderers."""
    global _extension_active

    _extension_active = False
    return _uninstall(ip)


def is_active() -> bool:
    return _extension_active


def load_ipython_extension(ip: "InteractiveShell") -> None:
    """Called by IPython for ``%load_ext alia``."""
    if not activate(ip):
        raise RuntimeError("alia could not register its HTML renderers in this shell")
    print("alia extension loaded: Lie algebras, Kac reports and wildness tables render inline.")


def unload_ipython_extension(ip: "InteractiveShell") -> None:
    deactivate(ip)
    print("alia extension unloaded.")
