"""Tests for the alia notebook extension."""

from IPython.core.interactiveshell import InteractiveShell

import alia.extension as ext
from alia.extension import (
    _get_algebra_repr_html,
    _get_kac_repr_html,
    _get_wildness_repr_html,
    activate,
    deactivate,
    is_active,
)
from alia.funring import SpherePoint
from alia.kacroots import kac_report_for_config
from alia.liealg import sl2
from alia.mime import ALIA_MIME_TYPE
from alia.presets import load_preset
from alia.wildness import wildness_report


class TestReprHtml:
    """HTML handlers for each registered type."""

    def test_algebra(self):
        """Algebras render their bracket table."""
        assert "[e, f]" in _get_algebra_repr_html(sl2())

    def test_kac_report(self):
        """Kac reports render the normalization summary."""
        html = _get_kac_repr_html(kac_report_for_config(load_preset("sl3-d6-b")))
        assert "(0, 1, 1)" in html
        assert "A2^(1)" in html

    def test_wildness_report(self):
        """Wildness reports render the growth table."""
        report = wildness_report(load_preset("sl2-z5"), SpherePoint.finite(0), nmax=2)
        html = _get_wildness_repr_html(report)
        assert "no wild quotient" in html


class TestActivateDeactivate:
    """Tests for activate/deactivate functions."""

    def test_is_active_initially_false(self):
        """The extension starts inactive."""
        ext._extension_active = False
        assert not is_active()

    def test_activate_without_ipython(self):
        """activate reports whether a shell was found."""
        ext._extension_active = False
        assert isinstance(activate(), bool)

    def test_deactivate_resets_state(self):
        """deactivate clears the active flag."""
        ext._extension_active = True
        deactivate()
        assert not is_active()

    def test_activate_registers_formatters(self):
        """Algebras render through the shell once the extension is active."""
        ip = InteractiveShell.instance()
        original = ip.display_formatter.formatters.get(ALIA_MIME_TYPE)
        ext._extension_active = False
        try:
            assert activate(ip)
            assert is_active()
            data, _meta = ip.display_formatter.format(sl2())
            assert "[h, e]" in data["text/html"]
            assert data[ALIA_MIME_TYPE]["algebra"]["labels"] == ["h", "e", "f"]
        finally:
            deactivate(ip)
            if original is None:
                ip.display_formatter.formatters.pop(ALIA_MIME_TYPE, None)
            else:
                ip.display_formatter.formatters[ALIA_MIME_TYPE] = original
        data, _meta = ip.display_formatter.format(sl2())
        assert "text/html" not in data


class TestModuleLoading:
    """Tests for module loading functions."""

    def test_load_ipython_extension_callable(self):
        """The package exposes the IPython extension hooks."""
        import alia

        assert callable(alia.load_ipython_extension)
        assert callable(alia.unload_ipython_extension)
