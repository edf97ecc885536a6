"""Tests for the alia MIME formatter slot in an IPython shell."""

import pytest
from IPython.core.formatters import BaseFormatter, JSONFormatter
from IPython.core.interactiveshell import InteractiveShell

import alia.extension as ext
from alia.extension import _get_mime_formatter
from alia.kacroots import kac_report_for_config
from alia.mime import ALIA_MIME_TYPE
from alia.presets import load_preset


@pytest.fixture
def shell():
    ip = InteractiveShell.instance()
    formatters = ip.display_formatter.formatters
    saved = formatters.get(ALIA_MIME_TYPE)
    yield ip
    ext.deactivate(ip)
    if saved is None:
        formatters.pop(ALIA_MIME_TYPE, None)
    else:
        formatters[ALIA_MIME_TYPE] = saved


def test_string_only_slot_becomes_json(shell):
    """A BaseFormatter in the alia slot is swapped for a JSONFormatter once."""
    formatters = shell.display_formatter.formatters
    formatters[ALIA_MIME_TYPE] = BaseFormatter(parent=shell.display_formatter)
    first = _get_mime_formatter(shell)
    assert isinstance(first, JSONFormatter)
    assert formatters[ALIA_MIME_TYPE] is first
    assert _get_mime_formatter(shell) is first


def test_kac_report_payload_is_a_dict(shell):
    """Kac reports shown in the shell carry their coordinates in the alia payload."""
    formatters = shell.display_formatter.formatters
    formatters[ALIA_MIME_TYPE] = BaseFormatter(parent=shell.display_formatter)
    ext._extension_active = False
    assert ext.activate(shell)
    report = kac_report_for_config(load_preset("sl3-d6-c"))
    data, _meta = shell.display_formatter.format(report)
    payload = data[ALIA_MIME_TYPE]
    assert payload["kac"]["s"] == [0, 1]
    assert "A2^(2)" in payload["html"]
