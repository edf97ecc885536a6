"""Shipped action configurations.

Example usage:
    >>> from alia.presets import load_preset, PRESET_NAMES
    >>> "sl3-d6-a" in PRESET_NAMES
    True
    >>> load_preset("sl2-z5").action.order
    5
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, Tuple

from alia.errors import ConfigError

PRESET_NAMES: Tuple[str, ...] = (
    "sl2-z5",
    "sl2-trivial",
    "sl2-torus-local",
    "sl3-d6-a",
    "sl3-d6-b",
    "sl3-d6-c",
)


def preset_document(name: str) -> Dict[str, Any]:
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    text = resources.files(__name__).joinpath(f"{name}.json").read_text("utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def load_preset(name: str):
    """ActionConfig for a shipped preset (cached per process)."""
    from alia.config import build_action_config

    return build_action_config(preset_document(name))
