"""Tests for action configuration loading and presets."""

import copy
import json

import pytest

from alia.config import (
    build_action_config,
    json_location,
    load_action_config,
    read_config_document,
)
from alia.errors import ConfigError, PreconditionError
from alia.funring import SpherePoint
from alia.presets import PRESET_NAMES, load_preset, preset_document


class TestPresets:
    """Shipped configurations load and close to finite groups."""

    @pytest.mark.parametrize(
        "name,order",
        [("sl2-z5", 5), ("sl2-trivial", 1), ("sl2-torus-local", 2), ("sl3-d6-a", 12)],
    )
    def test_group_orders(self, name, order):
        """Each preset generates a group of the documented order."""
        assert load_preset(name).action.order == order

    def test_unknown_preset(self):
        """Unknown names list the alternatives."""
        with pytest.raises(ConfigError, match="sl2-z5"):
            preset_document("nope")

    def test_every_preset_is_listed(self):
        """Documents exist for every listed preset."""
        for name in PRESET_NAMES:
            assert preset_document(name)["name"] == name

    def test_torsion_element(self):
        """The torsion word names the rotation of order five."""
        cfg = load_preset("sl2-z5")
        element = cfg.torsion_element()
        assert element.word == (0,)
        assert cfg.action.element_order(element.index) == 5

    def test_preset_reference(self):
        """preset:<name> references resolve through the loader."""
        cfg = load_action_config("preset:sl2-torus-local")
        assert cfg.name == "sl2-torus-local"
        assert cfg.base_point == SpherePoint.finite(0)


class TestValidation:
    """Malformed documents become located ConfigErrors."""

    @pytest.fixture
    def document(self):
        return copy.deepcopy(preset_document("sl2-z5"))

    def test_missing_required_key(self, document):
        """A document without poles is rejected at the root."""
        del document["poles"]
        with pytest.raises(ConfigError) as info:
            build_action_config(document)
        assert info.value.location == "$"
        assert "poles" in str(info.value)

    def test_unknown_lie_preset(self, document):
        """Only the shipped Lie algebra names are accepted."""
        document["lie"] = "sl4"
        with pytest.raises(ConfigError) as info:
            build_action_config(document)
        assert info.value.location == "$.lie"

    def test_bad_scalar_is_located(self, document):
        """Unparseable scalars report their JSON path."""
        document["group"]["generators"][0]["mobius"][1][1] = "zeta5^"
        with pytest.raises(ConfigError) as info:
            build_action_config(document)
        assert info.value.location == "$.group.generators[0].mobius[1][1]"

    def test_unknown_torsion_generator(self, document):
        """Torsion words may only use declared generators."""
        document["torsion"] = ["q"]
        with pytest.raises(ConfigError):
            build_action_config(document).torsion_element()

    def test_pole_set_must_be_invariant(self, document):
        """The rotation moves 1, so {1} is not an admissible pole set."""
        document["poles"] = ["1"]
        with pytest.raises(PreconditionError):
            build_action_config(document)

    def test_missing_file(self, tmp_path):
        """Nonexistent paths are config errors."""
        with pytest.raises(ConfigError):
            read_config_document(str(tmp_path / "missing.json"))

    def test_invalid_json(self, tmp_path):
        """Syntax errors are reported with their line."""
        path = tmp_path / "broken.json"
        path.write_text('{"lie": "sl2",\n', "utf-8")
        with pytest.raises(ConfigError, match="line"):
            read_config_document(str(path))

    def test_file_round_trip(self, tmp_path, document):
        """A preset written to disk loads like the preset itself."""
        path = tmp_path / "action.json"
        path.write_text(json.dumps(document), "utf-8")
        assert load_action_config(str(path)).action.order == 5

    def test_json_location(self):
        """Paths render with dots for keys and brackets for indices."""
        assert json_location(["group", "generators", 0, "mobius"]) == "$.group.generators[0].mobius"
        assert json_location([]) == "$"
