"""Loading of action configuration files and presets.

An action config is a JSON document describing the Lie algebra, the group
generators and the pole set::

    {
      "name": "sl2-z5",
      "lie": "sl2",
      "group": {"generators": [
        {"name": "r", "conjugation": [["zeta5", 0], [0, "zeta5^4"]],
         "mobius": [[1, 0], [0, "zeta5"]]}
      ]},
      "poles": ["inf"],
      "base_point": "0"
    }

A generator gives its Lie action either as an explicit ``lie_matrix``, as a
``conjugation`` matrix T (X -> T X T^-1) or as an ``outer`` matrix J
(X -> -J X^T J^-1).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import jsonschema

from alia.equivariant import (
    Generator,
    GroupAction,
    GroupElement,
    conjugation_automorphism,
    outer_automorphism,
)
from alia.errors import AliaError, ConfigError, PreconditionError
from alia.exactmath import CycScalar, ExactMatrix
from alia.funring import SpherePoint, mobius_equal
from alia.liealg import PRESET_ALGEBRAS, StructLieAlgebra

logger = logging.getLogger(__name__)

PRESET_PREFIX = "preset:"


def load_schema(name: str) -> Dict[str, Any]:
    """Load a JSON schema shipped in ``alia/schemas``."""
    text = resources.files("alia.schemas").joinpath(f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def json_location(path: Sequence[Union[str, int]]) -> str:
    loc = "$"
    for part in path:
        loc += f"[{part}]" if isinstance(part, int) else f".{part}"
    return loc


def validate_document(doc: Any, schema_name: str) -> None:
    """Validate against a shipped schema; the first error becomes a ConfigError."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        raise ConfigError(first.message, json_location(list(first.absolute_path)))


@dataclass
class ActionConfig:
    """A validated action configuration."""

    name: str
    lie: StructLieAlgebra
    action: GroupAction
    base_point: Optional[SpherePoint]
    torsion: Optional[List[str]] = None
    interpolate: Optional[Dict[str, Any]] = None
    document: Dict[str, Any] = field(default_factory=dict)

    def torsion_element(self) -> GroupElement:
        """Group element named by the ``torsion`` word (product left to right)."""
        if self.torsion is None:
            raise ConfigError("config has no torsion element", "$.torsion")
        names = [g.name for g in self.action.generators]
        lie = ExactMatrix.identity(self.lie.dim)
        mob = ExactMatrix.identity(2)
        for name in self.torsion:
            if name not in names:
                raise ConfigError(f"unknown generator {name!r}", "$.torsion")
            g = self.action.generators[names.index(name)]
            lie = lie @ g.lie_matrix
            mob = mob @ g.mobius
        for element in self.action.elements:
            if element.lie_matrix == lie and mobius_equal(element.mobius, mob):
                return element
        raise ConfigError("torsion word is not a group element", "$.torsion")


def _scalar(value: Any, location: str) -> CycScalar:
    try:
        return CycScalar.coerce(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), location) from exc


def _matrix(rows: Any, location: str) -> ExactMatrix:
    return ExactMatrix(
        [
            [_scalar(x, f"{location}[{i}][{j}]") for j, x in enumerate(row)]
            for i, row in enumerate(rows)
        ]
    )


def _point(value: Any, location: str) -> SpherePoint:
    try:
        return SpherePoint.parse(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), location) from exc


def _lie_algebra(spec: Any) -> StructLieAlgebra:
    if isinstance(spec, str):
        factory = PRESET_ALGEBRAS.get(spec)
        if factory is None:
            raise ConfigError(f"unknown Lie algebra preset {spec!r}", "$.lie")
        return factory()
    try:
        return StructLieAlgebra.from_json(spec)
    except (AliaError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc), "$.lie") from exc


def build_action_config(doc: Mapping[str, Any]) -> ActionConfig:
    """Turn a schema-valid document into an ActionConfig."""
    validate_document(doc, "action")
    lie = _lie_algebra(doc["lie"])
    generators: List[Generator] = []
    for i, spec in enumerate(doc["group"]["generators"]):
        loc = f"$.group.generators[{i}]"
        mobius = _matrix(spec["mobius"], f"{loc}.mobius")
        try:
            if "lie_matrix" in spec:
                lie_matrix = _matrix(spec["lie_matrix"], f"{loc}.lie_matrix")
            elif "conjugation" in spec:
                lie_matrix = conjugation_automorphism(lie, _matrix(spec["conjugation"], f"{loc}.conjugation"))
            else:
                lie_matrix = outer_automorphism(lie, _matrix(spec["outer"], f"{loc}.outer"))
        except PreconditionError as exc:
            raise ConfigError(str(exc), loc) from exc
        generators.append(Generator(spec.get("name", f"g{i}"), lie_matrix, mobius))
    poles = [_point(p, f"$.poles[{i}]") for i, p in enumerate(doc["poles"])]
    base = _point(doc["base_point"], "$.base_point") if "base_point" in doc else None
    action = GroupAction(
        lie,
        generators,
        poles,
        base_point=base,
        max_elements=int(doc["group"].get("max_elements", 200)),
        name=doc.get("name", ""),
    )
    logger.info("loaded action %r of order %d", action.name, action.order)
    return ActionConfig(
        name=doc.get("name", ""),
        lie=lie,
        action=action,
        base_point=base,
        torsion=list(doc["torsion"]) if "torsion" in doc else None,
        interpolate=dict(doc["interpolate"]) if "interpolate" in doc else None,
        document=dict(doc),
    )


def read_config_document(source: str) -> Dict[str, Any]:
    """Read a config from a path or a ``preset:<name>`` reference."""
    if source.startswith(PRESET_PREFIX):
        from alia.presets import preset_document

        return preset_document(source[len(PRESET_PREFIX):])
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"config file {source!r} does not exist")
    try:
        return json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from exc


def load_action_config(source: str) -> ActionConfig:
    return build_action_config(read_config_document(source))
