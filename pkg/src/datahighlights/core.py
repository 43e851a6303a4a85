"""Back-end data model: schemata, facts, measures, characters, roles.

Everything here is immutable after construction so datasets and
registries can be shared freely across concurrent detector runs.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from .errors import (
    UnknownCharacterError,
    UnknownCharacterTypeError,
    UnknownFeatureError,
)


class FeatureKind(str, Enum):
    """The four feature subclasses recognized by the model."""

    IDENTIFIER = "Identifier"
    DESCRIPTOR = "Descriptor"
    NUMERIC = "Numeric"
    DATETIME = "DateTime"


@dataclass(frozen=True)
class Feature:
    name: str
    kind: FeatureKind
    domain: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValueError("feature name must be non-empty")


@dataclass(frozen=True)
class Schema:
    """Template structure for facts: an ordered list of named features."""

    name: str
    features: tuple[Feature, ...]

    def __post_init__(self):
        if not self.features:
            raise ValueError("schema needs at least one feature")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be pairwise distinct")

    def feature(self, name: str) -> Feature:
        for f in self.features:
            if f.name == name:
                return f
        raise UnknownFeatureError(f"unknown feature: {name!r}")

    def has_feature(self, name: str) -> bool:
        return any(f.name == name for f in self.features)


_YEAR_RE = re.compile(r"^\d{4}$")
_YEAR_MONTH_RE = re.compile(r"^\d{4}-\d{2}$")


def parse_time_point(text: str) -> "TimePoint":
    """Parse an ISO-8601 instant (YYYY, YYYY-MM, YYYY-MM-DD or full datetime).

    Naive timestamps are taken as UTC so the epoch value is stable across
    host timezones.
    """
    raw = text.strip()
    if _YEAR_RE.match(raw):
        dt = _dt.datetime(int(raw), 1, 1, tzinfo=_dt.timezone.utc)
    elif _YEAR_MONTH_RE.match(raw):
        year, month = raw.split("-")
        dt = _dt.datetime(int(year), int(month), 1, tzinfo=_dt.timezone.utc)
    else:
        dt = _dt.datetime.fromisoformat(raw.replace("Z", "+00:00"))
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=_dt.timezone.utc)
    return TimePoint(epoch=dt.timestamp(), iso=raw)


@dataclass(frozen=True, order=True)
class TimePoint:
    """A DateTime feature value: the raw ISO string plus its parsed epoch."""

    epoch: float
    iso: str = field(compare=False)


@dataclass(frozen=True)
class Fact:
    """One observation: feature name -> typed value (None = missing)."""

    values: Mapping[str, object]

    def get(self, feature_name: str):
        return self.values.get(feature_name)


class MeasureKind(str, Enum):
    BASE = "Base"
    AGGREGATE = "Aggregate"
    DERIVED = "Derived"


AGGREGATE_FUNCTIONS = ("SUM", "AVG", "COUNT", "MIN", "MAX")


@dataclass(frozen=True, eq=False)
class MeasureType:
    """A named quantitative domain with a unit.

    Measure types compare (and hash) by name and unit: the name is the
    identity of a measure within a dataset, and serialized highlights
    carry exactly those two fields.
    """

    name: str
    unit: str = ""
    kind: MeasureKind = MeasureKind.BASE
    aggregate_function: str | None = None
    derivation_expression: str | None = None

    def __post_init__(self):
        if self.kind is MeasureKind.AGGREGATE:
            if self.aggregate_function not in AGGREGATE_FUNCTIONS:
                raise ValueError(
                    f"aggregate measure {self.name!r} needs a valid aggregate function"
                )
        if self.kind is MeasureKind.DERIVED and not self.derivation_expression:
            raise ValueError(f"derived measure {self.name!r} needs an expression")

    def __eq__(self, other):
        if not isinstance(other, MeasureType):
            return NotImplemented
        return (self.name, self.unit) == (other.name, other.unit)

    def __hash__(self):
        return hash((self.name, self.unit))


@dataclass(frozen=True)
class MeasureValue:
    measure_type: MeasureType
    value: float


@dataclass(frozen=True)
class CharacterType:
    """A structured named domain of characters.

    Id and Description are implicit; `characteristic_properties` lists any
    extra per-character attributes. `is_temporal` marks types backed by a
    DateTime feature, whose characters order chronologically.
    """

    name: str
    characteristic_properties: tuple[Feature, ...] = ()
    is_temporal: bool = False


@dataclass(frozen=True, eq=False)
class Character:
    """A dimension member: id, human-readable description, extra properties.

    Characters compare and hash by (character type name, id); that pair is
    their identity everywhere in the pipeline.
    """

    character_type: CharacterType
    id: str
    description: str
    properties: Mapping[str, object] = field(default_factory=dict)
    order_value: float | None = None

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        return (self.character_type.name, self.id) == (
            other.character_type.name,
            other.id,
        )

    def __hash__(self):
        return hash((self.character_type.name, self.id))

    def sort_key(self):
        """Axis ordering: epoch for temporal characters, description otherwise."""
        if self.character_type.is_temporal and self.order_value is not None:
            return (0, self.order_value, self.id)
        return (1, self.description, self.id)


@dataclass(frozen=True)
class Role:
    """A named part a feature or character plays inside a highlight."""

    name: str
    description: str = ""

    def __post_init__(self):
        if not self.name:
            raise ValueError("role name must be non-empty")


class CharacterRegistry:
    """All characters known for a dataset, keyed by (type name, id).

    Built during ingestion, then frozen; afterwards it is a read-only
    lookup structure.
    """

    def __init__(self):
        self._types: dict[str, CharacterType] = {}
        self._characters: dict[str, dict[str, Character]] = {}
        self._feature_types: dict[str, str] = {}
        self._frozen = False

    def _check_mutable(self):
        if self._frozen:
            raise RuntimeError("registry is frozen")

    def register_type(self, character_type: CharacterType) -> CharacterType:
        self._check_mutable()
        existing = self._types.get(character_type.name)
        if existing is not None:
            return existing
        self._types[character_type.name] = character_type
        self._characters[character_type.name] = {}
        return character_type

    def register(self, character: Character) -> Character:
        self._check_mutable()
        type_name = character.character_type.name
        if type_name not in self._types:
            self.register_type(character.character_type)
        existing = self._characters[type_name].get(character.id)
        if existing is not None:
            return existing
        self._characters[type_name][character.id] = character
        return character

    def bind_feature(self, feature_name: str, character_type_name: str):
        self._check_mutable()
        self._feature_types[feature_name] = character_type_name

    def freeze(self):
        self._frozen = True

    def character_type(self, name: str) -> CharacterType:
        try:
            return self._types[name]
        except KeyError:
            raise UnknownCharacterTypeError(
                f"unknown character type: {name!r}"
            ) from None

    def resolve(self, character_type_name: str, character_id: str) -> Character:
        if character_type_name not in self._types:
            raise UnknownCharacterTypeError(
                f"unknown character type: {character_type_name!r}"
            )
        try:
            return self._characters[character_type_name][character_id]
        except KeyError:
            raise UnknownCharacterError(
                f"unknown character {character_id!r} of type {character_type_name!r}"
            ) from None

    def characters_of(self, character_type_name: str) -> tuple[Character, ...]:
        self.character_type(character_type_name)
        return tuple(self._characters[character_type_name].values())

    def type_name_for_feature(self, feature_name: str) -> str | None:
        return self._feature_types.get(feature_name)

    def all_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(
            (type_name, char_id)
            for type_name, chars in self._characters.items()
            for char_id in chars
        )


def resolve_character(
    character_type_name: str, character_id: str, registry: CharacterRegistry
) -> Character:
    """Look up the unique character for (type, id) in the registry."""
    return registry.resolve(character_type_name, character_id)


@dataclass(frozen=True)
class Dataset:
    """A set of facts under a schema, plus its measures and characters."""

    schema: Schema
    facts: tuple[Fact, ...]
    measures: tuple[MeasureType, ...] = ()
    characters: CharacterRegistry = field(default_factory=CharacterRegistry)

    def numeric_measures(self) -> tuple[MeasureType, ...]:
        """Base and derived measures backed by a Numeric feature."""
        return tuple(
            m
            for m in self.measures
            if m.kind is not MeasureKind.AGGREGATE and self.schema.has_feature(m.name)
        )

    def measure_column(self, name: str) -> list[float | None]:
        return [fact.get(name) for fact in self.facts]

    def digest(self) -> str:
        """Stable content hash over the schema and all fact values."""
        payload = {
            "schema": [[f.name, f.kind.value] for f in self.schema.features],
            "facts": [
                [_digest_value(fact.get(f.name)) for f in self.schema.features]
                for fact in self.facts
            ],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _digest_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, TimePoint):
        return value.iso
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class DatasetViolation:
    fact_index: int
    feature: str
    reason: str


def validate_dataset(dataset: Dataset) -> list[DatasetViolation]:
    """Check every fact against the schema; empty list means valid.

    Nulls are always allowed; non-null values must match the declared
    feature kind.
    """
    violations: list[DatasetViolation] = []
    declared = {f.name for f in dataset.schema.features}
    for idx, fact in enumerate(dataset.facts):
        for key in fact.values:
            if key not in declared:
                violations.append(
                    DatasetViolation(idx, key, "feature not declared in schema")
                )
        for feat in dataset.schema.features:
            value = fact.get(feat.name)
            if value is None:
                continue
            if feat.kind is FeatureKind.NUMERIC:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    violations.append(
                        DatasetViolation(idx, feat.name, "expected a numeric value")
                    )
            elif feat.kind is FeatureKind.DATETIME:
                if not isinstance(value, TimePoint):
                    violations.append(
                        DatasetViolation(idx, feat.name, "expected a time point")
                    )
            else:
                if not isinstance(value, str):
                    violations.append(
                        DatasetViolation(idx, feat.name, "expected a string value")
                    )
    return violations
