"""CSV ingestion: fact table + dimension lookups -> Dataset + characters.

The dataset configuration is a JSON document with keys `factTable`,
`columns`, `dimensionTables` and `derivedMeasures`. Relative paths are
resolved against the config file's directory.
"""

from __future__ import annotations

import ast
import csv
import json
import logging
import operator
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    Character,
    CharacterRegistry,
    CharacterType,
    Dataset,
    Fact,
    Feature,
    FeatureKind,
    MeasureKind,
    MeasureType,
    Schema,
    TimePoint,
    parse_time_point,
)
from .errors import ConfigError, DerivationError, JoinMissError, MalformedCsvError

log = logging.getLogger(__name__)

COLUMN_ROLES = ("measure", "dimension", "datetime", "descriptor", "identifier", "ignore")

# Suggestion thresholds for infer_feature_kinds.
DIMENSION_DISTINCT_RATIO = 0.5
DIMENSION_DISTINCT_CAP = 1000


@dataclass(frozen=True)
class ColumnSpec:
    role: str
    unit: str = ""
    character_type_name: str | None = None

    def __post_init__(self):
        if self.role not in COLUMN_ROLES:
            raise ConfigError(f"unknown column role: {self.role!r}")


@dataclass(frozen=True)
class DimensionTableSpec:
    path: str
    character_type_name: str
    join_key: str
    description_column: str
    property_columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class DerivedMeasureSpec:
    name: str
    expression: str


@dataclass
class DatasetConfig:
    fact_table_path: Path
    columns: dict[str, ColumnSpec]
    dimension_tables: list[DimensionTableSpec] = field(default_factory=list)
    derived_measures: list[DerivedMeasureSpec] = field(default_factory=list)
    allow_dangling_keys: bool = False
    lenient: bool = False
    detectors: dict = field(default_factory=dict)
    templates: dict = field(default_factory=dict)
    narrative: dict = field(default_factory=dict)

    def __post_init__(self):
        roles = [spec.role for spec in self.columns.values()]
        if "measure" not in roles:
            raise ConfigError("config needs at least one measure column")
        if "dimension" not in roles and "datetime" not in roles:
            raise ConfigError("config needs at least one dimension or datetime column")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "DatasetConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, base_dir=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir: str | Path = ".") -> "DatasetConfig":
        base = Path(base_dir)
        if "factTable" not in raw:
            raise ConfigError("config is missing the 'factTable' key")
        if "columns" not in raw or not isinstance(raw["columns"], dict):
            raise ConfigError("config is missing the 'columns' mapping")

        columns: dict[str, ColumnSpec] = {}
        for name, spec in raw["columns"].items():
            if isinstance(spec, str):
                spec = {"role": spec}
            if not isinstance(spec, dict) or "role" not in spec:
                raise ConfigError(f"column {name!r} needs a role")
            columns[name] = ColumnSpec(
                role=spec["role"],
                unit=spec.get("unit", ""),
                character_type_name=spec.get("characterTypeName"),
            )

        dim_tables = []
        for entry in raw.get("dimensionTables", []):
            try:
                dim_tables.append(
                    DimensionTableSpec(
                        path=entry["path"],
                        character_type_name=entry["characterTypeName"],
                        join_key=entry["joinKey"],
                        description_column=entry["descriptionColumn"],
                        property_columns=tuple(entry.get("propertyColumns", [])),
                    )
                )
            except KeyError as exc:
                raise ConfigError(f"dimension table entry missing key: {exc}") from exc

        derived = [
            DerivedMeasureSpec(name=entry["name"], expression=entry["expression"])
            for entry in raw.get("derivedMeasures", [])
        ]

        return cls(
            fact_table_path=base / raw["factTable"],
            columns=columns,
            dimension_tables=dim_tables,
            derived_measures=derived,
            allow_dangling_keys=bool(raw.get("allowDanglingKeys", False)),
            lenient=bool(raw.get("lenient", False)),
            detectors=raw.get("detectors", {}),
            templates=raw.get("templates", {}),
            narrative=raw.get("narrative", {}),
        )


# ---------------------------------------------------------------------------
# derived-measure expressions: + - * / and parentheses over measure names
# ---------------------------------------------------------------------------

_BINARY_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def compile_expression(expression: str, known_names: set[str]):
    """Compile an arithmetic expression into env -> float|None.

    Null operands and division by zero yield None for that fact. Unknown
    names raise DerivationError at compile time.
    """
    try:
        tree = ast.parse(expression, mode="eval")
    except SyntaxError as exc:
        raise DerivationError(f"cannot parse expression {expression!r}: {exc}") from exc

    def check(node):
        if isinstance(node, ast.Expression):
            check(node.body)
        elif isinstance(node, ast.BinOp) and type(node.op) in _BINARY_OPS:
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            check(node.operand)
        elif isinstance(node, ast.Name):
            if node.id not in known_names:
                raise DerivationError(
                    f"expression {expression!r} references unknown measure {node.id!r}"
                )
        elif isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            pass
        else:
            raise DerivationError(
                f"unsupported construct in expression {expression!r}"
            )

    check(tree)

    def evaluate(node, env):
        if isinstance(node, ast.Expression):
            return evaluate(node.body, env)
        if isinstance(node, ast.BinOp):
            left = evaluate(node.left, env)
            right = evaluate(node.right, env)
            if left is None or right is None:
                return None
            try:
                return _BINARY_OPS[type(node.op)](left, right)
            except ZeroDivisionError:
                return None
        if isinstance(node, ast.UnaryOp):
            value = evaluate(node.operand, env)
            if value is None:
                return None
            return -value if isinstance(node.op, ast.USub) else value
        if isinstance(node, ast.Name):
            return env.get(node.id)
        return float(node.value)

    return lambda env: evaluate(tree, env)


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            rows = list(reader)
        except csv.Error as exc:
            raise MalformedCsvError(f"cannot parse {path}: {exc}") from exc
    if not rows:
        raise MalformedCsvError(f"{path} has no header row")
    return rows[0], rows[1:]


@dataclass
class _DimensionLookup:
    spec: DimensionTableSpec
    descriptions: dict[str, str]
    properties: dict[str, dict[str, str]]


def _load_dimension_table(spec: DimensionTableSpec, base_dir: Path) -> _DimensionLookup:
    header, rows = _read_csv(base_dir / spec.path)
    if spec.join_key in header:
        key_col = header.index(spec.join_key)
    elif "id" in header:
        key_col = header.index("id")
    else:
        key_col = 0
    try:
        desc_col = header.index(spec.description_column)
    except ValueError:
        raise ConfigError(
            f"dimension table {spec.path} has no column {spec.description_column!r}"
        ) from None
    prop_cols = {}
    for prop in spec.property_columns:
        try:
            prop_cols[prop] = header.index(prop)
        except ValueError:
            raise ConfigError(
                f"dimension table {spec.path} has no column {prop!r}"
            ) from None

    descriptions: dict[str, str] = {}
    properties: dict[str, dict[str, str]] = {}
    for row in rows:
        if len(row) <= max([key_col, desc_col, *prop_cols.values()] or [0]):
            raise MalformedCsvError(
                f"short row in dimension table {spec.path}", row=row
            )
        key = row[key_col]
        descriptions[key] = row[desc_col]
        properties[key] = {prop: row[idx] for prop, idx in prop_cols.items()}
    return _DimensionLookup(spec, descriptions, properties)


def load_dataset(config: DatasetConfig) -> tuple[Dataset, CharacterRegistry]:
    """Load the fact table, join dimensions, evaluate derived measures.

    Returns the immutable dataset plus its frozen character registry (the
    dataset also keeps a reference to the registry).
    """
    base_dir = config.fact_table_path.parent
    header, rows = _read_csv(config.fact_table_path)

    positions: dict[str, int] = {}
    for name in config.columns:
        if name not in header:
            raise ConfigError(
                f"configured column {name!r} not present in {config.fact_table_path}"
            )
        positions[name] = header.index(name)

    lookups: dict[str, _DimensionLookup] = {}
    for spec in config.dimension_tables:
        lookups[spec.join_key] = _load_dimension_table(spec, base_dir)

    registry = CharacterRegistry()
    features: list[Feature] = []
    measures: list[MeasureType] = []
    char_types: dict[str, CharacterType] = {}

    for name, spec in config.columns.items():
        if spec.role == "ignore":
            continue
        if spec.role == "measure":
            features.append(Feature(name, FeatureKind.NUMERIC, domain="numeric"))
            measures.append(MeasureType(name=name, unit=spec.unit))
        elif spec.role == "datetime":
            features.append(Feature(name, FeatureKind.DATETIME, domain="timestamp"))
            type_name = (
                lookups[name].spec.character_type_name if name in lookups else name
            )
            char_type = CharacterType(name=type_name, is_temporal=True)
            char_types[name] = registry.register_type(char_type)
            registry.bind_feature(name, type_name)
        elif spec.role == "dimension":
            features.append(Feature(name, FeatureKind.IDENTIFIER, domain="text"))
            type_name = spec.character_type_name or (
                lookups[name].spec.character_type_name if name in lookups else name
            )
            prop_features = ()
            if name in lookups:
                prop_features = tuple(
                    Feature(p, FeatureKind.DESCRIPTOR, domain="text")
                    for p in lookups[name].spec.property_columns
                )
            char_type = CharacterType(name=type_name, characteristic_properties=prop_features)
            char_types[name] = registry.register_type(char_type)
            registry.bind_feature(name, type_name)
        elif spec.role == "identifier":
            features.append(Feature(name, FeatureKind.IDENTIFIER, domain="text"))
        else:
            features.append(Feature(name, FeatureKind.DESCRIPTOR, domain="text"))

    def resolve_dimension_value(column: str, raw_id: str) -> Character:
        char_type = char_types[column]
        lookup = lookups.get(column)
        description = raw_id
        props: dict[str, str] = {}
        order_value = None
        if char_type.is_temporal:
            order_value = parse_time_point(raw_id).epoch
        if lookup is not None:
            if raw_id in lookup.descriptions:
                description = lookup.descriptions[raw_id]
                props = lookup.properties[raw_id]
            elif config.allow_dangling_keys:
                log.warning(
                    "dangling key %r in column %r: no row in %s",
                    raw_id,
                    column,
                    lookup.spec.path,
                )
            else:
                raise JoinMissError(
                    f"fact value {raw_id!r} in column {column!r} has no row in "
                    f"{lookup.spec.path}"
                )
        return registry.register(
            Character(
                character_type=char_type,
                id=raw_id,
                description=description,
                properties=props,
                order_value=order_value,
            )
        )

    derived_fns = []
    known = {m.name for m in measures}
    for spec in config.derived_measures:
        derived_fns.append((spec, compile_expression(spec.expression, known)))
        known.add(spec.name)
        features.append(Feature(spec.name, FeatureKind.NUMERIC, domain="numeric"))
        measures.append(
            MeasureType(
                name=spec.name,
                kind=MeasureKind.DERIVED,
                derivation_expression=spec.expression,
            )
        )

    facts: list[Fact] = []
    for row_index, row in enumerate(rows, start=2):  # 1-based, row 1 = header
        try:
            values: dict[str, object] = {}
            for name, spec in config.columns.items():
                if spec.role == "ignore":
                    continue
                if positions[name] >= len(row):
                    raise MalformedCsvError(
                        f"row {row_index} of {config.fact_table_path} is missing "
                        f"column {name!r}",
                        row=row_index,
                        column=name,
                    )
                raw = row[positions[name]].strip()
                if raw == "":
                    values[name] = None
                    continue
                if spec.role == "measure":
                    try:
                        values[name] = float(raw)
                    except ValueError:
                        raise MalformedCsvError(
                            f"row {row_index}, column {name!r}: {raw!r} is not numeric",
                            row=row_index,
                            column=name,
                        ) from None
                elif spec.role == "datetime":
                    try:
                        time_point = parse_time_point(raw)
                    except ValueError:
                        raise MalformedCsvError(
                            f"row {row_index}, column {name!r}: {raw!r} is not an "
                            "ISO-8601 timestamp",
                            row=row_index,
                            column=name,
                        ) from None
                    values[name] = TimePoint(time_point.epoch, raw)
                    resolve_dimension_value(name, raw)
                elif spec.role == "dimension":
                    values[name] = raw
                    resolve_dimension_value(name, raw)
                else:
                    values[name] = raw
        except MalformedCsvError:
            if config.lenient:
                log.warning("skipping malformed row %d", row_index)
                continue
            raise

        env = {m.name: values.get(m.name) for m in measures}
        for spec, fn in derived_fns:
            result = fn(env)
            value = None if result is None else float(result)
            values[spec.name] = value
            env[spec.name] = value

        facts.append(Fact(values=values))

    registry.freeze()
    schema_name = config.fact_table_path.stem
    dataset = Dataset(
        schema=Schema(name=schema_name, features=tuple(features)),
        facts=tuple(facts),
        measures=tuple(measures),
        characters=registry,
    )
    return dataset, registry


# ---------------------------------------------------------------------------
# role inference
# ---------------------------------------------------------------------------


def _parses_as_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _parses_as_time(text: str) -> bool:
    try:
        parse_time_point(text)
        return True
    except ValueError:
        return False


def infer_feature_kinds(raw_columns: dict[str, list[str]]) -> dict[str, str]:
    """Suggest a role per sampled column; configuration always overrides.

    Fully numeric -> 'Numeric'; fully ISO timestamps -> 'DateTime';
    low-cardinality text (distinct ratio <= 0.5, at most 1000 distinct
    values) -> 'dimension'; anything else -> 'descriptor'.
    """
    suggestions: dict[str, str] = {}
    for name, column in raw_columns.items():
        values = [v.strip() for v in column if v is not None and v.strip() != ""]
        if not values:
            suggestions[name] = "descriptor"
            continue
        if all(_parses_as_number(v) for v in values):
            suggestions[name] = "Numeric"
            continue
        if all(_parses_as_time(v) for v in values):
            suggestions[name] = "DateTime"
            continue
        distinct = len(set(values))
        if (
            distinct / len(values) <= DIMENSION_DISTINCT_RATIO
            and distinct <= DIMENSION_DISTINCT_CAP
        ):
            suggestions[name] = "dimension"
        else:
            suggestions[name] = "descriptor"
    return suggestions
