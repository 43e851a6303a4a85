"""Group-by aggregate queries over a dataset: the substrate detectors consume.

A ResultSet is an in-memory pivot: per-axis ordered characters, a sparse
cell map, and (for SUM-family aggregates) marginals plus the grand total.
Cell folding happens in a fixed order (axis-sorted cells, value-sorted
contributions) so results are bit-identical regardless of fact order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .core import (
    Character,
    Dataset,
    FeatureKind,
    MeasureKind,
    MeasureType,
    MeasureValue,
    TimePoint,
)
from .errors import (
    CharacterNotOnAxisError,
    GrouperArityError,
    MarginalsUndefinedError,
    NonNumericMeasureError,
    QueryError,
)

AGGREGATES = ("SUM", "AVG", "COUNT", "MIN", "MAX")
FILTER_OPS = ("=", "!=", "<", "<=", ">", ">=", "in")
_OP_ALIASES = {"==": "=", "≠": "!=", "≤": "<=", "≥": ">="}


@dataclass(frozen=True)
class Filter:
    feature: str
    op: str
    value: object

    def __post_init__(self):
        op = _OP_ALIASES.get(self.op, self.op)
        object.__setattr__(self, "op", op)
        if op not in FILTER_OPS:
            raise QueryError(f"unsupported filter operator: {self.op!r}")


@dataclass(frozen=True)
class GroupBySpec:
    filters: tuple[Filter, ...]
    groupers: tuple[str, ...]
    measure: str
    aggregate: str

    def __post_init__(self):
        if not self.groupers:
            raise GrouperArityError("at least one grouper is required")
        if len(self.groupers) > 2:
            raise GrouperArityError(
                f"only 1 or 2 groupers are supported, got {len(self.groupers)}"
            )
        if len(set(self.groupers)) != len(self.groupers):
            raise QueryError("groupers must be distinct")
        if self.aggregate not in AGGREGATES:
            raise QueryError(f"unsupported aggregate: {self.aggregate!r}")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "GroupBySpec":
        path = Path(path)
        if not path.exists():
            raise QueryError(f"query file not found: {path}")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise QueryError(f"query file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "GroupBySpec":
        try:
            groupers = tuple(raw["groupBy"])
            measure = raw["measure"]
        except KeyError as exc:
            raise QueryError(f"query is missing key {exc}") from exc
        filters = tuple(
            Filter(f["feature"], f["op"], f["value"]) for f in raw.get("filters", [])
        )
        return cls(
            filters=filters,
            groupers=groupers,
            measure=measure,
            aggregate=raw.get("agg", "SUM"),
        )

    def digest(self) -> str:
        payload = {
            "filters": [[f.feature, f.op, f.value] for f in self.filters],
            "groupBy": list(self.groupers),
            "measure": self.measure,
            "agg": self.aggregate,
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class SeriesView:
    """An ordered series along one axis; absent cells are skipped, so the
    series is dense iff len(points) == len(axis_characters)."""

    axis_feature: str
    measure_type: MeasureType
    axis_characters: tuple[Character, ...]
    points: tuple[tuple[Character, float], ...]

    @property
    def dense(self) -> bool:
        return len(self.points) == len(self.axis_characters)

    def values(self) -> list[float]:
        return [value for _, value in self.points]


@dataclass(frozen=True)
class ResultSet:
    spec: GroupBySpec
    measure_type: MeasureType
    axes: tuple[tuple[Character, ...], ...]
    cells: Mapping[tuple[Character, ...], MeasureValue]
    row_marginals: tuple[MeasureValue, ...] | None = None
    column_marginals: tuple[MeasureValue, ...] | None = None
    grand_total: MeasureValue | None = None
    axis_features: tuple[str, ...] = field(default=())

    def cell_value(self, key: tuple[Character, ...]) -> float | None:
        cell = self.cells.get(key)
        return None if cell is None else cell.value

    def marginals(self, axis_index: int) -> tuple[MeasureValue, ...]:
        marginals = (self.row_marginals, self.column_marginals)[axis_index]
        if marginals is None:
            raise MarginalsUndefinedError(
                f"marginals undefined for aggregate {self.spec.aggregate}"
            )
        return marginals


def _comparable(feature_kind: FeatureKind, fact_value, constant):
    """Normalize a fact value / filter constant pair for comparison."""
    if isinstance(fact_value, TimePoint):
        fact_value = fact_value.epoch
        if isinstance(constant, str):
            from .core import parse_time_point

            constant = parse_time_point(constant).epoch
    if feature_kind is FeatureKind.NUMERIC and isinstance(constant, str):
        constant = float(constant)
    return fact_value, constant


def _passes(filt: Filter, kind: FeatureKind, value) -> bool:
    if value is None:
        return False  # nulls never satisfy a filter
    if filt.op == "in":
        candidates = filt.value if isinstance(filt.value, (list, tuple)) else [filt.value]
        return any(_matches_eq(kind, value, c) for c in candidates)
    fact_value, constant = _comparable(kind, value, filt.value)
    if filt.op == "=":
        return fact_value == constant
    if filt.op == "!=":
        return fact_value != constant
    if filt.op == "<":
        return fact_value < constant
    if filt.op == "<=":
        return fact_value <= constant
    if filt.op == ">":
        return fact_value > constant
    return fact_value >= constant


def _matches_eq(kind: FeatureKind, value, constant) -> bool:
    fact_value, constant = _comparable(kind, value, constant)
    return fact_value == constant


def _fold_sum(values: list[float]) -> float:
    total = 0.0
    for v in sorted(values):
        total += v
    return total


def execute_groupby(dataset: Dataset, spec: GroupBySpec) -> ResultSet:
    """Run the group-by aggregate query and build the pivot.

    Axis ordering: temporal axes chronologically, others lexicographically
    by character description. Facts with a null grouper value cannot be
    placed and are skipped; null measure values are skipped by every
    aggregate (COUNT counts non-null).
    """
    schema = dataset.schema
    for grouper in spec.groupers:
        schema.feature(grouper)
        if dataset.characters.type_name_for_feature(grouper) is None:
            raise QueryError(f"grouper {grouper!r} is not a dimension feature")
    measure_feature = schema.feature(spec.measure)
    if measure_feature.kind is not FeatureKind.NUMERIC:
        raise NonNumericMeasureError(f"measure {spec.measure!r} is not Numeric")
    for filt in spec.filters:
        schema.feature(filt.feature)

    base_measure = next(
        (m for m in dataset.measures if m.name == spec.measure), None
    )
    unit = "facts" if spec.aggregate == "COUNT" else (base_measure.unit if base_measure else "")
    agg_measure = MeasureType(
        name=spec.measure,
        unit=unit,
        kind=MeasureKind.AGGREGATE,
        aggregate_function=spec.aggregate,
    )

    filter_kinds = {f.feature: schema.feature(f.feature).kind for f in spec.filters}
    registry = dataset.characters

    def grouper_character(grouper: str, value) -> Character | None:
        if value is None:
            return None
        type_name = registry.type_name_for_feature(grouper)
        char_id = value.iso if isinstance(value, TimePoint) else str(value)
        return registry.resolve(type_name, char_id)

    contributions: dict[tuple[Character, ...], list[float]] = {}
    axis_sets: list[dict[Character, None]] = [dict() for _ in spec.groupers]
    for fact in dataset.facts:
        if not all(
            _passes(f, filter_kinds[f.feature], fact.get(f.feature))
            for f in spec.filters
        ):
            continue
        key_chars = []
        for grouper in spec.groupers:
            character = grouper_character(grouper, fact.get(grouper))
            if character is None:
                break
            key_chars.append(character)
        else:
            for axis, character in zip(axis_sets, key_chars):
                axis.setdefault(character)
            measure_value = fact.get(spec.measure)
            if measure_value is None:
                continue
            contributions.setdefault(tuple(key_chars), []).append(float(measure_value))

    axes = tuple(
        tuple(sorted(axis.keys(), key=lambda c: c.sort_key())) for axis in axis_sets
    )

    def aggregate(values: list[float]) -> float:
        if spec.aggregate == "SUM":
            return _fold_sum(values)
        if spec.aggregate == "AVG":
            return _fold_sum(values) / len(values)
        if spec.aggregate == "COUNT":
            return float(len(values))
        if spec.aggregate == "MIN":
            return min(values)
        return max(values)

    # Cells materialize in axis-sorted (row-major) order.
    cells: dict[tuple[Character, ...], MeasureValue] = {}
    if len(axes) == 1:
        ordered_keys = [(c,) for c in axes[0]]
    else:
        ordered_keys = [(a, b) for a in axes[0] for b in axes[1]]
    for key in ordered_keys:
        if key in contributions:
            cells[key] = MeasureValue(agg_measure, aggregate(contributions[key]))

    row_marginals = column_marginals = grand_total = None
    if spec.aggregate in ("SUM", "COUNT"):
        def margin(axis_index: int) -> tuple[MeasureValue, ...]:
            out = []
            for character in axes[axis_index]:
                if len(axes) == 1:
                    cell = cells.get((character,))
                    values = [cell.value] if cell is not None else []
                else:
                    other = axes[1 - axis_index]
                    keys = (
                        [(character, b) for b in other]
                        if axis_index == 0
                        else [(a, character) for a in other]
                    )
                    values = [cells[k].value for k in keys if k in cells]
                total = 0.0
                for v in values:
                    total += v
                out.append(MeasureValue(agg_measure, total))
            return tuple(out)

        row_marginals = margin(0)
        column_marginals = margin(1) if len(axes) == 2 else None
        total = 0.0
        for mv in row_marginals:
            total += mv.value
        grand_total = MeasureValue(agg_measure, total)

    return ResultSet(
        spec=spec,
        measure_type=agg_measure,
        axes=axes,
        cells=cells,
        row_marginals=row_marginals,
        column_marginals=column_marginals,
        grand_total=grand_total,
        axis_features=tuple(spec.groupers),
    )


def marginal_series(resultset: ResultSet, axis_index: int) -> SeriesView:
    """Ordered series of marginal sums along the chosen axis (SUM only)."""
    if resultset.spec.aggregate != "SUM":
        raise MarginalsUndefinedError(
            f"marginals undefined for aggregate {resultset.spec.aggregate}"
        )
    if axis_index not in range(len(resultset.axes)):
        raise QueryError(f"no axis {axis_index} in this result set")
    marginals = resultset.marginals(axis_index)
    characters = resultset.axes[axis_index]
    return SeriesView(
        axis_feature=resultset.axis_features[axis_index],
        measure_type=resultset.measure_type,
        axis_characters=characters,
        points=tuple(
            (character, mv.value) for character, mv in zip(characters, marginals)
        ),
    )


def slice_series(
    resultset: ResultSet, fixed_axis: int, fixed_character: Character
) -> SeriesView:
    """The row/column of cells for one character, ordered along the other axis.

    Absent cells are omitted from the points (absent, not zero).
    """
    if len(resultset.axes) != 2:
        raise GrouperArityError("slice_series requires a 2-grouper result set")
    if fixed_axis not in (0, 1):
        raise QueryError(f"no axis {fixed_axis} in this result set")
    if fixed_character not in resultset.axes[fixed_axis]:
        raise CharacterNotOnAxisError(
            f"character {fixed_character.id!r} is not on axis {fixed_axis}"
        )
    other_axis = 1 - fixed_axis
    points = []
    for character in resultset.axes[other_axis]:
        key = (
            (fixed_character, character)
            if fixed_axis == 0
            else (character, fixed_character)
        )
        cell = resultset.cells.get(key)
        if cell is not None:
            points.append((character, cell.value))
    return SeriesView(
        axis_feature=resultset.axis_features[other_axis],
        measure_type=resultset.measure_type,
        axis_characters=resultset.axes[other_axis],
        points=tuple(points),
    )
