"""Structured highlight records and their JSON form.

A holistic highlight is a dataset-level testimony (type, algorithm, model,
score, main measure, supportive explanators); its details are elementary
highlights that tie specific characters and measure values to the finding.
Serialization is deterministic: stable key order, stable list order,
floats in shortest round-trip form.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace

from .core import Character, CharacterType, MeasureType, MeasureValue, Role
from .errors import InvalidHighlightError

SCHEMA_VERSION = "1.0"

# Models that testify to the *absence* of a pattern; the narrator appends
# them last and `emitNegative: false` suppresses them entirely.
NEGATIVE_MODELS = frozenset(
    {"No trend", "Not seasonal", "Balanced contribution", "Insignificant", "Unclassified"}
)


@dataclass(frozen=True)
class ModelType:
    """The domain of results an archetype-property test can produce."""

    name: str
    members: tuple[str, ...] = ()
    patterns: tuple[str, ...] = ()

    def admits(self, model: str) -> bool:
        if model in self.members:
            return True
        return any(re.fullmatch(pattern, model) for pattern in self.patterns)


MODEL_TYPES = {
    mt.name: mt
    for mt in (
        ModelType("distribution fit", members=("Normal", "Uniform", "Unclassified")),
        ModelType(
            "correlation significance",
            members=(
                "Positively Significant",
                "Moderately Positively Significant",
                "Insignificant",
                "Moderately Negatively Significant",
                "Negatively Significant",
            ),
        ),
        ModelType("trend direction", members=("Increasing", "Decreasing", "No trend")),
        ModelType(
            "seasonal pattern",
            members=("Not seasonal",),
            patterns=(r"Seasonal\(lag=\d+\)",),
        ),
        ModelType("modality", members=("Unimodal", "Bimodal", "Multimodal")),
        ModelType("rank membership", patterns=(r"Top-k\(k=\d+\)",)),
        ModelType(
            "contribution balance",
            members=("Mega-contributor present", "Balanced contribution"),
        ),
        ModelType("domination", members=("Full domination", "Partial domination")),
    )
}

# actual algorithm -> model type (a function: one model type per algorithm)
ALGORITHM_MODEL_TYPES = {
    "Shapiro-Wilk": "distribution fit",
    "Kolmogorov-Smirnov": "distribution fit",
    "Kendall": "correlation significance",
    "Pearson": "correlation significance",
    "Spearman": "correlation significance",
    "Mann-Kendall": "trend direction",
    "Autocorrelation scan": "seasonal pattern",
    "Local maxima scan": "modality",
    "Descending sort": "rank membership",
    "Marginal share": "contribution balance",
    "Pairwise slice comparison": "domination",
}

# highlight type -> candidate algorithm set
HIGHLIGHT_TYPE_ALGORITHMS = {
    "Distribution": ("Shapiro-Wilk", "Kolmogorov-Smirnov"),
    "Correlation": ("Kendall", "Pearson", "Spearman"),
    "Trend": ("Mann-Kendall",),
    "Seasonality": ("Autocorrelation scan",),
    "Modality": ("Local maxima scan",),
    "Top-k": ("Descending sort",),
    "Mega-contributor": ("Marginal share",),
    "Dominance": ("Pairwise slice comparison",),
}


@dataclass(frozen=True)
class ScoreTypeSpec:
    """Range and orientation of one score domain, plus a rendering hint."""

    name: str
    lower: float
    upper: float
    orientation: str  # "higher-is-stronger" | "lower-is-stronger"
    render: str = "plain"  # "plain" | "percent" | "p-value" | "integer"


class ScoreTypeRegistry:
    def __init__(self):
        self._specs: dict[str, ScoreTypeSpec] = {}

    def register(self, spec: ScoreTypeSpec):
        self._specs[spec.name] = spec

    def get(self, name: str) -> ScoreTypeSpec | None:
        return self._specs.get(name)

    def check(self, name: str, score: float) -> str | None:
        """Returns a violation message or None when the score conforms."""
        spec = self._specs.get(name)
        if spec is None:
            return f"score type {name!r} is not registered"
        if not math.isfinite(score):
            return f"score for {name!r} is not finite"
        if not (spec.lower <= score <= spec.upper):
            return (
                f"score out of range: {score} outside "
                f"[{spec.lower}, {spec.upper}] for {name!r}"
            )
        return None

    @classmethod
    def default(cls) -> "ScoreTypeRegistry":
        registry = cls()
        for spec in (
            ScoreTypeSpec("p-value", 0.0, 1.0, "lower-is-stronger", render="p-value"),
            ScoreTypeSpec("Kendall tau", -1.0, 1.0, "higher-is-stronger"),
            ScoreTypeSpec("Pearson r", -1.0, 1.0, "higher-is-stronger"),
            ScoreTypeSpec("Spearman rho", -1.0, 1.0, "higher-is-stronger"),
            ScoreTypeSpec("autocorrelation", -1.0, 1.0, "higher-is-stronger"),
            ScoreTypeSpec("peak-to-mean ratio", 0.0, math.inf, "higher-is-stronger"),
            ScoreTypeSpec("rank", 1.0, math.inf, "lower-is-stronger", render="integer"),
            ScoreTypeSpec("share of total", 0.0, 1.0, "higher-is-stronger", render="percent"),
            ScoreTypeSpec(
                "percentage of dominated peers",
                0.0,
                1.0,
                "higher-is-stronger",
                render="percent",
            ),
            ScoreTypeSpec("top-k size", 1.0, math.inf, "higher-is-stronger", render="integer"),
        ):
            registry.register(spec)
        return registry


@dataclass(frozen=True)
class HighlightCharacter:
    role: Role
    character: Character


@dataclass(frozen=True)
class ElementaryHighlight:
    highlight_type: str
    character_set: tuple[HighlightCharacter, ...]
    measure_value: MeasureValue
    model: str  # the parent's model
    score_type: str
    score: float


@dataclass(frozen=True)
class Provenance:
    query_digest: str = ""
    dataset_digest: str = ""
    timestamp: str | None = None


@dataclass(frozen=True)
class HolisticHighlight:
    highlight_type: str
    model_type: str
    model: str
    actual_algorithm: str
    score_type: str
    score: float
    measure_role: Role
    measure_type: MeasureType
    supportive_explanators: tuple[tuple[Role, str], ...] = ()
    details: tuple[ElementaryHighlight, ...] = ()
    provenance: Provenance = field(default_factory=Provenance)


def validate_highlight(
    highlight: HolisticHighlight, registry: ScoreTypeRegistry
) -> list[str]:
    """Check a holistic highlight (and its details) against the model rules.

    Empty list means valid.
    """
    violations: list[str] = []
    prefix = f"[{highlight.highlight_type}/{highlight.model}] "

    candidates = HIGHLIGHT_TYPE_ALGORITHMS.get(highlight.highlight_type)
    if candidates is None:
        violations.append(prefix + f"unknown highlight type {highlight.highlight_type!r}")
    elif highlight.actual_algorithm not in candidates:
        violations.append(
            prefix
            + f"algorithm {highlight.actual_algorithm!r} is not a candidate for "
            + f"{highlight.highlight_type!r}"
        )

    model_type = MODEL_TYPES.get(highlight.model_type)
    if model_type is None:
        violations.append(prefix + f"unknown model type {highlight.model_type!r}")
    else:
        if not model_type.admits(highlight.model):
            violations.append(
                prefix + f"model {highlight.model!r} outside domain of {model_type.name!r}"
            )
    expected_model_type = ALGORITHM_MODEL_TYPES.get(highlight.actual_algorithm)
    if expected_model_type is not None and expected_model_type != highlight.model_type:
        violations.append(
            prefix
            + f"algorithm {highlight.actual_algorithm!r} determines model type "
            + f"{expected_model_type!r}, not {highlight.model_type!r}"
        )

    score_violation = registry.check(highlight.score_type, highlight.score)
    if score_violation:
        violations.append(prefix + score_violation)

    for role, feature_name in highlight.supportive_explanators:
        if not role.name:
            violations.append(prefix + "supportive explanator with empty role name")
        if not feature_name:
            violations.append(prefix + "supportive explanator with empty feature")

    seen_character_sets = set()
    for detail in highlight.details:
        if not detail.character_set:
            violations.append(prefix + "detail with empty character set")
            continue
        if detail.model != highlight.model:
            violations.append(
                prefix + f"detail model {detail.model!r} differs from parent model"
            )
        type_names = [c.character.character_type.name for c in detail.character_set]
        if len(set(type_names)) != len(type_names):
            violations.append(
                prefix
                + "duplicate character type in one detail: "
                + ", ".join(sorted(type_names))
            )
        for hc in detail.character_set:
            if not hc.role.name:
                violations.append(prefix + "highlight character with empty role name")
        key = tuple(
            (c.character.character_type.name, c.character.id)
            for c in detail.character_set
        )
        if key in seen_character_sets:
            violations.append(
                prefix + f"character set {key} does not uniquely identify its detail"
            )
        seen_character_sets.add(key)
        if not math.isfinite(detail.measure_value.value):
            violations.append(prefix + "detail measure value is not finite")
        detail_violation = registry.check(detail.score_type, detail.score)
        if detail_violation:
            violations.append(prefix + detail_violation)

    return violations


@dataclass(frozen=True)
class Diagnostic:
    """A detector that could not run (or chose not to) says why."""

    detector: str
    target: str
    reason: str


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _holistic_to_dict(h: HolisticHighlight) -> dict:
    return {
        "kind": "holistic",
        "type": h.highlight_type,
        "algorithm": h.actual_algorithm,
        "modelType": h.model_type,
        "model": h.model,
        "scoreType": h.score_type,
        "score": h.score,
        "measure": {
            "role": h.measure_role.name,
            "name": h.measure_type.name,
            "unit": h.measure_type.unit,
        },
        "supportiveExplanators": [
            {"role": role.name, "text": role.description, "feature": feature}
            for role, feature in h.supportive_explanators
        ],
        "details": [
            {
                "kind": "elementary",
                "type": d.highlight_type,
                "characters": [
                    {
                        "role": hc.role.name,
                        "text": hc.role.description,
                        "characterType": hc.character.character_type.name,
                        "id": hc.character.id,
                        "description": hc.character.description,
                    }
                    for hc in d.character_set
                ],
                "measureValue": d.measure_value.value,
                "scoreType": d.score_type,
                "score": d.score,
            }
            for d in h.details
        ],
        "provenance": {
            "querySpecDigest": h.provenance.query_digest,
            "datasetDigest": h.provenance.dataset_digest,
            "timestamp": h.provenance.timestamp,
        },
    }


def serialize_highlights(
    highlights,
    diagnostics=(),
    registry: ScoreTypeRegistry | None = None,
) -> str:
    """Render highlights as the canonical JSON document (a string).

    All highlights must validate; InvalidHighlightError otherwise. Equal
    inputs produce byte-identical documents.
    """
    registry = registry or ScoreTypeRegistry.default()
    for highlight in highlights:
        violations = validate_highlight(highlight, registry)
        if violations:
            raise InvalidHighlightError(violations)
    document = {
        "schemaVersion": SCHEMA_VERSION,
        "highlights": [_holistic_to_dict(h) for h in highlights],
        "diagnostics": [
            {"detector": d.detector, "target": d.target, "reason": d.reason}
            for d in diagnostics
        ],
    }
    return json.dumps(document, separators=(",", ":"), ensure_ascii=True)


def _character_from_dict(raw: dict) -> HighlightCharacter:
    return HighlightCharacter(
        role=Role(raw["role"], raw.get("text", "")),
        character=Character(
            character_type=CharacterType(name=raw["characterType"]),
            id=raw["id"],
            description=raw.get("description", raw["id"]),
        ),
    )


def deserialize_highlights(text: str):
    """Parse the JSON document back into (highlights, diagnostics)."""
    document = json.loads(text)
    highlights = []
    for raw in document.get("highlights", []):
        measure = MeasureType(name=raw["measure"]["name"], unit=raw["measure"].get("unit", ""))
        details = tuple(
            ElementaryHighlight(
                highlight_type=d["type"],
                character_set=tuple(_character_from_dict(c) for c in d["characters"]),
                measure_value=MeasureValue(measure, float(d["measureValue"])),
                model=raw["model"],
                score_type=d["scoreType"],
                score=float(d["score"]),
            )
            for d in raw.get("details", [])
        )
        prov = raw.get("provenance", {})
        highlights.append(
            HolisticHighlight(
                highlight_type=raw["type"],
                model_type=raw["modelType"],
                model=raw["model"],
                actual_algorithm=raw["algorithm"],
                score_type=raw["scoreType"],
                score=float(raw["score"]),
                measure_role=Role(raw["measure"]["role"], ""),
                measure_type=measure,
                supportive_explanators=tuple(
                    (Role(e["role"], e.get("text", "")), e["feature"])
                    for e in raw.get("supportiveExplanators", [])
                ),
                details=details,
                provenance=Provenance(
                    query_digest=prov.get("querySpecDigest", ""),
                    dataset_digest=prov.get("datasetDigest", ""),
                    timestamp=prov.get("timestamp"),
                ),
            )
        )
    diagnostics = [
        Diagnostic(d["detector"], d.get("target", ""), d.get("reason", ""))
        for d in document.get("diagnostics", [])
    ]
    return highlights, diagnostics


def strip_timestamps(highlights):
    """Copies with the provenance timestamp cleared (for determinism checks)."""
    return [
        replace(h, provenance=replace(h.provenance, timestamp=None)) for h in highlights
    ]
