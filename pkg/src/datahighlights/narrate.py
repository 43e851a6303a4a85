"""Template-based rendering of highlights into sentences and summaries.

One sentence per highlight via overridable patterns, plus a composed
summary that groups sentences around protagonist characters (characters
appearing in at least two elementary details).
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass

from .core import Character
from .errors import UnbindablePlaceholderError
from .highlights import (
    NEGATIVE_MODELS,
    ElementaryHighlight,
    HolisticHighlight,
    ScoreTypeRegistry,
)

DEFAULT_HOLISTIC_PATTERN = (
    "The {HighlightType} for {MainMeasure}, tested via {Algorithm}, "
    "{SupportiveRoles}fits under the {Model} model with {ScoreType} "
    "and value {ScoreValue}."
)

DEFAULT_ELEMENTARY_PATTERN = (
    "{CharacterSet} with {Measure} = {MeasureValue} serves as "
    "{HighlightType} with {ScoreType} = {ScoreValue}."
)


@dataclass(frozen=True)
class NarrativeTemplate:
    holistic_pattern: str = DEFAULT_HOLISTIC_PATTERN
    elementary_pattern: str = DEFAULT_ELEMENTARY_PATTERN

    @classmethod
    def from_config(cls, raw: dict | None) -> "NarrativeTemplate":
        raw = raw or {}
        return cls(
            holistic_pattern=raw.get("holistic", DEFAULT_HOLISTIC_PATTERN),
            elementary_pattern=raw.get("elementary", DEFAULT_ELEMENTARY_PATTERN),
        )


@dataclass(frozen=True)
class NarrativeOptions:
    """Summary-composition knobs.

    `character_type_order` lists character type names that should lead the
    summary; unlisted non-temporal types come next, temporal types after
    them (geography-before-time by default).
    """

    character_type_order: tuple[str, ...] = ()
    protagonist_min_mentions: int = 2
    format: str = "text"  # "text" | "markdown"

    @classmethod
    def from_config(cls, raw: dict | None) -> "NarrativeOptions":
        raw = raw or {}
        return cls(
            character_type_order=tuple(raw.get("characterTypeOrder", ())),
            protagonist_min_mentions=int(raw.get("protagonistMinMentions", 2)),
            format=raw.get("format", "text"),
        )


# ---------------------------------------------------------------------------
# number formatting
# ---------------------------------------------------------------------------


def _trim(text: str) -> str:
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text or "0"


def format_plain(value: float) -> str:
    """Integral values print as integers, others with 6 significant digits."""
    if value != value or value in (math.inf, -math.inf):
        return repr(value)
    if float(value).is_integer() and abs(value) < 1e15:
        return str(int(value))
    return _trim(f"{value:.6g}")


def _format_scientific(value: float) -> str:
    mantissa, _, exponent = f"{value:.2e}".partition("e")
    return f"{_trim(mantissa)}e{int(exponent)}"


def format_score(score_type: str, value: float, registry: ScoreTypeRegistry) -> str:
    spec = registry.get(score_type)
    render = spec.render if spec else "plain"
    if render == "percent":
        return _trim(f"{value * 100.0:.2f}") + "%"
    if render == "integer":
        return str(int(round(value)))
    if render == "p-value" and 0.0 < value < 1e-3:
        return _format_scientific(value)
    return format_plain(value)


# ---------------------------------------------------------------------------
# sentence rendering
# ---------------------------------------------------------------------------

_FORMATTER = string.Formatter()


def _fill(pattern: str, bindings: dict) -> str:
    for _, name, _, _ in _FORMATTER.parse(pattern):
        if name is not None and name not in bindings:
            raise UnbindablePlaceholderError(f"no binding for placeholder {name!r}")
    sentence = pattern.format_map(bindings)
    if "{" in sentence or "}" in sentence:
        raise UnbindablePlaceholderError(f"unresolved placeholder in: {sentence}")
    return sentence


def render_holistic(
    highlight: HolisticHighlight,
    template: NarrativeTemplate | None = None,
    registry: ScoreTypeRegistry | None = None,
) -> str:
    """One sentence for a holistic highlight.

    Supportive roles expand to '; '-joined "roleText featureName" fragments
    followed by ', '; with no roles the segment vanishes entirely.
    """
    template = template or NarrativeTemplate()
    registry = registry or ScoreTypeRegistry.default()
    fragments = [
        f"{role.description or role.name} {feature}"
        for role, feature in highlight.supportive_explanators
    ]
    supportive = "; ".join(fragments) + ", " if fragments else ""
    bindings = {
        "HighlightType": highlight.highlight_type,
        "MainMeasure": highlight.measure_type.name,
        "Algorithm": highlight.actual_algorithm,
        "SupportiveRoles": supportive,
        "Model": highlight.model,
        "ScoreType": highlight.score_type,
        "ScoreValue": format_score(highlight.score_type, highlight.score, registry),
    }
    return _fill(template.holistic_pattern, bindings)


def render_elementary(
    detail: ElementaryHighlight,
    template: NarrativeTemplate | None = None,
    registry: ScoreTypeRegistry | None = None,
) -> str:
    """One sentence for an elementary highlight; the character set renders
    as "(desc1, desc2)"."""
    template = template or NarrativeTemplate()
    registry = registry or ScoreTypeRegistry.default()
    character_set = (
        "(" + ", ".join(hc.character.description for hc in detail.character_set) + ")"
    )
    bindings = {
        "CharacterSet": character_set,
        "Measure": detail.measure_value.measure_type.name,
        "MeasureValue": format_plain(detail.measure_value.value),
        "HighlightType": detail.highlight_type,
        "ScoreType": detail.score_type,
        "ScoreValue": format_score(detail.score_type, detail.score, registry),
    }
    return _fill(template.elementary_pattern, bindings)


# ---------------------------------------------------------------------------
# summary composition
# ---------------------------------------------------------------------------

EMPTY_SUMMARY = "No noteworthy highlights were detected."


def _type_rank(character: Character, options: NarrativeOptions) -> tuple:
    type_name = character.character_type.name
    if type_name in options.character_type_order:
        return (0, options.character_type_order.index(type_name))
    if character.character_type.is_temporal:
        return (2, 0)
    return (1, 0)


def compose_summary(
    highlights,
    registry: ScoreTypeRegistry | None = None,
    template: NarrativeTemplate | None = None,
    options: NarrativeOptions | None = None,
) -> str:
    """Compose the full narrative: protagonist groups first (each highlight
    rendered exactly once), then ungrouped positives, negatives last."""
    registry = registry or ScoreTypeRegistry.default()
    template = template or NarrativeTemplate()
    options = options or NarrativeOptions()

    if not highlights:
        return EMPTY_SUMMARY

    mentions: dict[Character, int] = {}
    for highlight in highlights:
        for detail in highlight.details:
            for hc in detail.character_set:
                mentions[hc.character] = mentions.get(hc.character, 0) + 1

    protagonists = [
        c
        for c, count in mentions.items()
        if count >= options.protagonist_min_mentions
    ]
    protagonists.sort(
        key=lambda c: (
            _type_rank(c, options),
            -mentions[c],
            c.description,
            c.id,
        )
    )

    def protagonist_of(highlight: HolisticHighlight) -> Character | None:
        for candidate in protagonists:
            for detail in highlight.details:
                if any(hc.character == candidate for hc in detail.character_set):
                    return candidate
        return None

    groups: dict[Character, list[HolisticHighlight]] = {c: [] for c in protagonists}
    ungrouped: list[HolisticHighlight] = []
    negatives: list[HolisticHighlight] = []
    for highlight in highlights:
        if highlight.model in NEGATIVE_MODELS:
            negatives.append(highlight)
            continue
        owner = protagonist_of(highlight)
        if owner is None:
            ungrouped.append(highlight)
        else:
            groups[owner].append(highlight)

    def sentences_for(highlight: HolisticHighlight) -> list[str]:
        out = [render_holistic(highlight, template, registry)]
        out.extend(
            render_elementary(detail, template, registry)
            for detail in highlight.details
        )
        return out

    markdown = options.format == "markdown"
    blocks: list[str] = []
    grouped_any = any(groups.values())
    for character in protagonists:
        assigned = groups[character]
        if not assigned:
            continue
        sentences = [s for h in assigned for s in sentences_for(h)]
        header = f"In terms of {character.character_type.name}, {character.description} takes the lead."
        if markdown:
            blocks.append(
                f"## {character.description} ({character.character_type.name})\n"
                + "\n".join(f"- {s}" for s in sentences)
            )
        else:
            blocks.append(header + " " + " ".join(sentences))

    leftovers = ungrouped + negatives
    if leftovers:
        sentences = [s for h in leftovers for s in sentences_for(h)]
        if markdown:
            title = "## Other findings\n" if grouped_any else ""
            blocks.append(title + "\n".join(f"- {s}" for s in sentences))
        else:
            blocks.append(" ".join(sentences))

    return "\n\n".join(blocks) if markdown else " ".join(blocks)
