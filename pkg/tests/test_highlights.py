import json

import pytest
from hypothesis import given, strategies as st

from datahighlights.core import Character, CharacterType, MeasureType, MeasureValue, Role
from datahighlights.detectors import run_all
from datahighlights.errors import InvalidHighlightError
from datahighlights.highlights import (
    ALGORITHM_MODEL_TYPES,
    HIGHLIGHT_TYPE_ALGORITHMS,
    MODEL_TYPES,
    Diagnostic,
    ElementaryHighlight,
    HighlightCharacter,
    HolisticHighlight,
    Provenance,
    ScoreTypeRegistry,
    deserialize_highlights,
    serialize_highlights,
    validate_highlight,
)

REGISTRY = ScoreTypeRegistry.default()

CITY = CharacterType("City")
MONTH = CharacterType("Month", is_temporal=True)
ATHENS = Character(CITY, "Athens", "Athens")
MAY = Character(MONTH, "2023-05-01", "May 2023", order_value=5.0)
SALES = MeasureType("Sales", "kEUR")


def dominance_highlight(**overrides):
    detail = ElementaryHighlight(
        highlight_type="Dominance",
        character_set=(HighlightCharacter(Role("dominator", "dominating"), ATHENS),),
        measure_value=MeasureValue(SALES, 2100.0),
        model="Full domination",
        score_type="percentage of dominated peers",
        score=1.0,
    )
    base = dict(
        highlight_type="Dominance",
        model_type="domination",
        model="Full domination",
        actual_algorithm="Pairwise slice comparison",
        score_type="percentage of dominated peers",
        score=1.0,
        measure_role=Role("main measure"),
        measure_type=SALES,
        supportive_explanators=((Role("comparison axis", "compared across"), "Month"),),
        details=(detail,),
        provenance=Provenance("qd", "dd", None),
    )
    base.update(overrides)
    return HolisticHighlight(**base)


class TestValidateHighlight:
    def test_reference_dominance_highlight_is_valid(self):
        assert validate_highlight(dominance_highlight(), REGISTRY) == []

    def test_p_value_out_of_range(self):
        h = dominance_highlight(score_type="p-value", score=1.5)
        report = validate_highlight(h, REGISTRY)
        assert any("score out of range" in v for v in report)

    def test_duplicate_character_types_in_detail(self):
        detail = ElementaryHighlight(
            highlight_type="Dominance",
            character_set=(
                HighlightCharacter(Role("dominator"), ATHENS),
                HighlightCharacter(Role("runner-up"), Character(CITY, "Rhodes", "Rhodes")),
            ),
            measure_value=MeasureValue(SALES, 1.0),
            model="Full domination",
            score_type="percentage of dominated peers",
            score=1.0,
        )
        report = validate_highlight(dominance_highlight(details=(detail,)), REGISTRY)
        assert any("duplicate character type" in v for v in report)

    def test_algorithm_not_in_candidate_set(self):
        h = dominance_highlight(actual_algorithm="Mann-Kendall", model_type="trend direction")
        report = validate_highlight(h, REGISTRY)
        assert any("not a candidate" in v for v in report)

    def test_model_outside_domain(self):
        h = dominance_highlight(model="Total victory")
        report = validate_highlight(h, REGISTRY)
        assert any("outside domain" in v for v in report)

    def test_algorithm_determines_model_type(self):
        h = dominance_highlight(model_type="modality", model="Unimodal")
        report = validate_highlight(h, REGISTRY)
        assert any("determines model type" in v for v in report)

    def test_detail_model_must_match_parent(self):
        detail = dominance_highlight().details[0]
        h = dominance_highlight(
            details=(
                ElementaryHighlight(
                    highlight_type=detail.highlight_type,
                    character_set=detail.character_set,
                    measure_value=detail.measure_value,
                    model="Partial domination",
                    score_type=detail.score_type,
                    score=detail.score,
                ),
            )
        )
        assert any(
            "differs from parent" in v for v in validate_highlight(h, REGISTRY)
        )

    def test_duplicate_character_sets_across_details(self):
        detail = dominance_highlight().details[0]
        h = dominance_highlight(details=(detail, detail))
        assert any(
            "uniquely identify" in v for v in validate_highlight(h, REGISTRY)
        )

    def test_parameterized_models_admitted(self):
        assert MODEL_TYPES["seasonal pattern"].admits("Seasonal(lag=12)")
        assert not MODEL_TYPES["seasonal pattern"].admits("Seasonal(lag=)")
        assert MODEL_TYPES["rank membership"].admits("Top-k(k=3)")


class TestTypeRegistries:
    def test_algorithm_to_model_type_is_functional(self):
        # one model type per algorithm, and every candidate algorithm mapped
        for highlight_type, algorithms in HIGHLIGHT_TYPE_ALGORITHMS.items():
            for algorithm in algorithms:
                assert algorithm in ALGORITHM_MODEL_TYPES, (highlight_type, algorithm)
                assert ALGORITHM_MODEL_TYPES[algorithm] in MODEL_TYPES

    def test_score_registry_knows_every_builtin_type(self):
        for name in (
            "p-value",
            "Kendall tau",
            "rank",
            "share of total",
            "percentage of dominated peers",
            "peak-to-mean ratio",
            "autocorrelation",
            "top-k size",
        ):
            assert REGISTRY.get(name) is not None


class TestSerialization:
    def test_empty_document(self):
        assert (
            serialize_highlights([])
            == '{"schemaVersion":"1.0","highlights":[],"diagnostics":[]}'
        )

    def test_shape_of_dominance_document(self):
        text = serialize_highlights([dominance_highlight()])
        document = json.loads(text)
        h = document["highlights"][0]
        assert h["kind"] == "holistic"
        assert list(h.keys()) == [
            "kind",
            "type",
            "algorithm",
            "modelType",
            "model",
            "scoreType",
            "score",
            "measure",
            "supportiveExplanators",
            "details",
            "provenance",
        ]
        assert h["measure"] == {"role": "main measure", "name": "Sales", "unit": "kEUR"}
        detail = h["details"][0]
        assert list(detail.keys()) == [
            "kind",
            "type",
            "characters",
            "measureValue",
            "scoreType",
            "score",
        ]
        assert detail["characters"][0]["id"] == "Athens"

    def test_mega_contributor_document_values(self, sales_dataset, sales_resultset):
        highlights, diagnostics = run_all(sales_dataset, sales_resultset)
        document = json.loads(serialize_highlights(highlights, diagnostics))
        mega_city = [
            h
            for h in document["highlights"]
            if h["type"] == "Mega-contributor"
            and h["details"]
            and h["details"][0]["characters"][0]["id"] == "Athens"
        ]
        assert len(mega_city) == 1
        assert mega_city[0]["score"] == 0.75
        assert mega_city[0]["details"][0]["score"] == 0.75

    def test_invalid_highlight_rejected(self):
        bad = dominance_highlight(score=2.0)
        with pytest.raises(InvalidHighlightError):
            serialize_highlights([bad])

    def test_round_trip_on_pipeline_output(self, sales_dataset, sales_resultset):
        highlights, diagnostics = run_all(sales_dataset, sales_resultset)
        text = serialize_highlights(highlights, diagnostics)
        parsed_h, parsed_d = deserialize_highlights(text)
        assert parsed_h == highlights
        assert parsed_d == diagnostics
        assert serialize_highlights(parsed_h, parsed_d) == text

    def test_deterministic_bytes(self):
        a = serialize_highlights([dominance_highlight()], [Diagnostic("d", "t", "r")])
        b = serialize_highlights([dominance_highlight()], [Diagnostic("d", "t", "r")])
        assert a == b


# ---------------------------------------------------------------------------
# randomized round-trip property
# ---------------------------------------------------------------------------

_SAFE_TEXT = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"), max_codepoint=0x7F),
    min_size=1,
    max_size=8,
)


@st.composite
def arbitrary_highlights(draw):
    highlight_type = draw(st.sampled_from(sorted(HIGHLIGHT_TYPE_ALGORITHMS)))
    algorithm = draw(st.sampled_from(HIGHLIGHT_TYPE_ALGORITHMS[highlight_type]))
    model_type_name = ALGORITHM_MODEL_TYPES[algorithm]
    model_type = MODEL_TYPES[model_type_name]
    if model_type.members:
        model = draw(st.sampled_from(model_type.members))
    else:
        model = f"Top-k(k={draw(st.integers(1, 9))})"
    measure = MeasureType(draw(_SAFE_TEXT), draw(_SAFE_TEXT))
    score_type, lo, hi = draw(
        st.sampled_from(
            [("p-value", 0.0, 1.0), ("rank", 1.0, 9.0), ("share of total", 0.0, 1.0)]
        )
    )
    details = []
    used_ids = draw(st.lists(_SAFE_TEXT, unique=True, max_size=3))
    for char_id in used_ids:
        character = Character(CITY, char_id, draw(_SAFE_TEXT))
        details.append(
            ElementaryHighlight(
                highlight_type=highlight_type,
                character_set=(
                    HighlightCharacter(Role(draw(_SAFE_TEXT), draw(_SAFE_TEXT)), character),
                ),
                measure_value=MeasureValue(
                    measure, draw(st.floats(-1e6, 1e6, allow_nan=False))
                ),
                model=model,
                score_type=score_type,
                score=draw(st.floats(lo, hi, allow_nan=False)),
            )
        )
    return HolisticHighlight(
        highlight_type=highlight_type,
        model_type=model_type_name,
        model=model,
        actual_algorithm=algorithm,
        score_type=score_type,
        score=draw(st.floats(lo, hi, allow_nan=False)),
        measure_role=Role(draw(_SAFE_TEXT)),
        measure_type=measure,
        supportive_explanators=tuple(
            (Role(draw(_SAFE_TEXT), draw(_SAFE_TEXT)), draw(_SAFE_TEXT))
            for _ in range(draw(st.integers(0, 2)))
        ),
        details=tuple(details),
        provenance=Provenance(draw(_SAFE_TEXT), draw(_SAFE_TEXT), None),
    )


@given(st.lists(arbitrary_highlights(), max_size=4))
def test_round_trip_identity_on_arbitrary_highlights(highlights):
    text = serialize_highlights(highlights)
    parsed, _ = deserialize_highlights(text)
    assert parsed == list(highlights)
    assert serialize_highlights(parsed) == text
