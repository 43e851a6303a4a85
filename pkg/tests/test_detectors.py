import random

import numpy as np
import pytest

from datahighlights.core import (
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
)
from datahighlights.detectors import (
    ALL_DETECTORS,
    DetectorConfig,
    detect_correlation,
    detect_distribution,
    detect_dominance,
    detect_mega_contributors,
    detect_modality,
    detect_seasonality,
    detect_topk,
    detect_trend,
    run_all,
)
from datahighlights.highlights import (
    ScoreTypeRegistry,
    serialize_highlights,
    validate_highlight,
)
from datahighlights.query import GroupBySpec, SeriesView, execute_groupby

CFG = DetectorConfig()
REGISTRY = ScoreTypeRegistry.default()


def make_series(values, sparse_tail=0):
    """Dense (or deliberately sparse) series over a temporal axis."""
    ctype = CharacterType("M", is_temporal=True)
    chars = tuple(
        Character(ctype, f"m{i:02d}", f"M{i:02d}", order_value=float(i))
        for i in range(len(values) + sparse_tail)
    )
    measure = MeasureType(
        "Sales", "kEUR", kind=MeasureKind.AGGREGATE, aggregate_function="SUM"
    )
    return SeriesView(
        axis_feature="month",
        measure_type=measure,
        axis_characters=chars,
        points=tuple(zip(chars, [float(v) for v in values])),
    )


def grid_dataset(grid):
    """grid[r][c] -> value or None (absent). Rows are temporal characters."""
    registry = CharacterRegistry()
    row_type = registry.register_type(CharacterType("R", is_temporal=True))
    col_type = registry.register_type(CharacterType("K"))
    registry.bind_feature("row", "R")
    registry.bind_feature("col", "K")
    facts = []
    from datahighlights.core import TimePoint

    for r, row in enumerate(grid):
        row_id = f"r{r:02d}"
        registry.register(Character(row_type, row_id, row_id, order_value=float(r)))
        for c, value in enumerate(row):
            col_id = f"k{c:02d}"
            registry.register(Character(col_type, col_id, col_id))
            if value is None:
                continue
            facts.append(
                Fact(
                    {
                        "row": TimePoint(float(r), row_id),
                        "col": col_id,
                        "value": float(value),
                    }
                )
            )
    registry.freeze()
    schema = Schema(
        "grid",
        (
            Feature("row", FeatureKind.DATETIME),
            Feature("col", FeatureKind.IDENTIFIER),
            Feature("value", FeatureKind.NUMERIC),
        ),
    )
    return Dataset(
        schema=schema,
        facts=tuple(facts),
        measures=(MeasureType("value"),),
        characters=registry,
    )


def grid_resultset(grid):
    dataset = grid_dataset(grid)
    spec = GroupBySpec(
        filters=(), groupers=("row", "col"), measure="value", aggregate="SUM"
    )
    return execute_groupby(dataset, spec)


def assert_valid(highlight):
    assert validate_highlight(highlight, REGISTRY) == []


class TestDetectDistribution:
    def test_bell_shaped_sample_reads_normal(self):
        rng = np.random.default_rng(2)
        values = rng.normal(100.0, 15.0, 200).tolist()
        highlight = detect_distribution(values, MeasureType("Sales"), CFG)
        assert highlight.model == "Normal"
        assert highlight.actual_algorithm == "Shapiro-Wilk"
        assert highlight.score > CFG.alpha
        assert_valid(highlight)

    def test_grid_reads_uniform(self):
        values = np.linspace(0.0, 1.0, 100).tolist()
        highlight = detect_distribution(values, MeasureType("x"), CFG)
        assert highlight.model == "Uniform"
        assert highlight.actual_algorithm == "Kolmogorov-Smirnov"
        assert_valid(highlight)

    def test_insufficient_data_skips(self):
        diagnostics = []
        assert (
            detect_distribution([1.0, 2.0], MeasureType("x"), CFG, diagnostics=diagnostics)
            is None
        )
        assert "insufficient data" in diagnostics[0].reason

    def test_unclassified_is_negative_but_emitted(self):
        rng = np.random.default_rng(5)
        values = np.concatenate(
            [rng.normal(0, 0.05, 100), rng.normal(10, 0.05, 100)]
        ).tolist()
        highlight = detect_distribution(values, MeasureType("x"), CFG)
        assert highlight.model == "Unclassified"
        assert_valid(highlight)

    def test_emit_negative_off_suppresses_unclassified(self):
        rng = np.random.default_rng(5)
        values = np.concatenate(
            [rng.normal(0, 0.05, 100), rng.normal(10, 0.05, 100)]
        ).tolist()
        cfg = DetectorConfig(emit_negative=False)
        assert detect_distribution(values, MeasureType("x"), cfg) is None


class TestDetectCorrelation:
    def test_identity_is_positively_significant(self):
        x = [1.0, 2.0, 5.0, 7.0, 11.0]
        highlight = detect_correlation(x, x, (MeasureType("a"), MeasureType("b")), CFG)
        assert highlight.model == "Positively Significant"
        assert highlight.score == 1.0
        assert highlight.actual_algorithm == "Kendall"
        assert highlight.score_type == "Kendall tau"
        assert highlight.supportive_explanators[0][1] == "b"
        assert_valid(highlight)

    def test_exact_minus_half_is_moderately_negative(self):
        x = list(range(1, 9))
        y = [1, 8, 7, 6, 5, 4, 3, 2]  # brute-force tau = -0.5 exactly
        highlight = detect_correlation(x, y, (MeasureType("a"), MeasureType("b")), CFG)
        assert highlight.score == -0.5
        assert highlight.model == "Moderately Negatively Significant"
        assert_valid(highlight)

    def test_insignificant_suppressed_when_negative_off(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        y = [3.0, 1.0, 4.0, 1.0, 5.0, 2.0]
        cfg = DetectorConfig(emit_negative=False)
        highlight = detect_correlation(x, y, (MeasureType("a"), MeasureType("b")), cfg)
        assert highlight is None or highlight.model != "Insignificant"

    def test_kernel_error_becomes_diagnostic(self):
        diagnostics = []
        out = detect_correlation(
            [1.0, 1.0, 1.0],
            [1.0, 2.0, 3.0],
            (MeasureType("a"), MeasureType("b")),
            CFG,
            diagnostics=diagnostics,
        )
        assert out is None
        assert diagnostics and diagnostics[0].detector == "correlation"

    def test_pearson_variant(self):
        cfg = DetectorConfig(correlation_algorithm="Pearson")
        x = [1.0, 2.0, 3.0, 4.0]
        y = [2.1, 3.9, 6.2, 8.0]
        highlight = detect_correlation(x, y, (MeasureType("a"), MeasureType("b")), cfg)
        assert highlight.actual_algorithm == "Pearson"
        assert highlight.score_type == "Pearson r"
        assert_valid(highlight)


class TestDetectTrend:
    def test_reference_marginals_have_no_trend(self):
        highlight = detect_trend(make_series([715, 1280, 805]), CFG)
        assert highlight.model == "No trend"
        assert highlight.score == 1.0
        assert_valid(highlight)

    def test_increasing_series(self):
        highlight = detect_trend(make_series(range(10)), CFG)
        assert highlight.model == "Increasing"
        assert_valid(highlight)

    def test_decreasing_series(self):
        highlight = detect_trend(make_series(range(10, 0, -1)), CFG)
        assert highlight.model == "Decreasing"

    def test_sparse_series_skipped(self):
        diagnostics = []
        assert detect_trend(make_series([1, 2, 3], sparse_tail=2), CFG, diagnostics=diagnostics) is None
        assert "sparse" in diagnostics[0].reason


class TestDetectSeasonality:
    def test_perfect_period_two(self):
        highlight = detect_seasonality(make_series([1, 5, 1, 5, 1, 5]), CFG)
        assert highlight.model == "Seasonal(lag=2)"
        assert highlight.score == 1.0
        assert_valid(highlight)

    def test_short_series_skipped(self):
        diagnostics = []
        assert detect_seasonality(make_series([715, 1280, 805]), CFG, diagnostics=diagnostics) is None
        assert "insufficient data" in diagnostics[0].reason

    def test_constant_series_skipped_not_reported(self):
        diagnostics = []
        assert detect_seasonality(make_series([4] * 8), CFG, diagnostics=diagnostics) is None
        assert diagnostics

    def test_aperiodic_series_not_seasonal(self):
        rng = random.Random(3)
        values = [rng.uniform(0, 1) for _ in range(12)]
        highlight = detect_seasonality(make_series(values), CFG)
        if highlight is not None:
            assert highlight.model.startswith(("Seasonal", "Not seasonal"))
            assert_valid(highlight)


class TestDetectModality:
    def test_reference_marginals_unimodal(self):
        highlight = detect_modality(make_series([715, 1280, 805]), CFG)
        assert highlight.model == "Unimodal"
        detail = highlight.details[0]
        assert detail.character_set[0].character.description == "M01"
        assert detail.measure_value.value == 1280.0
        assert highlight.score == pytest.approx(1280.0 / (2800.0 / 3.0), rel=1e-12)
        assert_valid(highlight)

    def test_two_peaks_bimodal(self):
        highlight = detect_modality(make_series([1, 2, 1, 3, 1]), CFG)
        assert highlight.model == "Bimodal"
        positions = [
            d.character_set[0].character.description for d in highlight.details
        ]
        assert positions == ["M01", "M03"]

    def test_monotone_series_reads_unimodal_at_endpoint(self):
        highlight = detect_modality(make_series([1, 2, 3, 4]), CFG)
        assert highlight.model == "Unimodal"
        assert highlight.details[0].character_set[0].character.description == "M03"

    def test_no_peaks_no_highlight(self):
        assert detect_modality(make_series([2, 2, 2, 2]), CFG) is None

    def test_non_positive_mean_skips(self):
        diagnostics = []
        assert (
            detect_modality(make_series([-5, 3, -4]), CFG, diagnostics=diagnostics)
            is None
        )
        assert "mean" in diagnostics[0].reason


class TestDetectTopk:
    def test_fixture_top1(self, sales_resultset):
        cfg = DetectorConfig(k=1)
        highlight = detect_topk(sales_resultset, cfg)
        assert highlight.model == "Top-k(k=1)"
        detail = highlight.details[0]
        coords = {
            hc.character.character_type.name: hc.character.description
            for hc in detail.character_set
        }
        assert coords == {"Month": "May 2023", "City": "Athens"}
        assert detail.measure_value.value == 1000.0
        assert detail.score == 1.0
        assert_valid(highlight)

    def test_fixture_top3(self, sales_resultset):
        highlight = detect_topk(sales_resultset, DetectorConfig(k=3))
        rows = [
            (
                d.character_set[1].character.description,
                d.character_set[0].character.description,
                d.measure_value.value,
                d.score,
            )
            for d in highlight.details
        ]
        assert rows == [
            ("Athens", "May 2023", 1000.0, 1.0),
            ("Athens", "June 2023", 600.0, 2.0),
            ("Athens", "April 2023", 500.0, 3.0),
        ]

    def test_k_clamps_to_cell_count(self, sales_resultset):
        highlight = detect_topk(sales_resultset, DetectorConfig(k=99))
        assert len(highlight.details) == 12
        assert highlight.model == "Top-k(k=12)"
        assert [d.score for d in highlight.details] == [float(i) for i in range(1, 13)]

    def test_ties_share_contiguous_ranks_by_axis_order(self):
        rs = grid_resultset([[5, 5], [3, 5]])
        highlight = detect_topk(rs, DetectorConfig(k=4))
        keys = [
            (
                d.character_set[0].character.id,
                d.character_set[1].character.id,
                d.score,
            )
            for d in highlight.details
        ]
        assert keys == [
            ("r00", "k00", 1.0),
            ("r00", "k01", 2.0),
            ("r01", "k01", 3.0),
            ("r01", "k00", 4.0),
        ]

    def test_matches_sort_oracle_on_random_grids(self):
        rng = random.Random(19)
        for _ in range(60):
            rows = rng.randint(1, 6)
            cols = rng.randint(1, 6)
            grid = [
                [rng.choice([None] + list(range(-5, 10))) for _ in range(cols)]
                for _ in range(rows)
            ]
            if all(v is None for row in grid for v in row):
                continue
            rs = grid_resultset(grid)
            k = rng.randint(1, 8)
            highlight = detect_topk(rs, DetectorConfig(k=k))
            oracle = sorted(
                (
                    (-float(v), r, c)
                    for r, row in enumerate(grid)
                    for c, v in enumerate(row)
                    if v is not None
                ),
            )[:k]
            got = [
                (
                    -d.measure_value.value,
                    int(d.character_set[0].character.id[1:]),
                    int(d.character_set[1].character.id[1:]),
                )
                for d in highlight.details
            ]
            assert got == oracle


class TestDetectMegaContributors:
    def test_fixture_city_axis(self, sales_resultset):
        highlight = detect_mega_contributors(sales_resultset, 1, CFG)
        assert highlight.model == "Mega-contributor present"
        assert len(highlight.details) == 1
        detail = highlight.details[0]
        assert detail.character_set[0].character.description == "Athens"
        assert detail.score == pytest.approx(0.75, abs=1e-9)
        assert highlight.score == pytest.approx(0.75, abs=1e-9)
        assert_valid(highlight)

    def test_fixture_month_axis_flags_may(self, sales_resultset):
        # May's share 1280/2800 = 0.4571 clears the default 0.40 threshold
        highlight = detect_mega_contributors(sales_resultset, 0, CFG)
        assert len(highlight.details) == 1
        detail = highlight.details[0]
        assert detail.character_set[0].character.description == "May 2023"
        assert detail.score == pytest.approx(1280.0 / 2800.0, abs=1e-9)

    def test_single_character_axis(self):
        rs = grid_resultset([[3.0], [4.0]])
        highlight = detect_mega_contributors(rs, 1, CFG)
        assert highlight.details[0].score == 1.0

    def test_balanced_contribution(self):
        rs = grid_resultset([[1, 1, 1, 1]])
        highlight = detect_mega_contributors(rs, 1, CFG)
        assert highlight.model == "Balanced contribution"
        assert highlight.details == ()

    def test_skipped_for_non_sum(self, sales_dataset):
        spec = GroupBySpec(
            filters=(), groupers=("Month", "City"), measure="Sales", aggregate="AVG"
        )
        rs = execute_groupby(sales_dataset, spec)
        diagnostics = []
        assert detect_mega_contributors(rs, 0, CFG, diagnostics=diagnostics) is None
        assert "SUM" in diagnostics[0].reason

    def test_skipped_for_non_positive_total(self):
        rs = grid_resultset([[-1, -2]])
        diagnostics = []
        assert detect_mega_contributors(rs, 1, CFG, diagnostics=diagnostics) is None
        assert diagnostics

    def test_share_bounds(self):
        rng = random.Random(29)
        for _ in range(40):
            rows = rng.randint(1, 5)
            cols = rng.randint(1, 5)
            grid = [
                [rng.uniform(0, 10) for _ in range(cols)] for _ in range(rows)
            ]
            rs = grid_resultset(grid)
            for axis in (0, 1):
                highlight = detect_mega_contributors(rs, axis, CFG)
                if highlight is None:
                    continue
                shares = [d.score for d in highlight.details]
                assert all(s >= CFG.mega_contributor_threshold for s in shares)
                assert len(shares) <= int(1.0 / CFG.mega_contributor_threshold)
                total = rs.grand_total.value
                marginal_sum = sum(m.value for m in rs.marginals(axis))
                assert marginal_sum / total <= 1.0 + 1e-9


def brute_force_dominators(grid, axis, floor):
    """O(a^2 * b) oracle: returns {candidate index: fraction dominated}."""
    if axis == 1:
        grid = [list(col) for col in zip(*grid)]
    a = len(grid)
    out = {}
    for i in range(a):
        dominated = 0
        for k in range(a):
            if i == k:
                continue
            comparable = [
                (vi, vk)
                for vi, vk in zip(grid[i], grid[k])
                if vi is not None and vk is not None
            ]
            if comparable and all(vi > vk for vi, vk in comparable):
                dominated += 1
        score = dominated / (a - 1) if a > 1 else 0.0
        if score >= floor or score >= 1.0:
            out[i] = score
    return out


class TestDetectDominance:
    def test_fixture_city_axis(self, sales_resultset):
        highlight = detect_dominance(sales_resultset, 1, CFG)
        assert highlight.model == "Full domination"
        assert len(highlight.details) == 1
        detail = highlight.details[0]
        assert detail.character_set[0].character.description == "Athens"
        assert detail.score == 1.0
        assert detail.measure_value.value == 2100.0
        assert_valid(highlight)

    def test_fixture_month_axis(self, sales_resultset):
        highlight = detect_dominance(sales_resultset, 0, CFG)
        detail = highlight.details[0]
        assert detail.character_set[0].character.description == "May 2023"
        assert detail.score == 1.0

    def test_skipped_for_one_grouper(self):
        dataset = grid_dataset([[1, 2], [3, 4]])
        spec = GroupBySpec(
            filters=(), groupers=("row",), measure="value", aggregate="SUM"
        )
        rs = execute_groupby(dataset, spec)
        diagnostics = []
        assert detect_dominance(rs, 0, CFG, diagnostics=diagnostics) is None
        assert "2-grouper" in diagnostics[0].reason

    def test_ties_break_domination(self):
        rs = grid_resultset([[5, 5], [5, 4]])
        highlight = detect_dominance(rs, 0, CFG)
        assert highlight is None  # 5 > 5 fails on the first column

    def test_absent_cells_are_non_comparable(self):
        # candidate rows share no present slice with row 1: not dominated
        rs = grid_resultset([[9, None], [None, 1]])
        assert detect_dominance(rs, 0, CFG) is None

    def test_partial_domination(self):
        # r0 beats r1 and r2 everywhere; r3 beats r1, r2 but not r0
        grid = [
            [9, 9, 9],
            [1, 1, 1],
            [2, 2, 2],
            [8, 8, 8],
        ]
        cfg = DetectorConfig(partial_dominance_floor=0.6)
        highlight = detect_dominance(grid_resultset(grid), 0, cfg)
        assert highlight.model == "Full domination"
        scores = {
            d.character_set[0].character.id: d.score for d in highlight.details
        }
        assert scores == {"r00": 1.0, "r03": pytest.approx(2 / 3)}

    def test_matches_brute_force_oracle(self):
        rng = random.Random(23)
        for _ in range(80):
            rows = rng.randint(2, 6)
            cols = rng.randint(1, 6)
            grid = [
                [rng.choice([None] + list(range(0, 8))) for _ in range(cols)]
                for _ in range(rows)
            ]
            if all(v is None for row in grid for v in row):
                continue
            rs = grid_resultset(grid)
            # the pivot drops axis characters with no facts at all; restrict
            # the oracle to the grid the result set actually carries
            live_rows = sorted(int(c.id[1:]) for c in rs.axes[0])
            live_cols = sorted(int(c.id[1:]) for c in rs.axes[1])
            live = [[grid[r][c] for c in live_cols] for r in live_rows]
            for axis in (0, 1):
                if len(rs.axes[axis]) < 2:
                    continue
                highlight = detect_dominance(rs, axis, CFG)
                expected = brute_force_dominators(
                    live, axis, CFG.partial_dominance_floor
                )
                axis_ids = [
                    (live_rows if axis == 0 else live_cols)[i] for i in expected
                ]
                if highlight is None:
                    assert expected == {}
                    continue
                got = {
                    int(d.character_set[0].character.id[1:]): d.score
                    for d in highlight.details
                }
                assert got == {
                    axis_id: score
                    for axis_id, score in zip(axis_ids, expected.values())
                }


class TestRunAll:
    def test_fixture_default_menu(self, sales_dataset, sales_resultset):
        highlights, diagnostics = run_all(sales_dataset, sales_resultset)
        labels = [
            (h.highlight_type, h.supportive_explanators[0][1] if h.supportive_explanators else "")
            for h in highlights
        ]
        assert labels == [
            ("Dominance", "City"),     # month-axis candidates compared across cities
            ("Dominance", "Month"),
            ("Mega-contributor", "Month"),
            ("Mega-contributor", "City"),
            ("Modality", "Month"),
            ("Trend", "Month"),
        ]
        assert len(diagnostics) == 1
        assert diagnostics[0].detector == "seasonality"
        assert "insufficient data" in diagnostics[0].reason

    def test_all_disabled_is_empty(self, sales_dataset, sales_resultset):
        cfg = DetectorConfig(enabled=frozenset())
        highlights, diagnostics = run_all(sales_dataset, sales_resultset, cfg)
        assert highlights == []
        assert diagnostics == []

    def test_one_grouper_drops_dominance(self, sales_dataset):
        spec = GroupBySpec(
            filters=(), groupers=("Month",), measure="Sales", aggregate="SUM"
        )
        rs = execute_groupby(sales_dataset, spec)
        highlights, diagnostics = run_all(sales_dataset, rs)
        assert all(h.highlight_type != "Dominance" for h in highlights)
        assert any(d.detector == "dominance" for d in diagnostics)

    def test_correlation_runs_with_two_measures(self, tmp_path):
        from datahighlights.ingest import DatasetConfig, load_dataset

        (tmp_path / "f.csv").write_text(
            "city,a,b\n"
            + "\n".join(f"c{i % 4},{i},{i * 2 + 1}" for i in range(12))
            + "\n",
            encoding="utf-8",
        )
        config = DatasetConfig.from_dict(
            {
                "factTable": "f.csv",
                "columns": {
                    "city": {"role": "dimension"},
                    "a": {"role": "measure"},
                    "b": {"role": "measure"},
                },
            },
            base_dir=tmp_path,
        )
        dataset, _ = load_dataset(config)
        spec = GroupBySpec(filters=(), groupers=("city",), measure="a", aggregate="SUM")
        rs = execute_groupby(dataset, spec)
        highlights, _ = run_all(dataset, rs)
        correlation = [h for h in highlights if h.highlight_type == "Correlation"]
        assert len(correlation) == 1  # one unordered measure pair
        assert correlation[0].model == "Positively Significant"

    def test_every_emitted_highlight_validates(self, sales_dataset, sales_resultset):
        cfg = DetectorConfig(enabled=frozenset(ALL_DETECTORS))
        highlights, _ = run_all(sales_dataset, sales_resultset, cfg)
        for highlight in highlights:
            assert validate_highlight(highlight, REGISTRY) == []

    def test_deterministic_serialized_output(self, sales_dataset, sales_resultset):
        first = serialize_highlights(*run_all(sales_dataset, sales_resultset))
        second = serialize_highlights(*run_all(sales_dataset, sales_resultset))
        assert first == second

    def test_argmax_invariance_under_scaling(self, sales_dataset, sales_resultset):
        scaled_facts = tuple(
            Fact({**f.values, "Sales": f.get("Sales") * 7.3})
            for f in sales_dataset.facts
        )
        scaled = Dataset(
            schema=sales_dataset.schema,
            facts=scaled_facts,
            measures=sales_dataset.measures,
            characters=sales_dataset.characters,
        )
        spec = sales_resultset.spec
        base_h, _ = run_all(sales_dataset, sales_resultset)
        scaled_h, _ = run_all(scaled, execute_groupby(scaled, spec))
        assert len(base_h) == len(scaled_h)
        for a, b in zip(base_h, scaled_h):
            assert a.highlight_type == b.highlight_type
            assert a.model == b.model
            assert [d.character_set for d in a.details] == [
                d.character_set for d in b.details
            ]
            for da, db in zip(a.details, b.details):
                if da.score_type in ("share of total", "percentage of dominated peers", "rank"):
                    assert db.score == pytest.approx(da.score, abs=1e-9)
                assert db.measure_value.value == pytest.approx(
                    da.measure_value.value * 7.3, rel=1e-12
                )


class TestDetectorConfig:
    def test_defaults_exclude_optin_detectors(self):
        assert "topk" not in CFG.enabled
        assert "distribution" not in CFG.enabled
        assert "dominance" in CFG.enabled

    def test_from_dict_round_trip(self):
        cfg = DetectorConfig.from_dict(
            {
                "enabled": ["dominance", "topk"],
                "k": 5,
                "megaContributorThreshold": 0.3,
                "alpha": 0.01,
                "correlationBins": {"significant": 0.8, "moderate": 0.5},
                "partialDominanceFloor": 0.9,
                "seasonalityThreshold": 0.6,
                "emitNegative": False,
            }
        )
        assert cfg.k == 5
        assert cfg.enabled == frozenset({"dominance", "topk"})
        assert cfg.correlation_significant == 0.8
        assert cfg.mega_contributor_threshold == 0.3
        assert not cfg.emit_negative

    def test_invalid_values_rejected(self):
        with pytest.raises(ValueError):
            DetectorConfig(k=0)
        with pytest.raises(ValueError):
            DetectorConfig(alpha=1.5)
        with pytest.raises(ValueError):
            DetectorConfig(enabled=frozenset({"astrology"}))
        with pytest.raises(ValueError):
            DetectorConfig.from_dict({"k": 3, "bogus": 1})
