"""Highlight extraction: each detector tests one archetype property over a
result set (or raw measure columns) and emits at most one holistic
highlight with its elementary details.

`run_all` orchestrates every enabled detector over every applicable
target and returns highlights in a deterministic order: detector name,
then axis index, then measure name. Detector failures never abort a run;
they become diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import kernels
from .core import Dataset, FeatureKind, MeasureType, MeasureValue, Role
from .errors import KernelError
from .highlights import (
    ALGORITHM_MODEL_TYPES,
    NEGATIVE_MODELS,
    Diagnostic,
    ElementaryHighlight,
    HighlightCharacter,
    HolisticHighlight,
    Provenance,
)
from .query import ResultSet, SeriesView, marginal_series

ALL_DETECTORS = (
    "correlation",
    "distribution",
    "dominance",
    "mega_contributors",
    "modality",
    "seasonality",
    "topk",
    "trend",
)

# distribution and topk are opt-in: the default menu over a pivot reports
# dominance, contribution, shape-of-series and correlation findings.
DEFAULT_ENABLED = frozenset(
    {"correlation", "dominance", "mega_contributors", "modality", "seasonality", "trend"}
)

MAIN_MEASURE_ROLE = Role("main measure")
_CORRELATION_SCORE_TYPES = {
    "Kendall": "Kendall tau",
    "Pearson": "Pearson r",
    "Spearman": "Spearman rho",
}


@dataclass(frozen=True)
class DetectorConfig:
    enabled: frozenset[str] = DEFAULT_ENABLED
    k: int = 3
    mega_contributor_threshold: float = 0.40
    alpha: float = 0.05
    correlation_significant: float = 0.7
    correlation_moderate: float = 0.4
    dominance_mode: str = "strict"
    partial_dominance_floor: float = 0.75
    seasonality_threshold: float = 0.5
    emit_negative: bool = True
    correlation_algorithm: str = "Kendall"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for name in (
            "mega_contributor_threshold",
            "alpha",
            "correlation_significant",
            "correlation_moderate",
            "partial_dominance_floor",
            "seasonality_threshold",
        ):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        unknown = set(self.enabled) - set(ALL_DETECTORS)
        if unknown:
            raise ValueError(f"unknown detector names: {sorted(unknown)}")
        if self.dominance_mode != "strict":
            raise ValueError("only strict dominance is supported")
        if self.correlation_algorithm not in _CORRELATION_SCORE_TYPES:
            raise ValueError(
                f"unsupported correlation algorithm {self.correlation_algorithm!r}"
            )

    @classmethod
    def from_dict(cls, raw: dict | None) -> "DetectorConfig":
        raw = raw or {}
        kwargs = {}
        mapping = {
            "enabled": "enabled",
            "k": "k",
            "megaContributorThreshold": "mega_contributor_threshold",
            "alpha": "alpha",
            "dominanceMode": "dominance_mode",
            "partialDominanceFloor": "partial_dominance_floor",
            "seasonalityThreshold": "seasonality_threshold",
            "emitNegative": "emit_negative",
            "correlationAlgorithm": "correlation_algorithm",
        }
        unknown = set(raw) - set(mapping) - {"correlationBins"}
        if unknown:
            raise ValueError(f"unknown detector config keys: {sorted(unknown)}")
        for key, attr in mapping.items():
            if key in raw:
                kwargs[attr] = raw[key]
        if "enabled" in kwargs:
            kwargs["enabled"] = frozenset(kwargs["enabled"])
        bins = raw.get("correlationBins", {})
        if "significant" in bins:
            kwargs["correlation_significant"] = bins["significant"]
        if "moderate" in bins:
            kwargs["correlation_moderate"] = bins["moderate"]
        return cls(**kwargs)


def _maybe_negative(highlight: HolisticHighlight, cfg: DetectorConfig):
    if not cfg.emit_negative and highlight.model in NEGATIVE_MODELS:
        return None
    return highlight


def _skip(diagnostics, detector: str, target: str, reason: str):
    if diagnostics is not None:
        diagnostics.append(Diagnostic(detector, target, reason))
    return None


# ---------------------------------------------------------------------------
# dataset-level detectors
# ---------------------------------------------------------------------------


def detect_distribution(
    values,
    measure: MeasureType,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Distribution testimony over a measure's values.

    Shapiro-Wilk first: p > alpha reads as Normal. Otherwise the values
    are checked against a fitted uniform via Kolmogorov-Smirnov; failing
    both yields the negative model 'Unclassified' carrying the last
    test's evidence.
    """
    target = f"measure {measure.name}"
    data = [v for v in values if v is not None]
    if len(data) < 3:
        return _skip(
            diagnostics, "distribution", target, f"insufficient data: n={len(data)} < 3"
        )
    try:
        sw = kernels.shapiro_wilk(data)
    except KernelError as exc:
        return _skip(diagnostics, "distribution", target, str(exc))

    if sw.p_value > cfg.alpha:
        model, algorithm, p = "Normal", "Shapiro-Wilk", sw.p_value
    else:
        try:
            ks = kernels.ks_uniform(data)
        except KernelError:
            model, algorithm, p = "Unclassified", "Shapiro-Wilk", sw.p_value
        else:
            if ks.p_value > cfg.alpha:
                model, algorithm, p = "Uniform", "Kolmogorov-Smirnov", ks.p_value
            else:
                model, algorithm, p = "Unclassified", "Kolmogorov-Smirnov", ks.p_value

    highlight = HolisticHighlight(
        highlight_type="Distribution",
        model_type=ALGORITHM_MODEL_TYPES[algorithm],
        model=model,
        actual_algorithm=algorithm,
        score_type="p-value",
        score=float(p),
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=measure,
        provenance=provenance,
    )
    return _maybe_negative(highlight, cfg)


def detect_correlation(
    x,
    y,
    measures: tuple[MeasureType, MeasureType],
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Correlation of two measures over paired fact rows, binned into the
    significance model by sign and magnitude."""
    first, second = measures
    target = f"measures {first.name}, {second.name}"
    kernel = {
        "Kendall": kernels.kendall_tau,
        "Pearson": kernels.pearson,
        "Spearman": kernels.spearman,
    }[cfg.correlation_algorithm]
    try:
        result = kernel(x, y)
    except KernelError as exc:
        return _skip(diagnostics, "correlation", target, str(exc))

    magnitude = abs(result.statistic)
    if magnitude >= cfg.correlation_significant:
        model = (
            "Positively Significant"
            if result.statistic >= 0
            else "Negatively Significant"
        )
    elif magnitude >= cfg.correlation_moderate:
        model = (
            "Moderately Positively Significant"
            if result.statistic >= 0
            else "Moderately Negatively Significant"
        )
    else:
        model = "Insignificant"

    highlight = HolisticHighlight(
        highlight_type="Correlation",
        model_type=ALGORITHM_MODEL_TYPES[cfg.correlation_algorithm],
        model=model,
        actual_algorithm=cfg.correlation_algorithm,
        score_type=_CORRELATION_SCORE_TYPES[cfg.correlation_algorithm],
        score=float(result.statistic),
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=first,
        supportive_explanators=((Role("correlated with", "correlated with"), second.name),),
        provenance=provenance,
    )
    return _maybe_negative(highlight, cfg)


# ---------------------------------------------------------------------------
# series detectors
# ---------------------------------------------------------------------------


def _ordering_axis_explanator(series: SeriesView):
    return ((Role("ordering axis", "ordered along"), series.axis_feature),)


def _dense_values(series: SeriesView, detector: str, diagnostics):
    target = f"series along {series.axis_feature}"
    if not series.dense:
        _skip(diagnostics, detector, target, "sparse series: absent cells on the axis")
        return None
    return series.values()


def detect_trend(
    series: SeriesView,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Mann-Kendall trend test over a dense ordered series."""
    target = f"series along {series.axis_feature}"
    values = _dense_values(series, "trend", diagnostics)
    if values is None:
        return None
    try:
        result = kernels.mann_kendall(values)
    except KernelError as exc:
        return _skip(diagnostics, "trend", target, str(exc))
    if result.p_value <= cfg.alpha:
        model = "Increasing" if result.statistic > 0 else "Decreasing"
    else:
        model = "No trend"
    highlight = HolisticHighlight(
        highlight_type="Trend",
        model_type=ALGORITHM_MODEL_TYPES["Mann-Kendall"],
        model=model,
        actual_algorithm="Mann-Kendall",
        score_type="p-value",
        score=float(result.p_value),
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=series.measure_type,
        supportive_explanators=_ordering_axis_explanator(series),
        provenance=provenance,
    )
    return _maybe_negative(highlight, cfg)


def detect_seasonality(
    series: SeriesView,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Best-lag autocorrelation scan; lags 2..n//2 with n >= 2*lag + 1."""
    target = f"series along {series.axis_feature}"
    values = _dense_values(series, "seasonality", diagnostics)
    if values is None:
        return None
    n = len(values)
    if n < 5:
        return _skip(
            diagnostics, "seasonality", target, f"insufficient data: n={n} < 5"
        )
    best: tuple[float, int] | None = None
    failure: str | None = None
    for lag in range(2, n // 2 + 1):
        if n < 2 * lag + 1:
            break
        try:
            r = kernels.autocorrelation(values, lag).statistic
        except KernelError as exc:
            failure = str(exc)
            continue
        if best is None or r > best[0]:
            best = (r, lag)
    if best is None:
        return _skip(
            diagnostics, "seasonality", target, failure or "no admissible lag"
        )
    score, lag = best
    model = f"Seasonal(lag={lag})" if score >= cfg.seasonality_threshold else "Not seasonal"
    highlight = HolisticHighlight(
        highlight_type="Seasonality",
        model_type=ALGORITHM_MODEL_TYPES["Autocorrelation scan"],
        model=model,
        actual_algorithm="Autocorrelation scan",
        score_type="autocorrelation",
        score=float(score),
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=series.measure_type,
        supportive_explanators=_ordering_axis_explanator(series),
        provenance=provenance,
    )
    return _maybe_negative(highlight, cfg)


def detect_modality(
    series: SeriesView,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Peak count over a dense series: one peak reads Unimodal, two
    Bimodal, three or more Multimodal; no peaks, no highlight. Each peak
    becomes an elementary detail scored by its peak-to-mean ratio."""
    target = f"series along {series.axis_feature}"
    values = _dense_values(series, "modality", diagnostics)
    if values is None:
        return None
    try:
        peaks = kernels.find_local_maxima(values)
    except KernelError as exc:
        return _skip(diagnostics, "modality", target, str(exc))
    if not peaks:
        return None
    mean = sum(values) / len(values)
    if mean <= 0.0:
        return _skip(
            diagnostics, "modality", target, "peak-to-mean ratio undefined: mean <= 0"
        )
    model = {1: "Unimodal", 2: "Bimodal"}.get(len(peaks), "Multimodal")
    details = tuple(
        ElementaryHighlight(
            highlight_type="Modality",
            character_set=(
                HighlightCharacter(
                    Role("peak position", "peaking at"), series.axis_characters[i]
                ),
            ),
            measure_value=MeasureValue(series.measure_type, values[i]),
            model=model,
            score_type="peak-to-mean ratio",
            score=values[i] / mean,
        )
        for i in peaks
    )
    return HolisticHighlight(
        highlight_type="Modality",
        model_type=ALGORITHM_MODEL_TYPES["Local maxima scan"],
        model=model,
        actual_algorithm="Local maxima scan",
        score_type="peak-to-mean ratio",
        score=max(values[i] for i in peaks) / mean,
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=series.measure_type,
        supportive_explanators=_ordering_axis_explanator(series),
        details=details,
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# result-set detectors
# ---------------------------------------------------------------------------


def detect_topk(
    resultset: ResultSet,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Top-k cells by measure value, ranked 1..k.

    Ties share contiguous ranks, broken deterministically by axis order.
    k larger than the cell count clamps to all cells.
    """
    if not resultset.cells:
        return _skip(diagnostics, "topk", "result set", "no cells to rank")

    axis_positions = [
        {character: idx for idx, character in enumerate(axis)}
        for axis in resultset.axes
    ]

    def axis_order(key):
        return tuple(axis_positions[i][c] for i, c in enumerate(key))

    ranked = sorted(
        resultset.cells.items(), key=lambda kv: (-kv[1].value, axis_order(kv[0]))
    )
    k = min(cfg.k, len(ranked))
    model = f"Top-k(k={k})"
    details = tuple(
        ElementaryHighlight(
            highlight_type="Top-k",
            character_set=tuple(
                HighlightCharacter(
                    Role("coordinate", f"on {resultset.axis_features[i]}"), character
                )
                for i, character in enumerate(key)
            ),
            measure_value=cell,
            model=model,
            score_type="rank",
            score=float(rank),
        )
        for rank, (key, cell) in enumerate(ranked[:k], start=1)
    )
    return HolisticHighlight(
        highlight_type="Top-k",
        model_type=ALGORITHM_MODEL_TYPES["Descending sort"],
        model=model,
        actual_algorithm="Descending sort",
        score_type="top-k size",
        score=float(k),
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=resultset.measure_type,
        supportive_explanators=tuple(
            (Role("breakdown axis", "broken down by"), feature)
            for feature in resultset.axis_features
        ),
        details=details,
        provenance=provenance,
    )


def detect_mega_contributors(
    resultset: ResultSet,
    axis_index: int,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Characters whose marginal share of the grand total reaches the
    threshold; emits 'Balanced contribution' when none does."""
    feature = resultset.axis_features[axis_index]
    target = f"axis {axis_index} ({feature})"
    if resultset.spec.aggregate != "SUM":
        return _skip(
            diagnostics,
            "mega_contributors",
            target,
            f"requires SUM, got {resultset.spec.aggregate}",
        )
    if resultset.grand_total is None or resultset.grand_total.value <= 0.0:
        return _skip(diagnostics, "mega_contributors", target, "grand total <= 0")

    total = resultset.grand_total.value
    characters = resultset.axes[axis_index]
    if not characters:
        return _skip(diagnostics, "mega_contributors", target, "empty axis")
    marginals = resultset.marginals(axis_index)
    shares = [mv.value / total for mv in marginals]
    flagged = [
        (character, marginal, share)
        for character, marginal, share in zip(characters, marginals, shares)
        if share >= cfg.mega_contributor_threshold
    ]
    model = "Mega-contributor present" if flagged else "Balanced contribution"
    details = tuple(
        ElementaryHighlight(
            highlight_type="Mega-contributor",
            character_set=(
                HighlightCharacter(Role("mega-contributor", "contributing"), character),
            ),
            measure_value=marginal,
            model=model,
            score_type="share of total",
            score=share,
        )
        for character, marginal, share in flagged
    )
    highlight = HolisticHighlight(
        highlight_type="Mega-contributor",
        model_type=ALGORITHM_MODEL_TYPES["Marginal share"],
        model=model,
        actual_algorithm="Marginal share",
        score_type="share of total",
        score=max(shares),
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=resultset.measure_type,
        supportive_explanators=((Role("breakdown axis", "broken down by"), feature),),
        details=details,
        provenance=provenance,
    )
    return _maybe_negative(highlight, cfg)


def _aggregate_cells(resultset: ResultSet, values: list[float]) -> float:
    agg = resultset.spec.aggregate
    if agg == "AVG":
        return sum(sorted(values)) / len(values)
    if agg == "MIN":
        return min(values)
    if agg == "MAX":
        return max(values)
    total = 0.0
    for v in sorted(values):
        total += v
    return total


def detect_dominance(
    resultset: ResultSet,
    axis_index: int,
    cfg: DetectorConfig,
    provenance: Provenance = Provenance(),
    diagnostics: list | None = None,
):
    """Characters that strictly dominate their peers across the other axis.

    c dominates c' iff both cells are present and c's is strictly greater
    in every comparable slice, with at least one comparable slice. Details
    carry the fraction of peers dominated; full domination (1.0) or a
    fraction at or above the partial floor qualifies.
    """
    feature = resultset.axis_features[axis_index]
    target = f"axis {axis_index} ({feature})"
    if len(resultset.axes) != 2:
        return _skip(diagnostics, "dominance", target, "requires a 2-grouper result set")
    candidates = resultset.axes[axis_index]
    if len(candidates) < 2:
        return _skip(diagnostics, "dominance", target, "fewer than 2 characters on axis")
    others = resultset.axes[1 - axis_index]

    def cell_key(candidate, slice_char):
        return (
            (candidate, slice_char) if axis_index == 0 else (slice_char, candidate)
        )

    grid = []
    present = []
    for candidate in candidates:
        row_values = []
        row_present = []
        for slice_char in others:
            value = resultset.cell_value(cell_key(candidate, slice_char))
            row_values.append(0.0 if value is None else value)
            row_present.append(0 if value is None else 1)
        grid.append(row_values)
        present.append(row_present)

    dom = kernels.dominance_counts(grid, present)
    peer_count = len(candidates) - 1
    details = []
    for i, candidate in enumerate(candidates):
        score = sum(dom[i]) / peer_count
        if score < 1.0 and score < cfg.partial_dominance_floor:
            continue
        cell_values = [v for v, p in zip(grid[i], present[i]) if p]
        details.append(
            ElementaryHighlight(
                highlight_type="Dominance",
                character_set=(
                    HighlightCharacter(Role("dominator", "dominating"), candidate),
                ),
                measure_value=MeasureValue(
                    resultset.measure_type, _aggregate_cells(resultset, cell_values)
                ),
                model="",  # details reference the parent's model, patched below
                score_type="percentage of dominated peers",
                score=score,
            )
        )
    if not details:
        return None
    best = max(d.score for d in details)
    model = "Full domination" if best >= 1.0 else "Partial domination"
    return HolisticHighlight(
        highlight_type="Dominance",
        model_type=ALGORITHM_MODEL_TYPES["Pairwise slice comparison"],
        model=model,
        actual_algorithm="Pairwise slice comparison",
        score_type="percentage of dominated peers",
        score=best,
        measure_role=MAIN_MEASURE_ROLE,
        measure_type=resultset.measure_type,
        supportive_explanators=(
            (Role("comparison axis", "compared across"), resultset.axis_features[1 - axis_index]),
        ),
        details=tuple(replace(d, model=model) for d in details),
        provenance=provenance,
    )


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------


def _paired_measure_values(dataset: Dataset, first: MeasureType, second: MeasureType):
    xs, ys = [], []
    for fact in dataset.facts:
        a = fact.get(first.name)
        b = fact.get(second.name)
        if a is not None and b is not None:
            xs.append(float(a))
            ys.append(float(b))
    return xs, ys


def _temporal_axes(dataset: Dataset, resultset: ResultSet) -> list[int]:
    out = []
    for index, feature in enumerate(resultset.axis_features):
        if dataset.schema.feature(feature).kind is FeatureKind.DATETIME:
            out.append(index)
    return out


def run_all(
    dataset: Dataset,
    resultset: ResultSet,
    cfg: DetectorConfig | None = None,
    timestamp: str | None = None,
):
    """Run every enabled detector over every applicable target.

    Targets: each axis for the axis-wise detectors (dominance,
    mega-contributors), the marginal series of each DateTime axis for
    trend/seasonality/modality, every measure pair (enumerated in sorted
    name order) for correlation, each numeric measure column for
    distribution, and the result set itself for top-k.

    Returns (highlights, diagnostics); output order is deterministic:
    detector name, then axis index, then measure name.
    """
    cfg = cfg or DetectorConfig()
    provenance = Provenance(
        query_digest=resultset.spec.digest(),
        dataset_digest=dataset.digest(),
        timestamp=timestamp,
    )
    highlights: list[HolisticHighlight] = []
    diagnostics: list[Diagnostic] = []

    def collect(result):
        if result is not None:
            highlights.append(result)

    series_cache: dict[int, SeriesView | Exception] = {}

    def series_for_axis(index: int, detector: str) -> SeriesView | None:
        if index not in series_cache:
            try:
                series_cache[index] = marginal_series(resultset, index)
            except Exception as exc:
                series_cache[index] = exc
        cached = series_cache[index]
        if isinstance(cached, Exception):
            diagnostics.append(
                Diagnostic(detector, f"axis {index} marginal series", str(cached))
            )
            return None
        return cached

    numeric_measures = sorted(dataset.numeric_measures(), key=lambda m: m.name)

    for detector in sorted(cfg.enabled):
        if detector == "correlation":
            if len(numeric_measures) >= 2:
                for i, first in enumerate(numeric_measures):
                    for second in numeric_measures[i + 1 :]:
                        xs, ys = _paired_measure_values(dataset, first, second)
                        collect(
                            detect_correlation(
                                xs, ys, (first, second), cfg, provenance, diagnostics
                            )
                        )
        elif detector == "distribution":
            for measure in numeric_measures:
                collect(
                    detect_distribution(
                        dataset.measure_column(measure.name),
                        measure,
                        cfg,
                        provenance,
                        diagnostics,
                    )
                )
        elif detector == "dominance":
            for axis_index in range(len(resultset.axes)):
                collect(
                    detect_dominance(resultset, axis_index, cfg, provenance, diagnostics)
                )
        elif detector == "mega_contributors":
            for axis_index in range(len(resultset.axes)):
                collect(
                    detect_mega_contributors(
                        resultset, axis_index, cfg, provenance, diagnostics
                    )
                )
        elif detector in ("modality", "seasonality", "trend"):
            detect = {
                "modality": detect_modality,
                "seasonality": detect_seasonality,
                "trend": detect_trend,
            }[detector]
            for axis_index in _temporal_axes(dataset, resultset):
                series = series_for_axis(axis_index, detector)
                if series is not None:
                    collect(detect(series, cfg, provenance, diagnostics))
        elif detector == "topk":
            collect(detect_topk(resultset, cfg, provenance, diagnostics))

    return highlights, diagnostics
