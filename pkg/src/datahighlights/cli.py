"""Command-line entry point: config -> ingest -> query -> detectors -> output.

Commands:
  profile     per-column descriptive stats and suggested roles
  highlights  run the pipeline, write the highlights JSON document
  narrate     run the pipeline, write the composed narrative

Exit codes: 0 success, 2 config error, 3 data error, 4 query error,
5 internal error. Log output goes to stderr; stdout carries only the
requested document.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .detectors import DetectorConfig, run_all
from .errors import ConfigError, DataError, DataHighlightsError, QueryError
from .highlights import ScoreTypeRegistry, serialize_highlights
from .ingest import DatasetConfig, infer_feature_kinds, load_dataset
from .narrate import NarrativeOptions, NarrativeTemplate, compose_summary
from .query import GroupBySpec, execute_groupby

log = logging.getLogger("datahighlights")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_QUERY = 4
EXIT_INTERNAL = 5


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="datahighlights",
        description="Extract and narrate statistical highlights from tabular data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="dataset config JSON")
        p.add_argument("--out", help="output file (default: stdout)")

    profile = sub.add_parser("profile", help="describe columns and suggest roles")
    add_common(profile)

    def add_pipeline(p):
        add_common(p)
        p.add_argument("--query", required=True, help="group-by query JSON")
        p.add_argument("--k", type=int, help="top-k size override")
        p.add_argument(
            "--mega-threshold", type=float, help="mega-contributor share threshold"
        )
        p.add_argument("--alpha", type=float, help="significance level override")
        p.add_argument(
            "--seasonality-threshold", type=float, help="autocorrelation threshold"
        )
        p.add_argument(
            "--partial-floor", type=float, help="partial-domination score floor"
        )
        p.add_argument(
            "--emit-negative",
            dest="emit_negative",
            action="store_true",
            default=None,
            help="emit negative testimonies (default)",
        )
        p.add_argument(
            "--no-emit-negative",
            dest="emit_negative",
            action="store_false",
            help="suppress negative testimonies",
        )
        p.add_argument(
            "--enable",
            action="append",
            default=[],
            metavar="DETECTOR",
            help="add a detector to the enabled set (repeatable)",
        )
        p.add_argument(
            "--disable",
            action="append",
            default=[],
            metavar="DETECTOR",
            help="remove a detector from the enabled set (repeatable)",
        )
        p.add_argument(
            "--no-provenance-timestamp",
            action="store_true",
            help="omit the run timestamp from provenance (deterministic output)",
        )

    highlights = sub.add_parser("highlights", help="emit the highlights JSON document")
    add_pipeline(highlights)

    narrate = sub.add_parser("narrate", help="emit the composed narrative")
    add_pipeline(narrate)
    narrate.add_argument(
        "--format", choices=("text", "markdown"), default="text", help="narrative format"
    )
    narrate.add_argument(
        "--json-out", help="also write the highlights JSON document to this file"
    )

    return parser


def _detector_config(config: DatasetConfig, args) -> DetectorConfig:
    try:
        cfg = DetectorConfig.from_dict(config.detectors)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad detectors section: {exc}") from exc
    overrides = {}
    if args.k is not None:
        overrides["k"] = args.k
    if args.mega_threshold is not None:
        overrides["mega_contributor_threshold"] = args.mega_threshold
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.seasonality_threshold is not None:
        overrides["seasonality_threshold"] = args.seasonality_threshold
    if args.partial_floor is not None:
        overrides["partial_dominance_floor"] = args.partial_floor
    if args.emit_negative is not None:
        overrides["emit_negative"] = args.emit_negative
    enabled = set(cfg.enabled) | set(args.enable)
    enabled -= set(args.disable)
    overrides["enabled"] = frozenset(enabled)
    try:
        return replace(cfg, **overrides)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _write_output(text: str, out: str | None):
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _run_pipeline(args):
    config = DatasetConfig.from_json_file(args.config)
    dataset, _ = load_dataset(config)
    spec = GroupBySpec.from_json_file(args.query)
    resultset = execute_groupby(dataset, spec)
    detector_cfg = _detector_config(config, args)
    timestamp = None
    if not args.no_provenance_timestamp:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    highlights, diagnostics = run_all(dataset, resultset, detector_cfg, timestamp)
    return config, highlights, diagnostics


def _cmd_profile(args) -> int:
    config = DatasetConfig.from_json_file(args.config)
    if not config.fact_table_path.exists():
        raise ConfigError(f"fact table not found: {config.fact_table_path}")
    with open(config.fact_table_path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise DataError(f"{config.fact_table_path} has no header row")
    header, data_rows = rows[0], rows[1:]
    columns = {
        name: [row[i] if i < len(row) else "" for row in data_rows]
        for i, name in enumerate(header)
    }
    suggestions = infer_feature_kinds(columns)

    lines = [
        f"{'column':<20} {'count':>7} {'distinct':>8} {'min':>12} {'max':>12} "
        f"{'mean':>12}  suggested  configured"
    ]
    for name in header:
        values = [v.strip() for v in columns[name] if v.strip() != ""]
        numeric = []
        for v in values:
            try:
                numeric.append(float(v))
            except ValueError:
                numeric = []
                break
        if numeric:
            lo, hi = f"{min(numeric):g}", f"{max(numeric):g}"
            mean = f"{sum(numeric) / len(numeric):g}"
        elif values:
            lo, hi, mean = min(values)[:12], max(values)[:12], "-"
        else:
            lo = hi = mean = "-"
        configured = config.columns[name].role if name in config.columns else "-"
        lines.append(
            f"{name:<20} {len(values):>7} {len(set(values)):>8} {lo:>12} {hi:>12} "
            f"{mean:>12}  {suggestions[name]:<10} {configured}"
        )
    _write_output("\n".join(lines), args.out)
    return EXIT_OK


def _cmd_highlights(args) -> int:
    _, highlights, diagnostics = _run_pipeline(args)
    document = serialize_highlights(highlights, diagnostics, ScoreTypeRegistry.default())
    _write_output(document, args.out)
    return EXIT_OK


def _cmd_narrate(args) -> int:
    config, highlights, diagnostics = _run_pipeline(args)
    for diagnostic in diagnostics:
        log.info("%s skipped on %s: %s", diagnostic.detector, diagnostic.target, diagnostic.reason)
    if args.json_out:
        document = serialize_highlights(
            highlights, diagnostics, ScoreTypeRegistry.default()
        )
        Path(args.json_out).write_text(document + "\n", encoding="utf-8")
    template = NarrativeTemplate.from_config(config.templates)
    options = NarrativeOptions.from_config(config.narrative)
    options = replace(options, format=args.format)
    summary = compose_summary(
        highlights, ScoreTypeRegistry.default(), template, options
    )
    _write_output(summary, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler = {
        "profile": _cmd_profile,
        "highlights": _cmd_highlights,
        "narrate": _cmd_narrate,
    }[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except QueryError as exc:
        print(f"query error: {exc}", file=sys.stderr)
        return EXIT_QUERY
    except DataHighlightsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
