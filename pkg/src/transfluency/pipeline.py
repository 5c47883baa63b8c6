"""Stage-sequential pipeline: ingest, filter, sample, cross-validate, correlate.

Every artifact is deterministic: no timestamps, floats rendered with repr, one
manifest of content hashes at the end. Reruns with the same config and input
bytes produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .classifier import TrainConfig, save_model
from .config import PipelineConfig, config_to_dict, validate_config
from .corpus import (
    ParagraphRecord,
    SchemaError,
    books_from_records,
    dedupe_works,
    filter_min_length,
    load_records,
    write_records,
)
from .evaluation import CrossValResult, classifier_metrics, cross_val_oof, make_folds
from .features import FeatureConfig
from .guardrails import FilterReport, GuardrailConfig, apply_guardrails
from .sampling import (
    BinSummary,
    WeightedRecord,
    assign_sample_weights,
    compute_length_bins,
    downsample_with_summary,
)
from .stats import AnalysisRow, CorrelationResult, headline_correlations, stratified_analysis

STAGES = ("ingest", "filter", "sample", "train-cv", "correlate")

RUN_FORMAT = "transfluency-run"
RUN_FORMAT_VERSION = 1


class DataError(Exception):
    """Input data failed validation (schema errors, impossible corpus)."""


class StageError(Exception):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def substream_seed(seed: int, name: str) -> int:
    """Independent named random substream derived from the single config seed."""
    digest = hashlib.sha256(f"{seed}:{name}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def group_key(record: ParagraphRecord) -> str:
    """Stable key shared by all translation variants of one source paragraph."""
    payload = f"{record.book_id}\x1f{record.source_text}".encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


@dataclass
class PipelineResult:
    config: PipelineConfig
    out_dir: Path
    n_ingested: int = 0
    schema_errors: list[SchemaError] = field(default_factory=list)
    filter_reports: list[FilterReport] = field(default_factory=list)
    records: list[ParagraphRecord] = field(default_factory=list)
    sampling_summary: list[BinSummary] = field(default_factory=list)
    weighted: list[WeightedRecord] = field(default_factory=list)
    cv: Optional[CrossValResult] = None
    metrics: dict = field(default_factory=dict)
    analysis_rows: list[AnalysisRow] = field(default_factory=list)
    stratified: list[CorrelationResult] = field(default_factory=list)
    stratified_skipped: list[tuple[str, str, int, str]] = field(default_factory=list)
    headline: list[CorrelationResult] = field(default_factory=list)
    artifacts: dict[str, Path] = field(default_factory=dict)

    def find_headline(
        self, x: str, y: str, controlled_for: Optional[str] = None,
        stratum: tuple[str, str] = ("all", "all"),
    ) -> Optional[CorrelationResult]:
        for res in self.headline:
            if (
                res.variables == (x, y)
                and res.controlled_for == controlled_for
                and res.stratum == stratum
            ):
                return res
        return None


def _register(result: PipelineResult, name: str, path: Path) -> Path:
    result.artifacts[name] = path
    return path


def stage_ingest(config: PipelineConfig, result: PipelineResult) -> list[ParagraphRecord]:
    if not Path(config.input_path).is_file():
        raise DataError(f"input file not found: {config.input_path}")
    records, errors = load_records(config.input_path)
    result.n_ingested = len(records)
    result.schema_errors = errors
    by_class: dict[str, int] = {}
    by_source: dict[str, int] = {}
    for r in records:
        by_class[r.class_label] = by_class.get(r.class_label, 0) + 1
        by_source[r.source_type] = by_source.get(r.source_type, 0) + 1
    write_json(
        _register(result, "ingest_report", result.out_dir / "ingest_report.json"),
        {
            "n_records": len(records),
            "n_schema_errors": len(errors),
            "by_class": by_class,
            "by_source_type": by_source,
            "errors": [
                {"line": e.line_no, "reason": e.reason, "field": e.field} for e in errors[:100]
            ],
        },
    )
    if errors:
        first = errors[0]
        raise DataError(
            f"{len(errors)} schema error(s) in {config.input_path}; "
            f"first at line {first.line_no}: {first.reason}"
        )
    if not records:
        raise DataError(f"no records in {config.input_path}")
    return records


def stage_filter(config: PipelineConfig, result: PipelineResult, records: list[ParagraphRecord]) -> list[ParagraphRecord]:
    records = dedupe_works(records)
    records = filter_min_length(records, config.min_words)
    guard = GuardrailConfig(
        length_consistency=config.length_consistency,
        align_threshold=config.align_threshold,
        align_percentile=config.align_percentile,
        align_on_missing=config.align_on_missing,
    )
    records, reports = apply_guardrails(records, guard)
    result.filter_reports = reports
    if not records:
        raise DataError("all records removed by filters")
    write_json(
        _register(result, "filter_report", result.out_dir / "filter_report.json"),
        {
            "filters": [
                {
                    "name": rep.name,
                    "n_in": rep.n_in,
                    "n_kept": rep.n_kept,
                    "n_dropped": rep.n_dropped,
                    "n_warnings": len(rep.warnings),
                }
                for rep in reports
            ],
            "warnings": [w for rep in reports for w in rep.warnings],
        },
    )
    write_csv(
        _register(result, "dropped_records", result.out_dir / "dropped_records.csv"),
        ("filter", "record_id", "reason"),
        [(rep.name, rid, reason) for rep in reports for rid, reason in rep.dropped],
    )
    write_records(records, _register(result, "records_filtered", result.out_dir / "records_filtered.ndjson"))
    return records


def _full_mode_summary(records: list[ParagraphRecord], bins) -> list[BinSummary]:
    n_orig = [0] * bins.n_bins
    n_trans = [0] * bins.n_bins
    for r in records:
        j = bins.bin_index(r.word_count)
        if r.class_label == "original":
            n_orig[j] += 1
        else:
            n_trans[j] += 1
    return [
        BinSummary(bins.label(j), n_orig[j], n_trans[j], n_trans[j]) for j in range(bins.n_bins)
    ]


def stage_sample(config: PipelineConfig, result: PipelineResult, records: list[ParagraphRecord]) -> list[ParagraphRecord]:
    original_counts = [r.word_count for r in records if r.class_label == "original"]
    if not original_counts:
        raise DataError("no original-class records; cannot derive length bins")
    if not any(r.class_label == "translated" for r in records):
        raise DataError("no translated records; nothing to classify")
    bins = compute_length_bins(original_counts, k=10)
    if config.sampling == "downsampled":
        records, summary = downsample_with_summary(
            records, bins, substream_seed(config.seed, "sampling")
        )
    else:
        summary = _full_mode_summary(records, bins)
    result.sampling_summary = summary
    write_csv(
        _register(result, "sampling_summary", result.out_dir / "sampling_summary.csv"),
        ("mode", "bin", "n_original", "n_translated_available", "n_translated_kept"),
        [
            (config.sampling, s.bin_label, s.n_original, s.n_translated_available, s.n_translated_kept)
            for s in summary
        ],
    )
    write_records(records, _register(result, "records_sampled", result.out_dir / "records_sampled.ndjson"))
    return records


def stage_train_cv(config: PipelineConfig, result: PipelineResult, records: list[ParagraphRecord]) -> CrossValResult:
    weighted = assign_sample_weights(records)
    result.weighted = weighted
    books = books_from_records(records)
    folds = make_folds(books, k=config.k_folds, seed=substream_seed(config.seed, "folds"))
    feature_config = FeatureConfig(
        weighting=config.weighting,
        n_min=config.n_min,
        n_max=config.n_max,
        max_features=config.max_features,
    )
    train_config = TrainConfig(
        C=config.C, max_iter=config.max_iter, tol=config.tol, class_weight=config.class_weight
    )
    cv = cross_val_oof(
        weighted,
        folds,
        feature_config,
        train_config,
        refit_features_per_fold=config.refit_features_per_fold,
    )
    result.cv = cv
    result.metrics = classifier_metrics(cv.y_true, cv.p_translated)

    write_csv(
        _register(result, "folds", result.out_dir / "folds.csv"),
        ("book_id", "fold"),
        sorted(folds.book_to_fold.items()),
    )
    models_dir = result.out_dir / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    for fr in cv.fold_results:
        path = models_dir / f"fold_{fr.fold:02d}.json"
        save_model(fr.model, fr.vocab_hash, path)
        _register(result, f"model_fold_{fr.fold:02d}", path)
    write_csv(
        _register(result, "folds_detail", result.out_dir / "folds_detail.csv"),
        ("fold", "n_train", "n_test", "converged", "n_iter", "final_objective", "vocab_sha256"),
        [
            (
                fr.fold, fr.n_train, fr.n_test, fr.model.converged, fr.model.n_iter,
                fr.model.final_objective, fr.vocab_hash,
            )
            for fr in cv.fold_results
        ],
    )
    write_csv(
        _register(result, "scores", result.out_dir / "scores.csv"),
        (
            "record_id", "book_id", "work_id", "class_label", "source_type", "source_lang",
            "word_count", "n_variants", "weight", "group_key", "fold", "p_translated",
            "fluency", "comet_kiwi", "align_sim",
        ),
        [
            (
                w.record.record_id, w.record.book_id, w.record.work_id, w.record.class_label,
                w.record.source_type, w.record.source_lang, w.record.word_count,
                w.record.n_variants, w.weight, group_key(w.record), int(cv.fold_index[i]),
                float(cv.p_translated[i]), float(cv.fluency[i]), w.record.comet_kiwi,
                w.record.align_sim,
            )
            for i, w in enumerate(weighted)
        ],
    )
    n_orig = int((cv.y_true == 0).sum())
    write_csv(
        _register(result, "metrics_summary", result.out_dir / "metrics_summary.csv"),
        ("n_records", "n_original", "n_translated", "k_folds", "accuracy", "macro_f1", "auc"),
        [
            (
                len(weighted), n_orig, len(weighted) - n_orig, folds.k,
                result.metrics["accuracy"], result.metrics["macro_f1"], result.metrics["auc"],
            )
        ],
    )
    return cv


def analysis_rows_from_cv(records: Sequence[ParagraphRecord], cv: CrossValResult) -> list[AnalysisRow]:
    rows = []
    for i, r in enumerate(records):
        if r.class_label != "translated" or r.comet_kiwi is None:
            continue
        rows.append(
            AnalysisRow(
                record_id=r.record_id,
                source_type=r.source_type,
                word_count=float(r.word_count),
                fluency=float(cv.fluency[i]),
                comet_kiwi=float(r.comet_kiwi),
                group_key=group_key(r),
                align_sim=r.align_sim,
            )
        )
    return rows


def analysis_rows_from_scores_csv(path: Path) -> list[AnalysisRow]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for line in csv.DictReader(fh):
            if line["class_label"] != "translated" or not line["comet_kiwi"]:
                continue
            rows.append(
                AnalysisRow(
                    record_id=line["record_id"],
                    source_type=line["source_type"],
                    word_count=float(line["word_count"]),
                    fluency=float(line["fluency"]),
                    comet_kiwi=float(line["comet_kiwi"]),
                    group_key=line["group_key"],
                    align_sim=float(line["align_sim"]) if line["align_sim"] else None,
                )
            )
    return rows


def stage_correlate(config: PipelineConfig, result: PipelineResult, rows: list[AnalysisRow]) -> None:
    result.analysis_rows = rows
    if len(rows) < 4:
        raise DataError(f"only {len(rows)} translated records carry comet_kiwi; need >= 4")
    stratified, skipped = stratified_analysis(rows, config.bins(), p_method=config.p_method)
    headline = headline_correlations(rows)
    result.stratified = stratified
    result.stratified_skipped = skipped
    result.headline = headline
    write_csv(
        _register(result, "correlations_stratified", result.out_dir / "correlations_stratified.csv"),
        ("source", "bin", "n", "rho", "p_value", "significant"),
        [
            (res.stratum[0], res.stratum[1], res.n, res.rho, res.p_value, res.significant)
            for res in stratified
        ],
    )
    write_csv(
        _register(result, "correlations_skipped", result.out_dir / "correlations_skipped.csv"),
        ("source", "bin", "n", "reason"),
        skipped,
    )
    write_csv(
        _register(result, "correlations_headline", result.out_dir / "correlations_headline.csv"),
        ("x", "y", "controlled_for", "source", "bin", "n", "rho", "p_value", "significant"),
        [
            (
                res.variables[0], res.variables[1], res.controlled_for, res.stratum[0],
                res.stratum[1], res.n, res.rho, res.p_value, res.significant,
            )
            for res in headline
        ],
    )


def write_manifest(config: PipelineConfig, result: PipelineResult) -> Path:
    artifacts = {
        name: sha256_file(path)
        for name, path in sorted(result.artifacts.items())
        if path.is_file()
    }
    manifest = {
        "format": RUN_FORMAT,
        "format_version": RUN_FORMAT_VERSION,
        "config": config_to_dict(config),
        "seed_substreams": {
            "sampling": substream_seed(config.seed, "sampling"),
            "folds": substream_seed(config.seed, "folds"),
        },
        "input_sha256": sha256_file(Path(config.input_path)),
        "artifacts": artifacts,
    }
    path = result.out_dir / "manifest.json"
    write_json(path, manifest)
    return path


def run_pipeline(config: PipelineConfig, stop_after: Optional[str] = None) -> PipelineResult:
    """Run all stages in order, writing artifacts under config.out_dir.

    stop_after names the last stage to run. Any failure writes a run_status.json
    marking which stage broke, so partial artifact sets are identifiable.
    """
    config = validate_config(config)
    if stop_after is not None and stop_after not in STAGES:
        raise ValueError(f"unknown stage {stop_after!r}; expected one of {STAGES}")
    if not Path(config.input_path).is_file():
        raise DataError(f"input file not found: {config.input_path}")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = PipelineResult(config=config, out_dir=out_dir)

    completed: list[str] = []
    records: list[ParagraphRecord] = []
    try:
        for stage in STAGES:
            if stage == "ingest":
                records = stage_ingest(config, result)
            elif stage == "filter":
                records = stage_filter(config, result, records)
            elif stage == "sample":
                records = stage_sample(config, result, records)
            elif stage == "train-cv":
                stage_train_cv(config, result, records)
            elif stage == "correlate":
                stage_correlate(config, result, analysis_rows_from_cv(records, result.cv))
            completed.append(stage)
            if stage == stop_after:
                break
    except DataError:
        _write_status(result, completed, failed=_next_stage(completed))
        raise
    except Exception as exc:
        stage = _next_stage(completed)
        _write_status(result, completed, failed=stage)
        raise StageError(stage, exc) from exc

    result.records = records
    write_manifest(config, result)
    _write_status(result, completed, failed=None)
    return result


def _next_stage(completed: list[str]) -> str:
    return STAGES[len(completed)] if len(completed) < len(STAGES) else STAGES[-1]


def _write_status(result: PipelineResult, completed: list[str], failed: Optional[str]) -> None:
    write_json(
        result.out_dir / "run_status.json",
        {
            "status": "ok" if failed is None else "failed",
            "stages_completed": completed,
            "failed_stage": failed,
        },
    )


GRID_CELLS = (
    ("tfidf", "downsampled"),
    ("tfidf", "full"),
    ("count", "downsampled"),
    ("count", "full"),
)


@dataclass(frozen=True)
class GridCell:
    weighting: str
    sampling: str
    n_records: int
    n_translated: int
    rho_length_fluency: float
    p_length_fluency: float
    rho_partial: float
    p_partial: float
    accuracy: float
    macro_f1: float
    auc: float


def run_variant_grid(
    config: PipelineConfig, cells: Sequence[tuple[str, str]] = GRID_CELLS
) -> tuple[list[GridCell], Path]:
    """One full pipeline run per (weighting, sampling) variant, summarized one row each.

    Each cell writes its artifacts under out_dir/grid/<weighting>-<sampling>/ and
    shares the base seed, so a single-cell grid reproduces a plain run exactly.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[GridCell] = []
    for weighting, sampling in cells:
        cell_config = replace(
            config,
            weighting=weighting,
            sampling=sampling,
            out_dir=str(out_dir / "grid" / f"{weighting}-{sampling}"),
        )
        result = run_pipeline(cell_config)
        length_fluency = result.find_headline("word_count", "fluency")
        partial = result.find_headline("fluency", "comet_kiwi", controlled_for="word_count")
        if length_fluency is None or partial is None:
            raise DataError(
                f"grid cell {weighting}/{sampling}: too little scored data for correlations"
            )
        n_translated = len(result.analysis_rows)
        rows.append(
            GridCell(
                weighting=weighting,
                sampling=sampling,
                n_records=len(result.weighted),
                n_translated=n_translated,
                rho_length_fluency=length_fluency.rho,
                p_length_fluency=length_fluency.p_value,
                rho_partial=partial.rho,
                p_partial=partial.p_value,
                accuracy=result.metrics["accuracy"],
                macro_f1=result.metrics["macro_f1"],
                auc=result.metrics["auc"],
            )
        )
    grid_path = out_dir / "grid.csv"
    write_csv(
        grid_path,
        (
            "weighting", "sampling", "n_records", "n_translated", "rho_length_fluency",
            "p_length_fluency", "rho_partial_fluency_comet", "p_partial", "accuracy",
            "macro_f1", "auc",
        ),
        [
            (
                c.weighting, c.sampling, c.n_records, c.n_translated, c.rho_length_fluency,
                c.p_length_fluency, c.rho_partial, c.p_partial, c.accuracy, c.macro_f1, c.auc,
            )
            for c in rows
        ],
    )
    return rows, grid_path
