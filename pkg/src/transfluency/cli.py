"""Command-line interface: stage subcommands over a flat key=value config.

Exit codes: 0 success, 1 config error, 2 data error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, PipelineConfig, load_config
from .corpus import load_records
from .pipeline import (
    DataError,
    PipelineResult,
    StageError,
    analysis_rows_from_scores_csv,
    run_pipeline,
    run_variant_grid,
    stage_correlate,
    stage_filter,
    stage_ingest,
    stage_sample,
    stage_train_cv,
    STAGES,
)
from .plots import render_report

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_STAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="transfluency", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, config_required: bool = True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=config_required, help="flat key=value config file")
        p.add_argument("--out", help="override out_dir")
        p.add_argument("--seed", type=int, help="override seed")
        return p

    add("ingest-check", "validate the input file against the record schema")
    add("filter", "ingest, dedupe works, apply min-length and guardrail filters")
    add("sample", "length-bin downsampling over the filtered records")
    add("train-cv", "book-grouped cross-validation over the sampled records")
    add("correlate", "correlation tables over the per-record scores")
    add("grid", "run the four classifier variants and summarize one row each")
    run_p = add("run", "run the whole pipeline")
    run_p.add_argument("--stage", choices=STAGES, help="stop after this stage")
    report_p = add("report", "render figures from the emitted CSV files", config_required=False)
    report_p.set_defaults(config=None)
    return parser


def _load(args) -> PipelineConfig:
    overrides = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    return load_config(args.config, overrides)


def _result_for(config: PipelineConfig) -> PipelineResult:
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return PipelineResult(config=config, out_dir=out_dir)


def _guard(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DataError, ConfigError, StageError):
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc


def _load_artifact_records(path: Path, producer: str):
    if not path.is_file():
        raise DataError(f"{path} not found; run the {producer!r} stage first")
    records, errors = load_records(path)
    if errors:
        raise DataError(f"{path} is corrupt: line {errors[0].line_no}: {errors[0].reason}")
    return records


def cmd_ingest_check(args) -> int:
    config = _load(args)
    result = _result_for(config)
    try:
        records = _guard("ingest", stage_ingest, config, result)
    except DataError as exc:
        print(f"schema check failed: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"ok: {len(records)} records, 0 schema errors")
    print(f"report: {result.artifacts['ingest_report']}")
    return EXIT_OK


def cmd_filter(args) -> int:
    config = _load(args)
    result = _result_for(config)
    records = _guard("ingest", stage_ingest, config, result)
    records = _guard("filter", stage_filter, config, result, records)
    for rep in result.filter_reports:
        print(f"{rep.name}: {rep.n_in} in, {rep.n_kept} kept, {rep.n_dropped} dropped")
    print(f"filtered records: {result.artifacts['records_filtered']}")
    return EXIT_OK


def cmd_sample(args) -> int:
    config = _load(args)
    result = _result_for(config)
    records = _load_artifact_records(result.out_dir / "records_filtered.ndjson", "filter")
    records = _guard("sample", stage_sample, config, result, records)
    for s in result.sampling_summary:
        print(
            f"bin {s.bin_label}: {s.n_original} original, "
            f"{s.n_translated_kept}/{s.n_translated_available} translated kept"
        )
    print(f"sampled records: {result.artifacts['records_sampled']}")
    return EXIT_OK


def cmd_train_cv(args) -> int:
    config = _load(args)
    result = _result_for(config)
    records = _load_artifact_records(result.out_dir / "records_sampled.ndjson", "sample")
    _guard("train-cv", stage_train_cv, config, result, records)
    m = result.metrics
    print(
        f"cv over {len(records)} records, {config.k_folds} folds: "
        f"accuracy {m['accuracy']:.4f}, macro-F1 {m['macro_f1']:.4f}, AUC {m['auc']:.4f}"
    )
    print(f"scores: {result.artifacts['scores']}")
    return EXIT_OK


def cmd_correlate(args) -> int:
    config = _load(args)
    result = _result_for(config)
    scores_path = result.out_dir / "scores.csv"
    if not scores_path.is_file():
        raise DataError(f"{scores_path} not found; run the 'train-cv' stage first")
    rows = _guard("correlate", analysis_rows_from_scores_csv, scores_path)
    _guard("correlate", stage_correlate, config, result, rows)
    partial = result.find_headline("fluency", "comet_kiwi", controlled_for="word_count")
    if partial is not None:
        print(
            f"partial rho(fluency, adequacy | length) = {partial.rho:+.4f} "
            f"(p = {partial.p_value:.3g}, n = {partial.n})"
        )
    print(f"tables: {result.artifacts['correlations_stratified']}")
    return EXIT_OK


def cmd_grid(args) -> int:
    config = _load(args)
    cells, grid_path = run_variant_grid(config)
    for c in cells:
        print(
            f"{c.weighting:6s} {c.sampling:12s} n={c.n_translated:6d} "
            f"length-fluency rho {c.rho_length_fluency:+.4f}  partial rho {c.rho_partial:+.4f}"
        )
    print(f"grid: {grid_path}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _load(args)
    result = run_pipeline(config, stop_after=args.stage)
    if result.metrics:
        m = result.metrics
        print(
            f"classifier: accuracy {m['accuracy']:.4f}, "
            f"macro-F1 {m['macro_f1']:.4f}, AUC {m['auc']:.4f}"
        )
    partial = result.find_headline("fluency", "comet_kiwi", controlled_for="word_count")
    if partial is not None:
        print(
            f"partial rho(fluency, adequacy | length) = {partial.rho:+.4f} "
            f"(p = {partial.p_value:.3g}, n = {partial.n})"
        )
    print(f"artifacts: {result.out_dir}")
    return EXIT_OK


def cmd_report(args) -> int:
    if args.config is None and args.out is None:
        raise ConfigError("report needs --config or --out to locate the artifact directory")
    out_dir = Path(args.out) if args.out else Path(_load(args).out_dir)
    if not out_dir.is_dir():
        raise DataError(f"artifact directory not found: {out_dir}")
    written = _guard("report", render_report, out_dir)
    if not written:
        raise DataError(f"no renderable CSV artifacts in {out_dir}; run the pipeline first")
    for path in written:
        print(f"figure: {path}")
    return EXIT_OK


_COMMANDS = {
    "ingest-check": cmd_ingest_check,
    "filter": cmd_filter,
    "sample": cmd_sample,
    "train-cv": cmd_train_cv,
    "correlate": cmd_correlate,
    "grid": cmd_grid,
    "run": cmd_run,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE


if __name__ == "__main__":
    sys.exit(main())
