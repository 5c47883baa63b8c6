"""End-to-end pipeline tests on the bundled synthetic corpus."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest

from transfluency.config import PipelineConfig, validate_config
from transfluency.pipeline import (
    STAGES,
    DataError,
    StageError,
    analysis_rows_from_scores_csv,
    group_key,
    run_pipeline,
    run_variant_grid,
    sha256_file,
    substream_seed,
    write_csv,
)

from conftest import make_record

FIXTURE = Path(__file__).parent / "fixtures" / "corpus_small.ndjson"


def config_for(tmp_path, **overrides) -> PipelineConfig:
    fields = dict(
        input_path=str(FIXTURE),
        out_dir=str(tmp_path / "out"),
        seed=3,
        max_iter=200,
        tol=1e-5,
    )
    fields.update(overrides)
    return validate_config(PipelineConfig(**fields))


class TestSubstreamSeed:
    def test_matches_definition(self):
        digest = hashlib.sha256(b"7:folds").digest()
        assert substream_seed(7, "folds") == int.from_bytes(digest[:8], "big")

    def test_distinct_across_names_and_seeds(self):
        assert substream_seed(0, "sampling") != substream_seed(0, "folds")
        assert substream_seed(0, "folds") != substream_seed(1, "folds")

    def test_stable(self):
        assert substream_seed(3, "sampling") == substream_seed(3, "sampling")


class TestGroupKey:
    def test_shared_by_variants(self):
        a = make_record(record_id="x:1", source_type="human", source_text="s")
        b = make_record(record_id="x:2", source_type="llm", source_text="s")
        assert group_key(a) == group_key(b)
        assert len(group_key(a)) == 16

    def test_differs_across_books(self):
        a = make_record(book_id="b1", source_text="s")
        b = make_record(book_id="b2", source_text="s")
        assert group_key(a) != group_key(b)


class TestWriteCsv:
    def test_cell_rendering(self, tmp_path):
        path = tmp_path / "t.csv"
        write_csv(path, ("a", "b", "c", "d"), [(0.1, None, True, 1e-06)])
        assert path.read_text() == "a,b,c,d\n0.1,,true,1e-06\n"


@pytest.fixture(scope="module")
def completed(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("run")
    config = config_for(tmp)
    return config, run_pipeline(config)


EXPECTED_ARTIFACTS = {
    "ingest_report.json", "filter_report.json", "dropped_records.csv",
    "records_filtered.ndjson", "sampling_summary.csv", "records_sampled.ndjson",
    "folds.csv", "folds_detail.csv", "scores.csv", "metrics_summary.csv",
    "correlations_stratified.csv", "correlations_skipped.csv",
    "correlations_headline.csv", "manifest.json", "run_status.json",
}


class TestFullRun:
    def test_all_artifacts_written(self, completed):
        config, result = completed
        out = Path(config.out_dir)
        names = {p.name for p in out.iterdir() if p.is_file()}
        assert EXPECTED_ARTIFACTS <= names

    def test_status_reports_success(self, completed):
        config, _ = completed
        status = json.loads((Path(config.out_dir) / "run_status.json").read_text())
        assert status == {
            "status": "ok",
            "stages_completed": list(STAGES),
            "failed_stage": None,
        }

    def test_manifest_hashes_verify(self, completed):
        config, result = completed
        manifest = json.loads((Path(config.out_dir) / "manifest.json").read_text())
        assert manifest["input_sha256"] == sha256_file(FIXTURE)
        assert manifest["seed_substreams"] == {
            "sampling": substream_seed(config.seed, "sampling"),
            "folds": substream_seed(config.seed, "folds"),
        }
        for name, digest in manifest["artifacts"].items():
            assert sha256_file(result.artifacts[name]) == digest

    def test_metrics_present_and_bounded(self, completed):
        _, result = completed
        assert set(result.metrics) == {"accuracy", "macro_f1", "auc"}
        for v in result.metrics.values():
            assert 0.0 <= v <= 1.0

    def test_analysis_rows_round_trip_through_scores_csv(self, completed):
        _, result = completed
        reread = analysis_rows_from_scores_csv(result.artifacts["scores"])
        assert reread == result.analysis_rows

    def test_downsampling_never_exceeds_available(self, completed):
        _, result = completed
        for s in result.sampling_summary:
            assert s.n_translated_kept <= s.n_translated_available
            assert s.n_translated_kept <= s.n_original

    def test_stratified_table_well_formed(self, completed):
        _, result = completed
        for res in result.stratified:
            assert res.n >= 4
            assert -1.0 <= res.rho <= 1.0
        for source, bin_label, n, reason in result.stratified_skipped:
            assert n < 4 and reason == "n < 4"


class TestDeterminism:
    def test_reruns_are_byte_identical(self, tmp_path, completed):
        config_a, _ = completed
        config_b = config_for(tmp_path)
        run_pipeline(config_b)
        out_a, out_b = Path(config_a.out_dir), Path(config_b.out_dir)
        compared = 0
        for path_a in sorted(out_a.iterdir()):
            if path_a.suffix not in (".csv", ".ndjson"):
                continue  # manifest embeds out_dir; data artifacts must match
            path_b = out_b / path_a.name
            assert path_b.read_bytes() == path_a.read_bytes(), path_a.name
            compared += 1
        assert compared >= 10

    def test_seed_changes_sampling(self, tmp_path):
        a = run_pipeline(config_for(tmp_path / "a", seed=1, out_dir=str(tmp_path / "a/out")))
        b = run_pipeline(config_for(tmp_path / "b", seed=2, out_dir=str(tmp_path / "b/out")))
        ids_a = [r.record_id for r in a.records]
        ids_b = [r.record_id for r in b.records]
        assert ids_a != ids_b


class TestStopAfter:
    def test_stops_and_reports(self, tmp_path):
        config = config_for(tmp_path)
        result = run_pipeline(config, stop_after="sample")
        out = Path(config.out_dir)
        status = json.loads((out / "run_status.json").read_text())
        assert status["stages_completed"] == ["ingest", "filter", "sample"]
        assert (out / "records_sampled.ndjson").is_file()
        assert not (out / "scores.csv").exists()
        assert result.cv is None

    def test_unknown_stage_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="unknown stage"):
            run_pipeline(config_for(tmp_path), stop_after="train")


class TestFailureHandling:
    def test_missing_input_is_data_error(self, tmp_path):
        config = config_for(tmp_path, input_path=str(tmp_path / "absent.ndjson"))
        with pytest.raises(DataError, match="not found"):
            run_pipeline(config)

    def test_filter_wipeout_writes_failed_status(self, tmp_path):
        config = config_for(tmp_path, min_words=10**6)
        with pytest.raises(DataError):
            run_pipeline(config)
        status = json.loads((Path(config.out_dir) / "run_status.json").read_text())
        assert status["status"] == "failed"
        assert status["failed_stage"] == "filter"
        assert status["stages_completed"] == ["ingest"]

    def test_internal_failure_wrapped_with_stage(self, tmp_path):
        # more folds than books: make_folds raises inside train-cv
        config = config_for(tmp_path, k_folds=50)
        with pytest.raises(StageError) as excinfo:
            run_pipeline(config)
        assert excinfo.value.stage == "train-cv"
        status = json.loads((Path(config.out_dir) / "run_status.json").read_text())
        assert status["failed_stage"] == "train-cv"


class TestFullSamplingMode:
    def test_full_mode_keeps_everything(self, tmp_path):
        config = config_for(tmp_path, sampling="full")
        result = run_pipeline(config, stop_after="sample")
        for s in result.sampling_summary:
            assert s.n_translated_kept == s.n_translated_available
        text = (Path(config.out_dir) / "sampling_summary.csv").read_text()
        assert "full," in text


class TestVariantGrid:
    def test_single_cell_reproduces_plain_run(self, tmp_path, completed):
        config_plain, _ = completed
        grid_config = config_for(tmp_path)
        cells, grid_path = run_variant_grid(
            grid_config, cells=[("tfidf", "downsampled")]
        )
        assert len(cells) == 1
        cell_scores = Path(grid_config.out_dir) / "grid" / "tfidf-downsampled" / "scores.csv"
        plain_scores = Path(config_plain.out_dir) / "scores.csv"
        assert cell_scores.read_bytes() == plain_scores.read_bytes()
        header = grid_path.read_text().splitlines()
        assert len(header) == 2  # header plus one cell row

    def test_cell_summary_bounded(self, tmp_path):
        config = config_for(tmp_path)
        cells, _ = run_variant_grid(config, cells=[("count", "full")])
        cell = cells[0]
        assert abs(cell.rho_length_fluency) <= 1.0
        assert abs(cell.rho_partial) <= 1.0
        assert 0.0 <= cell.auc <= 1.0
        assert cell.n_translated <= cell.n_records
