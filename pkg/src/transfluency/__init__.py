"""Fluency scoring for literary translation: a POS-n-gram original-vs-translated
classifier, length-matched sampling, book-grouped cross-validation, and
length-controlled rank correlation against adequacy scores."""

from .classifier import TrainConfig, TrainedModel, fluency, load_model, save_model, train
from .config import ConfigError, PipelineConfig, load_config, parse_config
from .corpus import ParagraphRecord, SchemaError, load_records, parse_records, write_records
from .evaluation import classifier_metrics, cross_val_oof, make_folds
from .features import FeatureConfig, build_vocabulary, extract_ngrams, fit_idf, vectorize_corpus
from .guardrails import alignment_filter, apply_guardrails, length_consistency_filter
from .pipeline import DataError, StageError, run_pipeline, run_variant_grid
from .sampling import assign_sample_weights, compute_length_bins, downsample_translated
from .stats import AnalysisBins, CorrelationResult, partial_spearman, spearman, stratified_analysis

__version__ = "0.1.0"

__all__ = [
    "AnalysisBins",
    "ConfigError",
    "CorrelationResult",
    "DataError",
    "FeatureConfig",
    "ParagraphRecord",
    "PipelineConfig",
    "SchemaError",
    "StageError",
    "TrainConfig",
    "TrainedModel",
    "alignment_filter",
    "apply_guardrails",
    "assign_sample_weights",
    "build_vocabulary",
    "classifier_metrics",
    "compute_length_bins",
    "cross_val_oof",
    "downsample_translated",
    "extract_ngrams",
    "fit_idf",
    "fluency",
    "length_consistency_filter",
    "load_config",
    "load_model",
    "load_records",
    "make_folds",
    "parse_config",
    "parse_records",
    "partial_spearman",
    "run_pipeline",
    "run_variant_grid",
    "save_model",
    "spearman",
    "stratified_analysis",
    "train",
    "vectorize_corpus",
    "write_records",
    "__version__",
]
