"""Flat key=value pipeline configuration: parsing, validation, round-trip."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Union, get_args, get_origin

from .stats import AnalysisBins

SAMPLING_MODES = ("downsampled", "full")


class ConfigError(Exception):
    """Invalid configuration: unknown key, bad value, or inconsistent settings."""


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str = ""
    out_dir: str = ""
    seed: int = 0
    min_words: int = 20
    sampling: str = "downsampled"
    weighting: str = "tfidf"
    n_min: int = 1
    n_max: int = 3
    max_features: int = 20000
    C: float = 10.0
    max_iter: int = 2000
    tol: float = 1e-6
    k_folds: int = 10
    class_weight: str = "balanced"
    length_consistency: bool = True
    align_threshold: Optional[float] = None
    align_percentile: Optional[float] = 0.02
    align_on_missing: str = "error"
    analysis_bins: str = "20-30,31-60,61-100,101+"
    p_method: str = "t"
    n_permutations: int = 1000
    refit_features_per_fold: bool = True

    def bins(self) -> AnalysisBins:
        return AnalysisBins.from_spec(self.analysis_bins)


def validate_config(config: PipelineConfig) -> PipelineConfig:
    if not config.input_path:
        raise ConfigError("input_path is required")
    if not config.out_dir:
        raise ConfigError("out_dir is required")
    if config.sampling not in SAMPLING_MODES:
        raise ConfigError(f"sampling must be one of {SAMPLING_MODES}, got {config.sampling!r}")
    if config.weighting not in ("tfidf", "count"):
        raise ConfigError(f"weighting must be 'tfidf' or 'count', got {config.weighting!r}")
    if config.n_min < 1 or config.n_max < config.n_min:
        raise ConfigError(f"bad n-gram range [{config.n_min}, {config.n_max}]")
    if config.max_features < 1:
        raise ConfigError("max_features must be >= 1")
    if config.C <= 0:
        raise ConfigError("C must be positive")
    if config.max_iter < 1:
        raise ConfigError("max_iter must be >= 1")
    if config.tol <= 0:
        raise ConfigError("tol must be positive")
    if config.k_folds < 2:
        raise ConfigError("k_folds must be >= 2")
    if config.min_words < 0:
        raise ConfigError("min_words must be >= 0")
    if config.class_weight not in ("balanced", "none"):
        raise ConfigError(f"class_weight must be 'balanced' or 'none', got {config.class_weight!r}")
    if config.align_threshold is not None and config.align_percentile is not None:
        raise ConfigError("set at most one of align_threshold and align_percentile")
    if config.align_percentile is not None and not (0.0 <= config.align_percentile < 1.0):
        raise ConfigError("align_percentile must be in [0, 1)")
    if config.align_on_missing not in ("error", "drop"):
        raise ConfigError("align_on_missing must be 'error' or 'drop'")
    if config.p_method not in ("t", "permutation"):
        raise ConfigError("p_method must be 't' or 'permutation'")
    if config.n_permutations < 1:
        raise ConfigError("n_permutations must be >= 1")
    try:
        config.bins()
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"bad analysis_bins {config.analysis_bins!r}: {exc}") from exc
    return config


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(key: str, raw: str):
    ann = _FIELD_TYPES[key]
    optional = False
    base = ann
    if isinstance(ann, str):
        optional = "Optional" in ann
        base = ann.replace("Optional[", "").rstrip("]")
    elif get_origin(ann) is Union:
        args = [a for a in get_args(ann) if a is not type(None)]
        optional = len(args) < len(get_args(ann))
        base = args[0].__name__
    else:
        base = ann.__name__
    if optional and raw.lower() in ("none", ""):
        return None
    if base == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"key {key!r}: expected a boolean, got {raw!r}")
    try:
        if base == "int":
            return int(raw)
        if base == "float":
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: {exc}") from exc
    return raw


def parse_config(text: str, overrides: Optional[dict] = None) -> PipelineConfig:
    """Parse 'key = value' lines; '#' starts a comment; later keys win."""
    values: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    config = PipelineConfig(**values)
    if overrides:
        config = replace(config, **overrides)
    return validate_config(config)


def load_config(path: Union[str, Path], overrides: Optional[dict] = None) -> PipelineConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text, overrides)


def config_to_text(config: PipelineConfig) -> str:
    """Serialize back to the flat format; parse(config_to_text(c)) == c."""
    lines = []
    for f in fields(PipelineConfig):
        v = getattr(config, f.name)
        if v is None:
            rendered = "none"
        elif isinstance(v, bool):
            rendered = "true" if v else "false"
        elif isinstance(v, float):
            rendered = repr(v)
        else:
            rendered = str(v)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def config_to_dict(config: PipelineConfig) -> dict:
    return {f.name: getattr(config, f.name) for f in fields(PipelineConfig)}
