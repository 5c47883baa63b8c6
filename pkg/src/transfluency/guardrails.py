"""Data-quality filters applied before training: length consistency and alignment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .corpus import ParagraphRecord

LENGTH_EXCESS_CHARS = 500  # llm output may exceed its google counterpart by at most this


@dataclass(frozen=True)
class FilterReport:
    name: str
    n_in: int
    n_kept: int
    dropped: tuple[tuple[str, str], ...] = ()  # (record_id, reason)
    warnings: tuple[str, ...] = ()

    @property
    def n_dropped(self) -> int:
        return self.n_in - self.n_kept


def length_consistency_filter(
    records: Sequence[ParagraphRecord],
) -> tuple[list[ParagraphRecord], FilterReport]:
    """Drop llm paragraphs that run more than LENGTH_EXCESS_CHARS characters past
    the google translation of the same source paragraph.

    Pairing is by (book_id, source_text). An llm record with no google
    counterpart is kept, with a warning. Strict inequality: an excess of
    exactly LENGTH_EXCESS_CHARS survives.
    """
    google_len: dict[tuple[str, str], int] = {}
    for r in records:
        if r.source_type == "google":
            key = (r.book_id, r.source_text)
            prev = google_len.get(key)
            n = len(r.english_text)
            google_len[key] = n if prev is None else min(prev, n)
    kept: list[ParagraphRecord] = []
    dropped: list[tuple[str, str]] = []
    warnings: list[str] = []
    for r in records:
        if r.source_type != "llm":
            kept.append(r)
            continue
        key = (r.book_id, r.source_text)
        if key not in google_len:
            warnings.append(f"{r.record_id}: no google counterpart, kept")
            kept.append(r)
            continue
        excess = len(r.english_text) - google_len[key]
        if excess > LENGTH_EXCESS_CHARS:
            dropped.append((r.record_id, f"length excess {excess} chars"))
        else:
            kept.append(r)
    report = FilterReport(
        name="length-consistency",
        n_in=len(records),
        n_kept=len(kept),
        dropped=tuple(dropped),
        warnings=tuple(warnings),
    )
    return kept, report


def alignment_filter(
    records: Sequence[ParagraphRecord],
    threshold: Optional[float] = None,
    percentile: Optional[float] = None,
    on_missing: str = "error",
) -> tuple[list[ParagraphRecord], FilterReport]:
    """Drop poorly aligned translated paragraphs; originals always pass through.

    Exactly one of threshold (absolute: drop align_sim < threshold) or
    percentile (drop the floor(q * n) lowest-aligned translated records, ties
    broken by record_id) must be given. Translated records missing align_sim
    raise by default; on_missing='drop' removes them instead.
    """
    if (threshold is None) == (percentile is None):
        raise ValueError("give exactly one of threshold or percentile")
    if percentile is not None and not (0.0 <= percentile < 1.0):
        raise ValueError(f"percentile must be in [0, 1), got {percentile}")
    if on_missing not in ("error", "drop"):
        raise ValueError(f"on_missing must be 'error' or 'drop', got {on_missing!r}")

    dropped: list[tuple[str, str]] = []
    translated: list[ParagraphRecord] = []
    passthrough: list[ParagraphRecord] = []
    for r in records:
        if r.class_label == "original":
            passthrough.append(r)
        elif r.align_sim is None:
            if on_missing == "error":
                raise ValueError(f"record {r.record_id!r}: align_sim missing")
            dropped.append((r.record_id, "align_sim missing"))
        else:
            translated.append(r)

    drop_ids: set[str] = set()
    if threshold is not None:
        for r in translated:
            if r.align_sim < threshold:
                drop_ids.add(r.record_id)
                dropped.append((r.record_id, f"align_sim {r.align_sim!r} < {threshold!r}"))
    else:
        n_drop = int(percentile * len(translated))
        ranked = sorted(translated, key=lambda r: (r.align_sim, r.record_id))
        for r in ranked[:n_drop]:
            drop_ids.add(r.record_id)
            dropped.append((r.record_id, f"align_sim {r.align_sim!r} in lowest {percentile:g}"))

    kept = [r for r in records if r.class_label == "original" or (
        r.align_sim is not None and r.record_id not in drop_ids)]
    report = FilterReport(
        name="alignment",
        n_in=len(records),
        n_kept=len(kept),
        dropped=tuple(dropped),
    )
    return kept, report


@dataclass(frozen=True)
class GuardrailConfig:
    length_consistency: bool = True
    align_threshold: Optional[float] = None
    align_percentile: Optional[float] = None
    align_on_missing: str = "error"

    @property
    def alignment_enabled(self) -> bool:
        return self.align_threshold is not None or self.align_percentile is not None


def apply_guardrails(
    records: Sequence[ParagraphRecord], config: GuardrailConfig = GuardrailConfig()
) -> tuple[list[ParagraphRecord], list[FilterReport]]:
    """Length-consistency filter first, then the alignment filter."""
    reports: list[FilterReport] = []
    out = list(records)
    if config.length_consistency:
        out, report = length_consistency_filter(out)
        reports.append(report)
    if config.alignment_enabled:
        out, report = alignment_filter(
            out,
            threshold=config.align_threshold,
            percentile=config.align_percentile,
            on_missing=config.align_on_missing,
        )
        reports.append(report)
    return out, reports
