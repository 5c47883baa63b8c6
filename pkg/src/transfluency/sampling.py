"""Length-binned downsampling against the original-English distribution and 1/n weighting."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from math import ceil

import numpy as np

from .corpus import ParagraphRecord


@dataclass(frozen=True)
class LengthBins:
    """Ascending word-count cut points; bin j covers (boundaries[j-1], boundaries[j]]."""

    boundaries: tuple[int, ...]

    @property
    def n_bins(self) -> int:
        return len(self.boundaries) + 1

    def bin_index(self, word_count: int) -> int:
        return bisect_left(self.boundaries, word_count)

    def label(self, index: int) -> str:
        if self.n_bins == 1:
            return "all"
        if index == 0:
            return f"<={self.boundaries[0]}"
        if index == len(self.boundaries):
            return f">{self.boundaries[-1]}"
        return f"{self.boundaries[index - 1] + 1}-{self.boundaries[index]}"


@dataclass(frozen=True)
class WeightedRecord:
    record: ParagraphRecord
    weight: float


@dataclass(frozen=True)
class BinSummary:
    bin_label: str
    n_original: int
    n_translated_available: int
    n_translated_kept: int


def compute_length_bins(original_word_counts: list[int], k: int = 10) -> LengthBins:
    """Cut points at the i/k empirical quantiles (value at index ceil(i*n/k)-1 of the sorted list).

    Duplicate quantile values are merged, and cut points at or above the maximum
    are dropped, so degenerate distributions yield fewer effective bins.
    """
    if not original_word_counts:
        raise ValueError("cannot derive length bins from an empty list")
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = sorted(original_word_counts)
    n = len(counts)
    cuts = []
    for i in range(1, k):
        cuts.append(counts[ceil(i * n / k) - 1])
    boundaries = tuple(sorted({c for c in cuts if c < counts[-1]}))
    return LengthBins(boundaries=boundaries)


def downsample_with_summary(
    records: list[ParagraphRecord], bins: LengthBins, seed: int
) -> tuple[list[ParagraphRecord], list[BinSummary]]:
    """Per bin, keep min(#original, #translated) translated records, sampled without replacement.

    Originals pass through unchanged. Selection is seeded and invariant to input
    order (candidates are sorted by record_id before drawing). Shortfall bins keep
    everything and show up in the summary.
    """
    n_original = [0] * bins.n_bins
    candidates: list[list[str]] = [[] for _ in range(bins.n_bins)]
    for r in records:
        b = bins.bin_index(r.word_count)
        if r.class_label == "original":
            n_original[b] += 1
        else:
            candidates[b].append(r.record_id)

    rng = np.random.default_rng(seed)
    kept_ids: set[str] = set()
    summary = []
    for b in range(bins.n_bins):
        cands = sorted(candidates[b])
        n_keep = min(n_original[b], len(cands))
        picks = rng.permutation(len(cands))[:n_keep]
        kept_ids.update(cands[i] for i in picks)
        summary.append(
            BinSummary(
                bin_label=bins.label(b),
                n_original=n_original[b],
                n_translated_available=len(cands),
                n_translated_kept=n_keep,
            )
        )

    kept = [r for r in records if r.class_label == "original" or r.record_id in kept_ids]
    return kept, summary


def downsample_translated(
    records: list[ParagraphRecord], bins: LengthBins, seed: int
) -> list[ParagraphRecord]:
    kept, _ = downsample_with_summary(records, bins, seed)
    return kept


def assign_sample_weights(records: list[ParagraphRecord]) -> list[WeightedRecord]:
    """Original paragraphs weigh 1; each translation weighs 1/n_variants."""
    out = []
    for r in records:
        if r.class_label == "original":
            out.append(WeightedRecord(r, 1.0))
        else:
            if r.n_variants < 1:
                raise ValueError(f"record {r.record_id}: n_variants must be >= 1")
            out.append(WeightedRecord(r, 1.0 / r.n_variants))
    return out
