"""Rank statistics: Spearman, length-controlled partial Spearman, stratified tables."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.special import stdtr

SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int
    variables: tuple[str, str]
    controlled_for: Optional[str] = None
    stratum: Optional[tuple[str, str]] = None
    note: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.note is None

    @property
    def significant(self) -> bool:
        return self.defined and self.p_value < SIGNIFICANCE_LEVEL


@dataclass(frozen=True)
class AnalysisBins:
    """Disjoint ascending word-count intervals; upper bound None means unbounded."""

    intervals: tuple[tuple[int, Optional[int]], ...] = ((20, 30), (31, 60), (61, 100), (101, None))

    def __post_init__(self):
        prev_hi = None
        for lo, hi in self.intervals:
            if hi is not None and hi < lo:
                raise ValueError(f"empty interval [{lo}, {hi}]")
            if prev_hi is not None and lo != prev_hi + 1:
                raise ValueError("intervals must be ascending and contiguous")
            prev_hi = hi
        if self.intervals and self.intervals[-1][1] is not None:
            raise ValueError("last interval must be unbounded")

    def labels(self) -> list[str]:
        return [f"{lo}-{hi}" if hi is not None else f"{lo}+" for lo, hi in self.intervals]

    def bin_of(self, word_count: float) -> Optional[int]:
        """Index of the covering interval, or None below the first bound.

        On the real line bin i spans [lo_i, lo_{i+1}), so fractional word counts
        (pooled rows average them) cannot fall between adjacent integer bins.
        """
        for i, (lo, _) in enumerate(self.intervals):
            nxt = self.intervals[i + 1][0] if i + 1 < len(self.intervals) else None
            if word_count >= lo and (nxt is None or word_count < nxt):
                return i
        return None

    @classmethod
    def from_spec(cls, spec: str) -> "AnalysisBins":
        """Parse e.g. '20-30,31-60,61-100,101+'."""
        intervals = []
        for part in spec.split(","):
            part = part.strip()
            if part.endswith("+"):
                intervals.append((int(part[:-1]), None))
            else:
                lo, hi = part.split("-")
                intervals.append((int(lo), int(hi)))
        return cls(intervals=tuple(intervals))


def rankdata(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties averaged (fractional ranks)."""
    a = np.asarray(values, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError("rankdata expects a 1-D sequence")
    if not np.all(np.isfinite(a)):
        raise ValueError("rankdata requires finite values")
    n = len(a)
    order = np.argsort(a, kind="mergesort")
    sorted_a = a[order]
    # group start positions, plus end sentinel, in 0-based sorted coordinates
    starts = np.flatnonzero(np.r_[True, sorted_a[1:] != sorted_a[:-1]])
    bounds = np.r_[starts, n]
    avg = (bounds[:-1] + bounds[1:] + 1) / 2.0  # mean of 1-based positions per tie group
    ranks_sorted = np.repeat(avg, np.diff(bounds))
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = ranks_sorted
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(np.dot(xc, xc) * np.dot(yc, yc))
    if denom == 0:
        return np.nan
    return float(np.clip(np.dot(xc, yc) / denom, -1.0, 1.0))


def _t_two_sided_p(rho: float, df: int) -> float:
    if df < 1:
        return np.nan
    if abs(rho) >= 1.0:
        return 0.0
    t = abs(rho) * np.sqrt(df / (1.0 - rho * rho))
    return float(2.0 * stdtr(df, -t))


def spearman(
    x: Sequence[float],
    y: Sequence[float],
    x_name: str = "x",
    y_name: str = "y",
    p_method: str = "t",
    n_permutations: int = 1000,
    seed: int = 0,
) -> CorrelationResult:
    """Pearson correlation of fractional ranks; two-sided p by t approximation.

    p_method='permutation' runs a seeded permutation test instead, for small strata.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise ValueError("x and y must have equal length")
    n = len(x)
    if n < 3:
        raise ValueError("spearman needs at least 3 observations")
    rx, ry = rankdata(x), rankdata(y)
    rho = _pearson(rx, ry)
    if np.isnan(rho):
        return CorrelationResult(np.nan, np.nan, n, (x_name, y_name), note="zero variance in ranks")
    if p_method == "permutation":
        p = _permutation_p(rx, ry, rho, n_permutations, seed)
    else:
        p = _t_two_sided_p(rho, n - 2)
    return CorrelationResult(rho, p, n, (x_name, y_name))


def _permutation_p(rx, ry, rho_obs, n_permutations, seed) -> float:
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(n_permutations):
        rho_p = _pearson(rx, ry[rng.permutation(len(ry))])
        if not np.isnan(rho_p) and abs(rho_p) >= abs(rho_obs) - 1e-15:
            hits += 1
    return (1 + hits) / (n_permutations + 1)


def partial_spearman(
    x: Sequence[float],
    y: Sequence[float],
    z: Sequence[float],
    x_name: str = "x",
    y_name: str = "y",
    z_name: str = "z",
    p_method: str = "t",
    n_permutations: int = 1000,
    seed: int = 0,
) -> CorrelationResult:
    """Rank correlation of x and y after removing the rank-linear effect of z.

    Computed with the three-correlation identity on rank-Pearson correlations;
    algebraically identical to residualizing ranks of x and y on ranks of z.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if not (len(x) == len(y) == len(z)):
        raise ValueError("x, y, z must have equal length")
    n = len(x)
    if n < 4:
        raise ValueError("partial_spearman needs at least 4 observations")
    rx, ry, rz = rankdata(x), rankdata(y), rankdata(z)
    r_xy, r_xz, r_yz = _pearson(rx, ry), _pearson(rx, rz), _pearson(ry, rz)
    if np.isnan(r_xy) or np.isnan(r_xz) or np.isnan(r_yz):
        return CorrelationResult(
            np.nan, np.nan, n, (x_name, y_name), controlled_for=z_name, note="zero variance in ranks"
        )
    if abs(r_xz) >= 1.0 or abs(r_yz) >= 1.0:
        return CorrelationResult(
            np.nan, np.nan, n, (x_name, y_name), controlled_for=z_name, note="degenerate control variable"
        )
    rho = (r_xy - r_xz * r_yz) / np.sqrt((1.0 - r_xz**2) * (1.0 - r_yz**2))
    rho = float(np.clip(rho, -1.0, 1.0))
    if p_method == "permutation":
        rng = np.random.default_rng(seed)
        hits = 0
        for _ in range(n_permutations):
            perm = rng.permutation(n)
            r_xy_p, r_yz_p = _pearson(rx, ry[perm]), _pearson(ry[perm], rz)
            if abs(r_xz) >= 1.0 or abs(r_yz_p) >= 1.0 or np.isnan(r_xy_p) or np.isnan(r_yz_p):
                continue
            rho_p = (r_xy_p - r_xz * r_yz_p) / np.sqrt((1.0 - r_xz**2) * (1.0 - r_yz_p**2))
            if abs(rho_p) >= abs(rho) - 1e-15:
                hits += 1
        p = (1 + hits) / (n_permutations + 1)
    else:
        p = _t_two_sided_p(rho, n - 3)
    return CorrelationResult(rho, p, n, (x_name, y_name), controlled_for=z_name)


@dataclass(frozen=True)
class AnalysisRow:
    """One translated paragraph carrying everything the correlation analyses need."""

    record_id: str
    source_type: str
    word_count: float
    fluency: float
    comet_kiwi: float
    group_key: str = ""  # shared source-paragraph key, for pooling human variants
    align_sim: Optional[float] = None


def pool_human_rows(rows: Sequence[AnalysisRow]) -> list[AnalysisRow]:
    """Average human variants of the same source paragraph into one observation."""
    groups: dict[str, list[AnalysisRow]] = {}
    for r in rows:
        if r.source_type == "human":
            groups.setdefault(r.group_key or r.record_id, []).append(r)
    pooled = []
    for key in sorted(groups):
        members = groups[key]
        pooled.append(
            AnalysisRow(
                record_id=f"pooled:{key}",
                source_type="pooled-human",
                word_count=float(np.mean([m.word_count for m in members])),
                fluency=float(np.mean([m.fluency for m in members])),
                comet_kiwi=float(np.mean([m.comet_kiwi for m in members])),
                group_key=key,
            )
        )
    return pooled


STRATA_ORDER = ("all", "human", "pooled-human", "google", "llm")


def stratified_analysis(
    rows: Sequence[AnalysisRow],
    bins: AnalysisBins = AnalysisBins(),
    p_method: str = "t",
) -> tuple[list[CorrelationResult], list[tuple[str, str, int, str]]]:
    """Length-controlled partial Spearman (fluency vs adequacy) per source and length bin.

    Returns the result table and a list of skipped strata (source, bin, n, reason).
    Strata with fewer than 4 observations are skipped, not errored.
    """
    by_source: dict[str, list[AnalysisRow]] = {s: [] for s in STRATA_ORDER}
    for r in rows:
        by_source["all"].append(r)
        if r.source_type in by_source:
            by_source[r.source_type].append(r)
    by_source["pooled-human"] = pool_human_rows(rows)

    bin_labels = bins.labels() + ["all"]
    results: list[CorrelationResult] = []
    skipped: list[tuple[str, str, int, str]] = []
    for source in STRATA_ORDER:
        source_rows = by_source[source]
        for bin_idx, bin_label in enumerate(bin_labels):
            if bin_label == "all":
                members = source_rows
            else:
                members = [r for r in source_rows if bins.bin_of(r.word_count) == bin_idx]
            if len(members) < 4:
                skipped.append((source, bin_label, len(members), "n < 4"))
                continue
            res = partial_spearman(
                [r.fluency for r in members],
                [r.comet_kiwi for r in members],
                [r.word_count for r in members],
                x_name="fluency",
                y_name="comet_kiwi",
                z_name="word_count",
                p_method=p_method,
            )
            results.append(replace(res, stratum=(source, bin_label)))
    return results, skipped


def headline_correlations(rows: Sequence[AnalysisRow]) -> list[CorrelationResult]:
    """The scalar summary set: global, length-stratified, length-confound, and partial rhos."""
    fluency = np.array([r.fluency for r in rows])
    comet = np.array([r.comet_kiwi for r in rows])
    length = np.array([r.word_count for r in rows])

    out: list[CorrelationResult] = []

    def add(res: CorrelationResult, stratum: tuple[str, str]) -> None:
        out.append(replace(res, stratum=stratum))

    if len(rows) >= 3:
        add(spearman(fluency, comet, "fluency", "comet_kiwi"), ("all", "all"))
        short = length < 100
        if int(short.sum()) >= 3:
            add(spearman(fluency[short], comet[short], "fluency", "comet_kiwi"), ("all", "<100"))
        if int((~short).sum()) >= 3:
            add(spearman(fluency[~short], comet[~short], "fluency", "comet_kiwi"), ("all", ">=100"))
        add(spearman(length, comet, "word_count", "comet_kiwi"), ("all", "all"))
        add(spearman(length, fluency, "word_count", "fluency"), ("all", "all"))
        align = [(r.word_count, r.align_sim) for r in rows if r.align_sim is not None]
        if len(align) >= 3:
            add(
                spearman([a[0] for a in align], [a[1] for a in align], "word_count", "align_sim"),
                ("all", "all"),
            )
    if len(rows) >= 4:
        add(
            partial_spearman(fluency, comet, length, "fluency", "comet_kiwi", "word_count"),
            ("all", "all"),
        )
        groups = {"human": None, "pooled-human": None, "google": None, "llm": None}
        for source in groups:
            members = (
                pool_human_rows(rows)
                if source == "pooled-human"
                else [r for r in rows if r.source_type == source]
            )
            if len(members) < 4:
                continue
            add(
                partial_spearman(
                    [r.fluency for r in members],
                    [r.comet_kiwi for r in members],
                    [r.word_count for r in members],
                    "fluency",
                    "comet_kiwi",
                    "word_count",
                ),
                (source, "all"),
            )
    return out
