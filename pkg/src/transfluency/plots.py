"""Report figures rendered from the pipeline's CSV artifacts.

Every function reads the delimited files only, so figures can be regenerated
without re-running any computation.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .stats import STRATA_ORDER

_SOURCE_COLORS = {
    "all": "#444444",
    "human": "#1f77b4",
    "pooled-human": "#17becf",
    "google": "#d62728",
    "llm": "#2ca02c",
    "original": "#9467bd",
}


def _read_csv(path: Path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _f(raw: str) -> float:
    return float(raw) if raw not in ("", None) else np.nan


def plot_partial_rho_heatmap(stratified_csv: Path, out_path: Path) -> Path:
    rows = _read_csv(stratified_csv)
    sources = [s for s in STRATA_ORDER if any(r["source"] == s for r in rows)]
    bins: list[str] = []
    for r in rows:
        if r["bin"] not in bins:
            bins.append(r["bin"])
    grid = np.full((len(sources), len(bins)), np.nan)
    sig = np.zeros_like(grid, dtype=bool)
    for r in rows:
        i, j = sources.index(r["source"]), bins.index(r["bin"])
        grid[i, j] = _f(r["rho"])
        sig[i, j] = r["significant"] == "true"
    vmax = np.nanmax(np.abs(grid)) if np.isfinite(grid).any() else 1.0
    fig, ax = plt.subplots(figsize=(1.6 * len(bins) + 2, 0.8 * len(sources) + 1.5))
    im = ax.imshow(grid, cmap="RdBu_r", vmin=-vmax, vmax=vmax, aspect="auto")
    ax.set_xticks(range(len(bins)), bins)
    ax.set_yticks(range(len(sources)), sources)
    ax.set_xlabel("paragraph length bin (words)")
    for i in range(len(sources)):
        for j in range(len(bins)):
            if np.isnan(grid[i, j]):
                ax.text(j, i, "n/a", ha="center", va="center", color="#888888", fontsize=8)
            else:
                star = "*" if sig[i, j] else ""
                ax.text(j, i, f"{grid[i, j]:+.3f}{star}", ha="center", va="center", fontsize=9)
    ax.set_title("Fluency vs adequacy, partial rank correlation (length-controlled)")
    fig.colorbar(im, ax=ax, label="partial Spearman rho")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_rho_by_length(stratified_csv: Path, out_path: Path) -> Path:
    rows = _read_csv(stratified_csv)
    bins: list[str] = []
    for r in rows:
        if r["bin"] != "all" and r["bin"] not in bins:
            bins.append(r["bin"])
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for source in STRATA_ORDER:
        points = {r["bin"]: _f(r["rho"]) for r in rows if r["source"] == source and r["bin"] != "all"}
        if not points:
            continue
        xs = [i for i, b in enumerate(bins) if b in points]
        ys = [points[bins[i]] for i in xs]
        ax.plot(xs, ys, marker="o", label=source, color=_SOURCE_COLORS.get(source))
    ax.axhline(0.0, color="#999999", linewidth=0.8)
    ax.set_xticks(range(len(bins)), bins)
    ax.set_xlabel("paragraph length bin (words)")
    ax.set_ylabel("partial Spearman rho")
    ax.set_title("Length-controlled fluency-adequacy correlation by bin")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_fluency_vs_comet(scores_csv: Path, out_path: Path, max_points: int = 2000) -> Path:
    rows = [
        r for r in _read_csv(scores_csv)
        if r["class_label"] == "translated" and r["comet_kiwi"] not in ("", None)
    ]
    if len(rows) > max_points:
        picks = np.random.default_rng(0).permutation(len(rows))[:max_points]
        rows = [rows[i] for i in sorted(picks)]
    fig, ax = plt.subplots(figsize=(6.5, 5))
    for source in ("human", "google", "llm"):
        xs = [_f(r["fluency"]) for r in rows if r["source_type"] == source]
        ys = [_f(r["comet_kiwi"]) for r in rows if r["source_type"] == source]
        if xs:
            ax.scatter(xs, ys, s=8, alpha=0.45, label=source, color=_SOURCE_COLORS[source])
    x = np.array([_f(r["fluency"]) for r in rows])
    y = np.array([_f(r["comet_kiwi"]) for r in rows])
    if len(x) >= 2 and np.ptp(x) > 0:
        slope, intercept = np.polyfit(x, y, 1)
        xs_line = np.linspace(x.min(), x.max(), 50)
        ax.plot(xs_line, slope * xs_line + intercept, color="black", linewidth=1.2,
                label="least-squares trend")
    ax.set_xlabel("fluency (1 - P(translated))")
    ax.set_ylabel("adequacy score")
    ax.set_title("Fluency vs adequacy, translated paragraphs")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_fluency_distributions(scores_csv: Path, out_path: Path) -> Path:
    rows = _read_csv(scores_csv)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    edges = np.linspace(0.0, 1.0, 41)
    for source in ("original", "human", "google", "llm"):
        vals = [_f(r["fluency"]) for r in rows if r["source_type"] == source]
        if vals:
            ax.hist(vals, bins=edges, density=True, histtype="step", linewidth=1.5,
                    label=f"{source} (n={len(vals)})", color=_SOURCE_COLORS[source])
    ax.set_xlabel("fluency (1 - P(translated))")
    ax.set_ylabel("density")
    ax.set_title("Out-of-fold fluency by source")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_grid_summary(grid_csv: Path, out_path: Path) -> Path:
    rows = _read_csv(grid_csv)
    weightings = sorted({r["weighting"] for r in rows})
    samplings = sorted({r["sampling"] for r in rows})
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    for ax, column, title in zip(
        axes,
        ("rho_length_fluency", "rho_partial_fluency_comet"),
        ("length-fluency rho", "partial fluency-adequacy rho"),
    ):
        grid = np.full((len(weightings), len(samplings)), np.nan)
        for r in rows:
            grid[weightings.index(r["weighting"]), samplings.index(r["sampling"])] = _f(r[column])
        vmax = np.nanmax(np.abs(grid)) if np.isfinite(grid).any() else 1.0
        im = ax.imshow(grid, cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        ax.set_xticks(range(len(samplings)), samplings)
        ax.set_yticks(range(len(weightings)), weightings)
        for i in range(len(weightings)):
            for j in range(len(samplings)):
                if not np.isnan(grid[i, j]):
                    ax.text(j, i, f"{grid[i, j]:+.4f}", ha="center", va="center")
        ax.set_title(title)
        fig.colorbar(im, ax=ax)
    fig.suptitle("Classifier-variant robustness grid")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_report(out_dir, figures_dir: Optional[Path] = None) -> list[Path]:
    """Render every figure whose source CSV exists; returns the paths written."""
    out_dir = Path(out_dir)
    figures_dir = Path(figures_dir) if figures_dir is not None else out_dir / "figures"
    figures_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    stratified = out_dir / "correlations_stratified.csv"
    scores = out_dir / "scores.csv"
    grid = out_dir / "grid.csv"
    if stratified.is_file():
        written.append(plot_partial_rho_heatmap(stratified, figures_dir / "partial_rho_heatmap.png"))
        written.append(plot_rho_by_length(stratified, figures_dir / "rho_by_length.png"))
    if scores.is_file():
        written.append(plot_fluency_vs_comet(scores, figures_dir / "fluency_vs_comet.png"))
        written.append(plot_fluency_distributions(scores, figures_dir / "fluency_distributions.png"))
    if grid.is_file():
        written.append(plot_grid_summary(grid, figures_dir / "grid_summary.png"))
    return written
