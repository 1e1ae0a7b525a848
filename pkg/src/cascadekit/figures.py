"""Matplotlib renderings written next to the delimited report files.

Every helper takes explicit data plus an output path, draws one figure with
the non-interactive Agg backend, and closes it. Nothing here feeds back into
the numeric pipeline; figures are a presentation layer over the CSV/JSON
outputs.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .distfit import ComparisonResult, family_cdf
from .engine import PathProfile
from .graph import CascadeGraph
from .metrics import depth_by_label
from .tiers import CONFIDENCE_EXACT, ReconstructedGraph

_FIGSIZE = (6.4, 4.2)
_DPI = 120


def _finish(fig, out_path: str | Path) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out_path, dpi=_DPI)
    plt.close(fig)
    return out_path


def _seed_polynomials(profile: PathProfile) -> dict[int, dict[int, int]]:
    """Aggregate path-length histogram of each cascade, keyed by seed label."""
    polys: dict[int, dict[int, int]] = {seed: {} for seed in profile.seeds}
    for row in profile.rows:
        for p, hist in row.items():
            agg = polys[profile.seeds[p]]
            for length, count in hist.items():
                agg[length] = agg.get(length, 0) + count
    return polys


def plot_phi_curves(
    profile: PathProfile,
    out_path: str | Path,
    *,
    story_id: str = "",
    alphas: Sequence[float] | None = None,
) -> Path:
    """Per-cascade generating-function curves over the transmission rate."""
    if alphas is None:
        alphas = np.linspace(0.05, 1.0, 96)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    polys = _seed_polynomials(profile)
    for seed_label, poly in sorted(polys.items()):
        values = [
            float(sum(c * a**l for l, c in poly.items())) for a in alphas
        ]
        ax.plot(alphas, values, label=f"cascade {seed_label}")
    ax.set_xlabel("transmission rate")
    ax.set_ylabel("expected path count")
    ax.set_yscale("log")
    title = "cascade generating functions"
    if story_id:
        title += f" — {story_id}"
    ax.set_title(title)
    if len(polys) <= 12:
        ax.legend(fontsize=8)
    return _finish(fig, out_path)


def plot_population_histogram(
    values: Sequence[float],
    out_path: str | Path,
    *,
    label: str,
    bins: int = 40,
    log_counts: bool = True,
) -> Path:
    """Histogram of one per-cascade population (sizes, spreads, ...)."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    arr = np.asarray(list(values), dtype=float)
    if arr.size:
        ax.hist(arr, bins=min(bins, max(int(np.sqrt(arr.size)) + 1, 5)),
                color="#4878a8", edgecolor="white")
    ax.set_xlabel(label)
    ax.set_ylabel("cascades")
    if log_counts and arr.size:
        ax.set_yscale("log")
    ax.set_title(f"distribution of {label}")
    return _finish(fig, out_path)


def plot_fit_overlay(
    sorted_values: np.ndarray,
    comparison: ComparisonResult,
    out_path: str | Path,
    *,
    label: str = "value",
) -> Path:
    """Empirical CDF with each fitted family's CDF overlaid."""
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    n = sorted_values.size
    empirical = np.arange(1, n + 1, dtype=float) / n
    ax.step(sorted_values, empirical, where="post", color="black",
            linewidth=1.2, label="empirical")
    grid = np.geomspace(sorted_values[0], sorted_values[-1], 400)
    for result in comparison.fits:
        ax.plot(grid, family_cdf(result.family, result.params, grid),
                linewidth=1.0, alpha=0.9,
                label=f"{result.family} (KS={result.ks:.3f})")
    ax.set_xscale("log")
    ax.set_xlabel(label)
    ax.set_ylabel("cumulative fraction")
    ax.set_title("fitted cumulative distributions")
    ax.legend(fontsize=8)
    return _finish(fig, out_path)


def plot_reconstruction(
    recon: ReconstructedGraph,
    out_path: str | Path,
    *,
    story_id: str = "",
) -> Path:
    """Layered drawing of a reconstructed propagation graph.

    Nodes sit on rows by longest-path depth; confirmed edges are solid,
    tier-ambiguous placements dashed.
    """
    in_map: dict[int, list[int]] = {}
    for edge in recon.edges:
        in_map.setdefault(edge.dst, []).append(edge.src)
    cg = CascadeGraph(
        story_id=story_id or "reconstruction",
        node_ids=tuple(range(1, recon.n + 1)),
        timestamps=tuple(float(i) for i in range(1, recon.n + 1)),
        in_edges=tuple(
            tuple(sorted(in_map.get(label, ()))) for label in range(1, recon.n + 1)
        ),
        seeds=recon.seeds,
    )
    depth = depth_by_label(cg)
    layers: dict[int, list[int]] = {}
    for label in range(1, recon.n + 1):
        layers.setdefault(depth[label - 1], []).append(label)
    pos: dict[int, tuple[float, float]] = {}
    for d, members in layers.items():
        for i, label in enumerate(sorted(members)):
            pos[label] = (i - (len(members) - 1) / 2.0, -d)
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    for edge in recon.edges:
        (x0, y0), (x1, y1) = pos[edge.src], pos[edge.dst]
        solid = edge.confidence == CONFIDENCE_EXACT
        ax.annotate(
            "",
            xy=(x1, y1),
            xytext=(x0, y0),
            arrowprops={
                "arrowstyle": "-|>",
                "color": "#2d6a4f" if solid else "#b5651d",
                "linestyle": "-" if solid else "--",
                "shrinkA": 9,
                "shrinkB": 9,
            },
        )
    for label, (x, y) in pos.items():
        color = "#ffd166" if label in recon.seeds else "#cddafd"
        ax.scatter([x], [y], s=360, color=color, edgecolors="black", zorder=3)
        ax.text(x, y, str(label), ha="center", va="center", zorder=4, fontsize=8)
    ax.set_axis_off()
    title = "reconstructed propagation graph"
    if story_id:
        title += f" — {story_id}"
    ax.set_title(title)
    return _finish(fig, out_path)
