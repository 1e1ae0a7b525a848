"""Command-line front end: ingestion, analysis, export, and fitting.

Subcommands:

    analyze      metrics JSON per story plus per-metric population CSVs
    phi          per-node influence CSV and cascade ranking for one story
    fit          maximum-likelihood fits of a population CSV
    reconstruct  propagation-graph recovery from path profiles of one story
    generate     synthetic follower graph + votes corpus with ground truth

All delimited/JSON outputs are deterministic for a fixed config and are
written atomically (temp file + rename) so interrupted runs never leave
truncated files. Matplotlib figures are rendered next to the data files
unless --no-figures is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import figures
from .distfit import (
    FAMILIES,
    ComparisonResult,
    FitConfig,
    Sample,
    compare,
    family_cdf,
)
from .engine import (
    DEFAULT_ALPHA,
    check_alpha,
    compute_path_profiles,
    phi_series,
    rank_cascades,
)
from .errors import CapabilityError, CascadeKitError, IngestionError
from .graph import (
    CascadeGraph,
    build_cascade_graph,
    load_activation_logs,
    load_follower_graph,
    save_activation_logs,
    save_follower_graph,
)
from .metrics import story_metrics
from .oracle import SyntheticSpec, generate_corpus
from .tiers import reconstruct

_MODES = ("numeric", "exact")

POPULATION_HEADER = ["story_id", "seed_label", "value"]
STORY_POPULATION_HEADER = ["story_id", "value"]

# populations exported by `analyze`, one CSV per metric
CASCADE_POPULATIONS = (
    "size",
    "spread",
    "diameter",
    "avg_path_length",
    "log10_total_paths",
)


# ---------------------------------------------------------------------------
# Config and small helpers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Validated invocation parameters shared by the data-driven commands."""

    graph_path: Path
    votes_path: Path
    out_dir: Path
    alpha: float = DEFAULT_ALPHA
    mode: str = "numeric"
    stories: tuple[str, ...] = ()
    strict: bool = False
    workers: int = 1
    render_figures: bool = True

    def __post_init__(self) -> None:
        check_alpha(self.alpha)
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        for path in (self.graph_path, self.votes_path):
            if not path.is_file():
                raise IngestionError(f"input file not found: {path}")
        self.out_dir.mkdir(parents=True, exist_ok=True)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _format_value(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _safe_name(story_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", story_id) or "story"


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _load_corpus(config: RunConfig) -> dict[str, CascadeGraph]:
    graph = load_follower_graph(config.graph_path)
    logs = load_activation_logs(config.votes_path)
    if config.stories:
        missing = [s for s in config.stories if s not in logs]
        if missing:
            raise IngestionError(
                f"story ids not present in {config.votes_path}: {', '.join(missing)}"
            )
        logs = {s: logs[s] for s in config.stories}
    return {
        story: build_cascade_graph(graph, log, strict=config.strict)
        for story, log in logs.items()
    }


def _require_story(config: RunConfig, story: str) -> CascadeGraph:
    graphs = _load_corpus(config)
    if story not in graphs:
        raise IngestionError(f"story {story!r} not present in {config.votes_path}")
    return graphs[story]


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _story_report(payload: tuple[CascadeGraph, str]) -> dict:
    cg, mode = payload
    return story_metrics(cg, mode=mode).to_json_dict()


def _cascade_population_value(cascade: Mapping, metric: str) -> float | int | None:
    if metric == "log10_total_paths":
        paths = cascade["total_paths"]
        return math.log10(paths) if paths > 0 else None
    if metric == "avg_path_length":
        return cascade.get("avg_path_length")
    return cascade[metric]


def cmd_analyze(config: RunConfig) -> int:
    """Per-story metric reports plus corpus-wide population CSVs."""
    graphs = _load_corpus(config)
    if not graphs:
        _warn(f"no stories found in {config.votes_path}; writing empty outputs")
    payloads = [(cg, config.mode) for cg in graphs.values()]
    if config.workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            reports = list(pool.map(_story_report, payloads, chunksize=8))
    else:
        reports = [_story_report(p) for p in payloads]

    for report in reports:
        name = _safe_name(report["story_id"])
        _write_atomic(
            config.out_dir / "stories" / f"{name}.metrics.json", _json_text(report)
        )

    populations: dict[str, list[tuple[str, int, float | int]]] = {
        metric: [] for metric in CASCADE_POPULATIONS
    }
    cascades_per_story: list[tuple[str, int]] = []
    for report in reports:
        cascades_per_story.append((report["story_id"], report["num_cascades"]))
        for cascade in report["cascades"]:
            if not cascade["active"]:
                continue
            for metric in CASCADE_POPULATIONS:
                value = _cascade_population_value(cascade, metric)
                if value is not None:
                    populations[metric].append(
                        (report["story_id"], cascade["seed_label"], value)
                    )

    pop_dir = config.out_dir / "populations"
    for metric, rows in populations.items():
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(POPULATION_HEADER)
        for story, seed_label, value in rows:
            writer.writerow([story, seed_label, _format_value(value)])
        _write_atomic(pop_dir / f"{metric}.csv", buf.getvalue())
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(STORY_POPULATION_HEADER)
    for story, count in cascades_per_story:
        writer.writerow([story, count])
    _write_atomic(pop_dir / "num_cascades.csv", buf.getvalue())

    if config.render_figures:
        fig_dir = config.out_dir / "figures"
        for metric, rows in populations.items():
            figures.plot_population_histogram(
                [row[2] for row in rows],
                fig_dir / f"population_{metric}.png",
                label=metric.replace("_", " "),
            )
        figures.plot_population_histogram(
            [count for _s, count in cascades_per_story],
            fig_dir / "population_num_cascades.png",
            label="cascades per story",
        )
    return 0


# ---------------------------------------------------------------------------
# phi
# ---------------------------------------------------------------------------


def cmd_phi(config: RunConfig, story: str) -> int:
    """Influence CSV for one story plus the cascade ranking by peak value."""
    cg = _require_story(config, story)
    series = phi_series(cg, config.alpha)
    buf = io.StringIO()
    series.write_csv(buf)
    name = _safe_name(story)
    _write_atomic(config.out_dir / f"{name}.phi.csv", buf.getvalue())

    ranking = []
    for rank in rank_cascades(cg, config.alpha):
        ranking.append(
            {
                "seed_index": rank.seed_index,
                "seed_label": rank.seed_label,
                "seed_node_id": rank.seed_node_id,
                "size": rank.size,
                "log10_max_phi": rank.log10_max_phi,
                "max_phi": rank.max_phi if math.isfinite(rank.max_phi) else None,
            }
        )
    _write_atomic(
        config.out_dir / f"{name}.ranking.json", _json_text({"cascades": ranking})
    )

    if config.render_figures:
        profile = compute_path_profiles(cg)
        figures.plot_phi_curves(
            profile, config.out_dir / "figures" / f"{name}.phi.png", story_id=story
        )
    return 0


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def _load_population(path: Path) -> list[float]:
    """Read the `value` column of a population CSV."""
    if not path.is_file():
        raise IngestionError(f"input file not found: {path}")
    values: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or "value" not in [h.strip() for h in header]:
            raise IngestionError(f"{path}:1: expected a CSV header with a 'value' column")
        col = [h.strip() for h in header].index("value")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values.append(float(row[col]))
            except (ValueError, IndexError):
                raise IngestionError(
                    f"{path}:{line_no}: bad value {row[col] if col < len(row) else row!r}"
                ) from None
    return values


def cmd_fit(
    population_path: Path,
    out_dir: Path,
    families: Sequence[str],
    fit_config: FitConfig,
    *,
    render_figures: bool = True,
) -> int:
    """Fit the requested families to a population CSV and rank them by KS."""
    unknown = [f for f in families if f not in FAMILIES]
    if unknown:
        raise IngestionError(
            f"unknown families: {', '.join(unknown)} (expected {', '.join(FAMILIES)})"
        )
    raw = _load_population(population_path)
    if not raw:
        raise IngestionError(f"{population_path}: population is empty")
    positive = [v for v in raw if v > 0 and math.isfinite(v)]
    dropped = len(raw) - len(positive)
    if dropped:
        _warn(f"dropped {dropped} non-positive values before fitting")
    if not positive:
        raise IngestionError(f"{population_path}: no positive values to fit")
    sample = Sample.from_values(positive)
    result = compare(sample, families, fit_config)

    out_dir.mkdir(parents=True, exist_ok=True)
    report = [fit.to_json_dict() for fit in result.fits]
    report.extend(
        {"family": family, "error": message}
        for family, message in sorted(result.failures.items())
    )
    _write_atomic(out_dir / "fit_report.json", _json_text(report))

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["value", "empirical_cdf"] + [f"cdf_{fit.family}" for fit in result.fits]
    )
    n = sample.n
    model_columns = [
        family_cdf(fit.family, fit.params, sample.values) for fit in result.fits
    ]
    for i, value in enumerate(sample.values):
        row = [repr(float(value)), repr((i + 1) / n)]
        row.extend(repr(float(col[i])) for col in model_columns)
        writer.writerow(row)
    _write_atomic(out_dir / "fit_curves.csv", buf.getvalue())

    for family, message in result.failures.items():
        _warn(f"family {family} failed: {message}")

    if render_figures and result.fits:
        figures.plot_fit_overlay(
            sample.values, result, out_dir / "figures" / "fit_cdf.png"
        )
    if not result.fits:
        raise CapabilityError("every requested family failed to fit")
    return 0


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------


def cmd_reconstruct(config: RunConfig, story: str) -> int:
    """Recover a story's propagation graph from its exact path profiles."""
    if config.mode != "exact":
        raise CapabilityError(
            "reconstruction needs exact path histograms; numeric tables cannot "
            "be inverted (rerun with --mode exact)"
        )
    cg = _require_story(config, story)
    profiles = compute_path_profiles(cg)
    recon = reconstruct(profiles)
    name = _safe_name(story)
    _write_atomic(
        config.out_dir / f"{name}.reconstruction.json",
        _json_text(recon.to_json_dict()),
    )
    if config.render_figures:
        figures.plot_reconstruction(
            recon,
            config.out_dir / "figures" / f"{name}.reconstruction.png",
            story_id=story,
        )
    return 0


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(
    out_dir: Path,
    spec: SyntheticSpec,
    stories: int,
) -> int:
    """Write a synthetic corpus: graph.csv, votes.csv, and ground truth."""
    graph, logs, truths = generate_corpus(spec, stories)
    out_dir.mkdir(parents=True, exist_ok=True)

    tmp_graph = out_dir / "graph.csv.tmp"
    save_follower_graph(tmp_graph, graph)
    os.replace(tmp_graph, out_dir / "graph.csv")

    tmp_votes = out_dir / "votes.csv.tmp"
    save_activation_logs(tmp_votes, logs.values())
    os.replace(tmp_votes, out_dir / "votes.csv")

    truth_doc = {}
    for story, cg in truths.items():
        truth_doc[story] = {
            "seeds": [cg.node_of(s) for s in cg.seeds],
            "edges": [
                [cg.node_of(j), cg.node_of(i)]
                for i, preds in enumerate(cg.in_edges, start=1)
                for j in preds
            ],
        }
    _write_atomic(out_dir / "truth.json", _json_text(truth_doc))
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors exit with the input-error code (1)."""

    def error(self, message: str):  # noqa: D102 - argparse override
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_io_flags(sub: argparse.ArgumentParser, *, mode_default: str = "numeric") -> None:
    sub.add_argument("--graph", required=True, type=Path, help="follower graph CSV")
    sub.add_argument("--votes", required=True, type=Path, help="activation log CSV")
    sub.add_argument("--out", required=True, type=Path, help="output directory")
    sub.add_argument(
        "--alpha", type=float, default=DEFAULT_ALPHA,
        help="per-hop transmission rate in (0, 1] (default %(default)s)",
    )
    sub.add_argument(
        "--mode", choices=_MODES, default=mode_default,
        help="numeric float tables or exact integer histograms (default %(default)s)",
    )
    sub.add_argument(
        "--strict", action="store_true",
        help="fail on voters missing from the follower graph",
    )
    sub.add_argument(
        "--no-figures", dest="render_figures", action="store_false",
        help="skip matplotlib figure rendering",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="cascadekit",
        description="Quantitative analysis of information cascades on social networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_analyze = sub.add_parser(
        "analyze", help="metrics JSON per story plus population CSVs"
    )
    _add_io_flags(p_analyze)
    p_analyze.add_argument(
        "--story", action="append", default=None,
        help="restrict to one story id (repeatable)",
    )
    p_analyze.add_argument(
        "--workers", type=int, default=1, help="parallel story workers"
    )
    p_analyze.set_defaults(func=_run_analyze)

    p_phi = sub.add_parser("phi", help="per-node influence CSV for one story")
    _add_io_flags(p_phi)
    p_phi.add_argument("--story", required=True, help="story id to export")
    p_phi.set_defaults(func=_run_phi)

    p_fit = sub.add_parser("fit", help="fit distribution families to a population CSV")
    p_fit.add_argument("population", type=Path, help="population CSV with a value column")
    p_fit.add_argument("--out", required=True, type=Path, help="output directory")
    p_fit.add_argument(
        "--families", default=",".join(FAMILIES),
        help="comma-separated families (default: all)",
    )
    p_fit.add_argument("--seed", type=int, default=0, help="optimizer seed")
    p_fit.add_argument(
        "--no-figures", dest="render_figures", action="store_false",
        help="skip matplotlib figure rendering",
    )
    p_fit.set_defaults(func=_run_fit)

    p_recon = sub.add_parser(
        "reconstruct", help="recover a story's propagation graph from path profiles"
    )
    _add_io_flags(p_recon, mode_default="exact")
    p_recon.add_argument("--story", required=True, help="story id to reconstruct")
    p_recon.set_defaults(func=_run_reconstruct)

    p_gen = sub.add_parser("generate", help="write a synthetic corpus with ground truth")
    p_gen.add_argument("--out", required=True, type=Path, help="output directory")
    p_gen.add_argument("--nodes", type=int, required=True, help="network size")
    p_gen.add_argument("--stories", type=int, default=1, help="number of stories")
    p_gen.add_argument("--max-degree", type=int, default=4, help="watch-degree cap")
    p_gen.add_argument(
        "--degree-model", choices=("fixed", "random"), default="random",
        help="fixed out-degree or uniform in 0..max-degree",
    )
    p_gen.add_argument("--seeds", type=int, default=1, help="independent seeds per story")
    p_gen.add_argument(
        "--transmission", type=float, default=0.5, help="activation probability"
    )
    p_gen.add_argument("--seed", type=int, default=0, help="generator RNG seed")
    p_gen.set_defaults(func=_run_generate)

    return parser


def _config_from(args: argparse.Namespace, *, stories: tuple[str, ...] = ()) -> RunConfig:
    return RunConfig(
        graph_path=args.graph,
        votes_path=args.votes,
        out_dir=args.out,
        alpha=args.alpha,
        mode=args.mode,
        stories=stories,
        strict=args.strict,
        workers=getattr(args, "workers", 1),
        render_figures=args.render_figures,
    )


def _run_analyze(args: argparse.Namespace) -> int:
    stories = tuple(args.story) if args.story else ()
    return cmd_analyze(_config_from(args, stories=stories))


def _run_phi(args: argparse.Namespace) -> int:
    return cmd_phi(_config_from(args, stories=(args.story,)), args.story)


def _run_fit(args: argparse.Namespace) -> int:
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    return cmd_fit(
        args.population,
        args.out,
        families,
        FitConfig(seed=args.seed),
        render_figures=args.render_figures,
    )


def _run_reconstruct(args: argparse.Namespace) -> int:
    return cmd_reconstruct(_config_from(args, stories=(args.story,)), args.story)


def _run_generate(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        nodes=args.nodes,
        max_degree=args.max_degree,
        degree_model=args.degree_model,
        seeds=args.seeds,
        transmission=args.transmission,
        rng_seed=args.seed,
    )
    return cmd_generate(args.out, spec, args.stories)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CascadeKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
