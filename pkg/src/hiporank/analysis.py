"""Ablation sweeps over the hyperparameter grid and sentence-position analysis.

Sweeps reuse per-document similarity bundles across grid points, so only the
directional weighting, centrality, and selection are recomputed per config.
Position output is plot-ready CSV (no rendering here).
"""

from __future__ import annotations

import csv
import itertools
import logging
import multiprocessing
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Document
from .embed import embed_document, make_provider
from .evaluation import evaluate_corpus
from .graph import RankConfig, build_graph_from_sims, compute_similarities
from .rank import centrality
from .summarize import ScoredSummary, select

logger = logging.getLogger(__name__)

SWEEP_CSV_COLUMNS = [
    "provider", "positional", "hierarchy", "lambda1", "lambda2",
    "alpha", "mu1", "beta", "word_limit", "norm", "rouge1_f", "rouge2_f", "rougeL_f",
]
SWEEP_SCHEMA_VERSION = 1

POSITIONS_CSV_COLUMNS = ["doc_rank", "article_id", "relative_position"]
HISTOGRAM_CSV_COLUMNS = ["bin_index", "bin_lo", "bin_hi", "count", "density"]


@dataclass(slots=True)
class SweepSpec:
    """Hyperparameter grid; defaults are the published search space."""

    lambda1_values: Sequence[float] = (-0.2, 0.0, 0.5)
    alpha_values: Sequence[float] = (0.0, 0.5, 0.8, 1.0, 1.2)
    mu1_values: Sequence[float] = (0.5, 1.0, 1.5)
    positional_modes: Sequence[str] = ("lead", "undirected", "boundary")
    hierarchy_modes: Sequence[str] = ("none", "add", "multiply")
    providers: Sequence[str] = ("random:200:0",)

    def grid_size(self) -> int:
        return (
            len(self.providers)
            * len(self.positional_modes)
            * len(self.hierarchy_modes)
            * len(self.lambda1_values)
            * len(self.alpha_values)
            * len(self.mu1_values)
        )


@dataclass(slots=True)
class SweepRow:
    provider: str
    config: RankConfig
    rouge1_f: float
    rouge2_f: float
    rougeL_f: float

    def as_dict(self) -> dict:
        row = {"provider": self.provider}
        row.update(self.config.as_dict())
        row.update(
            {"rouge1_f": self.rouge1_f, "rouge2_f": self.rouge2_f, "rougeL_f": self.rougeL_f}
        )
        return row


@dataclass(slots=True)
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    skipped_invalid: int = 0

    def as_dict(self) -> dict:
        return {
            "schema_version": SWEEP_SCHEMA_VERSION,
            "rows": [r.as_dict() for r in self.rows],
            "errors": self.errors,
            "skipped_invalid": self.skipped_invalid,
        }


# state shared with forked sweep workers (documents and similarity bundles
# are read-only; fork's copy-on-write keeps them shared)
_SWEEP_STATE: dict = {}


def _evaluate_grid_point(cfg: RankConfig):
    docs = _SWEEP_STATE["docs"]
    sims = _SWEEP_STATE["sims"]
    stem = _SWEEP_STATE["stem"]
    try:
        summaries = []
        for doc, bundle in zip(docs, sims):
            g = build_graph_from_sims(bundle, cfg)
            summaries.append(select(centrality(g, cfg), doc, cfg.word_limit, cfg.budget))
        agg = evaluate_corpus(summaries, docs, stem=stem).aggregate.as_dict()
        return ("ok", cfg, agg["rouge1"]["f"], agg["rouge2"]["f"], agg["rougeL"]["f"])
    except Exception as exc:
        return ("err", cfg, str(exc))


def run_sweep(
    docs: Sequence[Document],
    spec: SweepSpec,
    base: RankConfig | None = None,
    stem: bool = False,
    workers: int = 1,
) -> SweepResult:
    """Evaluate every valid grid point on ``docs``; rows sorted by ROUGE-L desc.

    Grid points are independent; ``workers`` > 1 evaluates them in a forked
    process pool (documents and similarities shared copy-on-write).
    """
    if not docs:
        raise ValueError("sweep needs a non-empty document sample")
    base = base or RankConfig()
    result = SweepResult()

    for provider_spec in spec.providers:
        provider = make_provider(provider_spec, corpus_docs=docs)
        sims = [compute_similarities(embed_document(doc, provider)) for doc in docs]

        configs: list[RankConfig] = []
        for positional, hierarchy, lambda1, alpha, mu1 in itertools.product(
            spec.positional_modes,
            spec.hierarchy_modes,
            spec.lambda1_values,
            spec.alpha_values,
            spec.mu1_values,
        ):
            try:
                configs.append(
                    base.with_overrides(
                        positional=positional,
                        hierarchy=hierarchy,
                        lambda1=lambda1,
                        alpha=alpha,
                        mu1=mu1,
                    )
                )
            except Exception:
                result.skipped_invalid += 1

        _SWEEP_STATE.update(docs=docs, sims=sims, stem=stem)
        if workers > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(processes=workers) as pool:
                outcomes = pool.map(_evaluate_grid_point, configs, chunksize=1)
        else:
            outcomes = [_evaluate_grid_point(cfg) for cfg in configs]
        _SWEEP_STATE.clear()

        for outcome in outcomes:
            if outcome[0] == "ok":
                _, cfg, r1, r2, rl = outcome
                result.rows.append(
                    SweepRow(provider=provider_spec, config=cfg, rouge1_f=r1, rouge2_f=r2, rougeL_f=rl)
                )
            else:
                _, cfg, message = outcome
                logger.warning("sweep config failed: %s (%s)", cfg.as_dict(), message)
                result.errors.append(
                    {"provider": provider_spec, "config": cfg.as_dict(), "error": message}
                )

    result.rows.sort(
        key=lambda r: (
            -r.rougeL_f,
            r.provider,
            r.config.positional,
            r.config.hierarchy,
            r.config.lambda1,
            r.config.alpha,
            r.config.mu1,
        )
    )
    return result


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in result.rows:
            writer.writerow(row.as_dict())


# ---------------------------------------------------------------------------
# Sentence-position distributions
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class PositionGrid:
    """Relative positions of selected sentences, documents ordered by length."""

    points: list[tuple[int, str, float]]  # (doc_rank, article_id, relative_position)
    bin_edges: list[float]
    counts: list[int]
    density: list[float]


def position_histogram(
    summaries: Iterable[ScoredSummary],
    docs: Iterable[Document],
    bins: int = 20,
) -> PositionGrid:
    """Relative source positions (global sentence index / sentence count) for
    every selected sentence, plus an aggregate density over ``bins`` equal bins."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    by_id = {doc.article_id: doc for doc in docs}
    ordered = sorted(by_id.values(), key=lambda d: (d.num_tokens, d.article_id))
    rank = {doc.article_id: i for i, doc in enumerate(ordered)}

    points: list[tuple[int, str, float]] = []
    counts = [0] * bins
    for summary in summaries:
        doc = by_id.get(summary.article_id)
        if doc is None:
            raise ValueError(f"summary for unknown article {summary.article_id!r}")
        total = doc.num_sentences
        offsets = {}
        g = 0
        for sec in doc.sections:
            offsets[sec.section_index] = g
            g += len(sec)
        for sec_idx, sent_idx in summary.picks:
            rel = (offsets[sec_idx] + sent_idx) / total
            points.append((rank[doc.article_id], summary.article_id, rel))
            counts[min(int(rel * bins), bins - 1)] += 1

    total_points = sum(counts)
    density = [c / total_points if total_points else 0.0 for c in counts]
    edges = [i / bins for i in range(bins + 1)]
    return PositionGrid(points=points, bin_edges=edges, counts=counts, density=density)


def write_positions_csv(grid: PositionGrid, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(POSITIONS_CSV_COLUMNS)
        for doc_rank, article_id, rel in grid.points:
            writer.writerow([doc_rank, article_id, f"{rel:.6f}"])


def write_histogram_csv(grid: PositionGrid, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTOGRAM_CSV_COLUMNS)
        for i, count in enumerate(grid.counts):
            writer.writerow(
                [i, f"{grid.bin_edges[i]:.6f}", f"{grid.bin_edges[i + 1]:.6f}", count, f"{grid.density[i]:.6f}"]
            )
