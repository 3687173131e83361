"""Hierarchical directed document graph with boundary-aware asymmetric edge weights.

Two levels of connections:

* intra-section: every ordered sentence pair within a section;
* inter-section: one incoming edge per sentence from every *other* section
  node (section vector = mean of its sentence vectors).

Directionality comes from a positional function: an edge into the node that
sits closer to a text boundary is scaled by ``lambda2``, the reverse edge by
``lambda1`` (ties take ``lambda1``). The ``hierarchy=none`` variant instead
builds a flat fully-connected sentence graph over the whole document.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .corpus import Document
from .embed import EmbeddingSet

logger = logging.getLogger(__name__)

POSITIONAL_MODES = ("boundary", "lead", "undirected")
HIERARCHY_MODES = ("add", "multiply", "none")
NORM_MODES = ("neighbors", "size")
BUDGET_MODES = ("pass", "strict")


class GraphError(Exception):
    """Raised when a graph cannot be built (shape mismatch, bad config)."""


@dataclass(frozen=True, slots=True)
class RankConfig:
    """All ranking hyperparameters. Defaults are the best PubMed setting."""

    alpha: float = 1.0
    lambda1: float = 0.0
    lambda2: float = 1.0
    beta: float = float("-inf")
    mu1: float = 0.5
    word_limit: int = 203
    positional: str = "boundary"
    hierarchy: str = "add"
    norm: str = "neighbors"
    budget: str = "pass"

    def __post_init__(self):
        if self.positional not in POSITIONAL_MODES:
            raise GraphError(f"positional must be one of {POSITIONAL_MODES}, got {self.positional!r}")
        if self.hierarchy not in HIERARCHY_MODES:
            raise GraphError(f"hierarchy must be one of {HIERARCHY_MODES}, got {self.hierarchy!r}")
        if self.norm not in NORM_MODES:
            raise GraphError(f"norm must be one of {NORM_MODES}, got {self.norm!r}")
        if self.budget not in BUDGET_MODES:
            raise GraphError(f"budget must be one of {BUDGET_MODES}, got {self.budget!r}")
        if self.alpha < 0:
            raise GraphError(f"alpha must be >= 0, got {self.alpha}")
        if self.mu1 <= 0:
            raise GraphError(f"mu1 must be > 0, got {self.mu1}")
        if self.word_limit < 1:
            raise GraphError(f"word_limit must be positive, got {self.word_limit}")
        if self.positional == "boundary" and not self.lambda1 < self.lambda2:
            raise GraphError(
                f"boundary mode requires lambda1 < lambda2, got {self.lambda1} >= {self.lambda2}"
            )

    def with_overrides(self, **kwargs) -> "RankConfig":
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "beta": self.beta,
            "mu1": self.mu1,
            "word_limit": self.word_limit,
            "positional": self.positional,
            "hierarchy": self.hierarchy,
            "norm": self.norm,
            "budget": self.budget,
        }


def sentence_boundary(x: int, n: int, alpha: float) -> float:
    """Distance of sentence position ``x`` (0-indexed) to the nearer section
    boundary; the trailing boundary is scaled by ``alpha``."""
    return min(float(x), alpha * (n - x))


def section_boundary(x: int, n_sections: int, alpha: float) -> float:
    """Same boundary distance, over section positions in the document."""
    return min(float(x), alpha * (n_sections - x))


def _directional_weight(sim: float, d_to: float, d_from: float, cfg: RankConfig) -> float:
    if cfg.positional == "undirected":
        w = sim
    elif d_to < d_from:
        w = cfg.lambda2 * sim
    else:
        w = cfg.lambda1 * sim
    return 0.0 if w < cfg.beta else w


def weight_intra(sim: float, db_i: float, db_j: float, cfg: RankConfig) -> float:
    """Weight of a sentence-sentence edge into i, given the positional values
    of i and j (boundary distances, or raw positions in lead mode)."""
    return _directional_weight(sim, db_i, db_j, cfg)


def weight_inter(sim: float, db_to: float, db_from: float, cfg: RankConfig) -> float:
    """Weight of a section-to-sentence edge, given both sections' positional values."""
    return _directional_weight(sim, db_to, db_from, cfg)


# ---------------------------------------------------------------------------
# Similarities
# ---------------------------------------------------------------------------


def _normalize_rows(block):
    """Rows scaled to unit norm; all-zero rows stay zero (flagged upstream)."""
    if sp.issparse(block):
        block = sp.csr_matrix(block, dtype=float)
        norms = np.sqrt(np.asarray(block.multiply(block).sum(axis=1)).ravel())
        scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        return sp.diags(scale) @ block
    block = np.asarray(block, dtype=float)
    norms = np.linalg.norm(block, axis=1)
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return block * scale[:, None]


def _dot_matrix(a, b) -> np.ndarray:
    prod = a @ b.T
    if sp.issparse(prod):
        prod = prod.toarray()
    return np.asarray(prod, dtype=float)


@dataclass(slots=True)
class SimilarityBundle:
    """Cosine similarities for one document, independent of any RankConfig.

    Caching this lets hyperparameter sweeps rebuild graphs without
    recomputing embeddings or similarities.
    """

    section_sizes: list[int]
    intra: list[np.ndarray]          # per section: (n_i, n_i), symmetric
    inter: np.ndarray                # (N, total): section row -> sentence column
    _normalized_all: object = field(default=None, repr=False)
    _flat: np.ndarray | None = field(default=None, repr=False)

    @property
    def flat(self) -> np.ndarray:
        """(total, total) sentence-sentence cosine matrix, computed on demand."""
        if self._flat is None:
            self._flat = _dot_matrix(self._normalized_all, self._normalized_all)
        return self._flat


def compute_similarities(es: EmbeddingSet) -> SimilarityBundle:
    sizes = [block.shape[0] for block in es.sections]
    normalized = [_normalize_rows(block) for block in es.sections]
    intra = [_dot_matrix(nb, nb) for nb in normalized]

    if any(sp.issparse(b) for b in es.sections):
        section_means = sp.vstack(
            [sp.csr_matrix(sp.csr_matrix(b).mean(axis=0)) for b in es.sections], format="csr"
        )
        all_norm = sp.vstack([sp.csr_matrix(nb) for nb in normalized], format="csr")
    else:
        section_means = np.vstack([np.asarray(b).mean(axis=0) for b in es.sections])
        all_norm = np.vstack(normalized)
    inter = _dot_matrix(_normalize_rows(section_means), all_norm)
    return SimilarityBundle(
        section_sizes=sizes, intra=intra, inter=inter, _normalized_all=all_norm
    )


# ---------------------------------------------------------------------------
# Graph construction
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class DocumentGraph:
    """Directed weighted edges, stored as per-section weight matrices.

    Hierarchical mode: ``intra[I][j, i]`` is the weight of the edge j -> i
    inside section I, and ``inter[J, g]`` the weight of the edge from section
    J into the sentence with global index g (own-section entries are zero
    and not counted as edges). Flat mode keeps one document-wide matrix in
    ``intra[0]`` and no inter edges.
    """

    section_sizes: list[int]
    flat: bool
    intra: list[np.ndarray]
    inter: np.ndarray | None

    @property
    def section_count(self) -> int:
        return len(self.section_sizes)

    @property
    def total_sentences(self) -> int:
        return sum(self.section_sizes)

    @property
    def num_intra_edges(self) -> int:
        if self.flat:
            n = self.total_sentences
            return n * (n - 1)
        return sum(n * (n - 1) for n in self.section_sizes)

    @property
    def num_inter_edges(self) -> int:
        if self.flat:
            return 0
        return self.total_sentences * (self.section_count - 1)

    def global_index(self, section_index: int, sentence_index: int) -> int:
        return sum(self.section_sizes[:section_index]) + sentence_index

    def grid(self) -> list[tuple[int, int]]:
        """Global order -> (section_index, sentence_index)."""
        return [(i, j) for i, n in enumerate(self.section_sizes) for j in range(n)]

    def intra_edges(self) -> Iterator[tuple[int, int, int, float]]:
        """Yield (section, from_j, to_i, weight); flat graphs use global indices
        with section -1."""
        if self.flat:
            W = self.intra[0]
            n = self.total_sentences
            for j in range(n):
                for i in range(n):
                    if i != j:
                        yield (-1, j, i, float(W[j, i]))
            return
        for sec, W in enumerate(self.intra):
            n = W.shape[0]
            for j in range(n):
                for i in range(n):
                    if i != j:
                        yield (sec, j, i, float(W[j, i]))

    def inter_edges(self) -> Iterator[tuple[int, int, int, float]]:
        """Yield (from_section J, to_section I, to_sentence i, weight)."""
        if self.flat or self.inter is None:
            return
        grid = self.grid()
        for J in range(self.section_count):
            for g, (I, i) in enumerate(grid):
                if I != J:
                    yield (J, I, i, float(self.inter[J, g]))

    def to_json_dict(self, article_id: str, cfg: RankConfig) -> dict:
        return {
            "article_id": article_id,
            "config": cfg.as_dict(),
            "mode": "flat" if self.flat else "hierarchical",
            "section_sizes": list(self.section_sizes),
            "intra_edges": [list(e) for e in self.intra_edges()],
            "inter_edges": [list(e) for e in self.inter_edges()],
        }


def _positional_values(n: int, cfg: RankConfig, boundary_fn) -> np.ndarray | None:
    if cfg.positional == "undirected":
        return None
    if cfg.positional == "lead":
        return np.arange(n, dtype=float)
    return np.asarray([boundary_fn(x, n, cfg.alpha) for x in range(n)], dtype=float)


def _apply_direction(sim: np.ndarray, d: np.ndarray | None, cfg: RankConfig) -> np.ndarray:
    """Scale sim[j, i] by lambda2 where d[i] < d[j], else lambda1."""
    if d is None:
        return sim.copy()
    factor = np.where(d[None, :] < d[:, None], cfg.lambda2, cfg.lambda1)
    return factor * sim


def _prune(W: np.ndarray, beta: float) -> np.ndarray:
    if beta != float("-inf"):
        W[W < beta] = 0.0
    return W


def build_graph_from_sims(sims: SimilarityBundle, cfg: RankConfig) -> DocumentGraph:
    """Directional weighting + pruning applied to precomputed similarities."""
    sizes = sims.section_sizes
    N = len(sizes)

    if cfg.hierarchy == "none":
        total = sum(sizes)
        d = _positional_values(total, cfg, sentence_boundary)
        W = _apply_direction(sims.flat, d, cfg)
        np.fill_diagonal(W, 0.0)
        return DocumentGraph(section_sizes=list(sizes), flat=True, intra=[_prune(W, cfg.beta)], inter=None)

    intra: list[np.ndarray] = []
    for sec, S in enumerate(sims.intra):
        n = sizes[sec]
        d = _positional_values(n, cfg, sentence_boundary)
        W = _apply_direction(S, d, cfg)
        np.fill_diagonal(W, 0.0)
        intra.append(_prune(W, cfg.beta))

    d_sec = _positional_values(N, cfg, section_boundary)
    inter = sims.inter.copy()
    if d_sec is not None:
        # column g belongs to section I: factor lambda2 where d[I] < d[J]
        col_section = np.repeat(np.arange(N), sizes)
        d_cols = d_sec[col_section]
        factor = np.where(d_cols[None, :] < d_sec[:, None], cfg.lambda2, cfg.lambda1)
        inter = factor * inter
    own = np.repeat(np.arange(N), sizes)[None, :] == np.arange(N)[:, None]
    inter[own] = 0.0
    return DocumentGraph(section_sizes=list(sizes), flat=False, intra=intra, inter=_prune(inter, cfg.beta))


def build_graph(
    doc: Document,
    es: EmbeddingSet,
    cfg: RankConfig,
    sims: SimilarityBundle | None = None,
) -> DocumentGraph:
    """Build the document graph for one document.

    ``sims`` may carry similarities precomputed via
    :func:`compute_similarities` (sweeps reuse them across configs).
    """
    if [len(sec) for sec in doc.sections] != [b.shape[0] for b in es.sections]:
        raise GraphError(
            f"{doc.article_id}: embedding grid does not match document sentence grid"
        )
    if sims is None:
        sims = compute_similarities(es)
    return build_graph_from_sims(sims, cfg)
