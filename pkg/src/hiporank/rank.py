"""Per-sentence centrality: local (intra-section), global (inter-section), combined.

A sentence's intra score is the normalized sum of its incoming
sentence-sentence edge weights; its inter score the normalized sum of
incoming section-node edge weights. The combined score is
``mu1 * inter + intra`` (add), ``mu1 * inter * intra`` (multiply), or just
the flat-graph intra score (none).

``centrality_oracle`` recomputes everything from the document and raw
embedding vectors with naive scalar loops, sharing no code with the graph
builder; it exists to cross-check the pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import Document
from .embed import EmbeddingSet
from .graph import DocumentGraph, RankConfig

__all__ = ["SentenceScore", "centrality", "centrality_oracle"]


@dataclass(frozen=True, slots=True)
class SentenceScore:
    section_index: int
    sentence_index: int
    intra: float
    inter: float
    combined: float

    def as_dict(self) -> dict:
        return {
            "section_index": self.section_index,
            "sentence_index": self.sentence_index,
            "intra": self.intra,
            "inter": self.inter,
            "combined": self.combined,
        }


def _combine(intra: float, inter: float, cfg: RankConfig) -> float:
    if cfg.hierarchy == "add":
        return cfg.mu1 * inter + intra
    if cfg.hierarchy == "multiply":
        return cfg.mu1 * inter * intra
    return intra


def centrality(g: DocumentGraph, cfg: RankConfig) -> list[SentenceScore]:
    """One score per sentence, in document order."""
    scores: list[SentenceScore] = []

    if g.flat:
        n = g.total_sentences
        denom = max(n - 1, 1) if cfg.norm == "neighbors" else n
        intra_sums = g.intra[0].sum(axis=0) / denom
        for (sec, sent), value in zip(g.grid(), intra_sums):
            scores.append(
                SentenceScore(sec, sent, intra=float(value), inter=0.0, combined=_combine(float(value), 0.0, cfg))
            )
        return scores

    N = g.section_count
    inter_denom = max(N - 1, 1) if cfg.norm == "neighbors" else N
    inter_sums = g.inter.sum(axis=0) / inter_denom

    offset = 0
    for sec, W in enumerate(g.intra):
        n = g.section_sizes[sec]
        intra_denom = max(n - 1, 1) if cfg.norm == "neighbors" else n
        intra_sums = W.sum(axis=0) / intra_denom
        for sent in range(n):
            intra = float(intra_sums[sent])
            inter = float(inter_sums[offset + sent])
            scores.append(
                SentenceScore(sec, sent, intra=intra, inter=inter, combined=_combine(intra, inter, cfg))
            )
        offset += n
    return scores


# ---------------------------------------------------------------------------
# Brute-force validator (kept deliberately naive and self-contained)
# ---------------------------------------------------------------------------


def _raw_vectors(es: EmbeddingSet) -> list[list[list[float]]]:
    out = []
    for block in es.sections:
        if sp.issparse(block):
            block = block.toarray()
        out.append([[float(v) for v in row] for row in np.asarray(block)])
    return out


def _oracle_cosine(a: list[float], b: list[float]) -> float:
    dot = 0.0
    na = 0.0
    nb = 0.0
    for x, y in zip(a, b):
        dot += x * y
        na += x * x
        nb += y * y
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (math.sqrt(na) * math.sqrt(nb))


def _oracle_position(x: int, n: int, cfg: RankConfig) -> float:
    if cfg.positional == "lead":
        return float(x)
    return min(float(x), cfg.alpha * (n - x))


def _oracle_edge(sim: float, d_to: float, d_from: float, cfg: RankConfig) -> float:
    if cfg.positional == "undirected":
        w = sim
    else:
        w = cfg.lambda2 * sim if d_to < d_from else cfg.lambda1 * sim
    if w < cfg.beta:
        return 0.0
    return w


def centrality_oracle(doc: Document, es: EmbeddingSet, cfg: RankConfig) -> list[SentenceScore]:
    """Recompute centrality for a small document with nested loops only."""
    if doc.num_sentences > 30:
        raise ValueError("centrality_oracle is meant for documents of at most 30 sentences")
    vectors = _raw_vectors(es)
    sizes = [len(block) for block in vectors]
    n_sections = len(sizes)
    scores: list[SentenceScore] = []

    if cfg.hierarchy == "none":
        flat = [vec for block in vectors for vec in block]
        coords = [(i, j) for i, n in enumerate(sizes) for j in range(n)]
        total = len(flat)
        denom = total - 1 if cfg.norm == "neighbors" else total
        if denom < 1:
            denom = 1
        for gi in range(total):
            acc = 0.0
            for gj in range(total):
                if gj == gi:
                    continue
                sim = _oracle_cosine(flat[gj], flat[gi])
                d_i = _oracle_position(gi, total, cfg)
                d_j = _oracle_position(gj, total, cfg)
                acc += _oracle_edge(sim, d_i, d_j, cfg)
            intra = acc / denom
            sec, sent = coords[gi]
            scores.append(SentenceScore(sec, sent, intra=intra, inter=0.0, combined=intra))
        return scores

    dim = len(vectors[0][0])
    section_vecs: list[list[float]] = []
    for block in vectors:
        mean = [0.0] * dim
        for vec in block:
            for k in range(dim):
                mean[k] += vec[k]
        section_vecs.append([v / len(block) for v in mean])

    for sec in range(n_sections):
        n = sizes[sec]
        intra_denom = max(n - 1, 1) if cfg.norm == "neighbors" else n
        inter_denom = max(n_sections - 1, 1) if cfg.norm == "neighbors" else n_sections
        for i in range(n):
            acc = 0.0
            for j in range(n):
                if j == i:
                    continue
                sim = _oracle_cosine(vectors[sec][j], vectors[sec][i])
                d_i = _oracle_position(i, n, cfg)
                d_j = _oracle_position(j, n, cfg)
                acc += _oracle_edge(sim, d_i, d_j, cfg)
            intra = acc / intra_denom

            acc = 0.0
            for other in range(n_sections):
                if other == sec:
                    continue
                sim = _oracle_cosine(section_vecs[other], vectors[sec][i])
                d_i = _oracle_position(sec, n_sections, cfg)
                d_o = _oracle_position(other, n_sections, cfg)
                acc += _oracle_edge(sim, d_i, d_o, cfg)
            inter = acc / inter_denom

            if cfg.hierarchy == "add":
                combined = cfg.mu1 * inter + intra
            else:
                combined = cfg.mu1 * inter * intra
            scores.append(SentenceScore(sec, i, intra=intra, inter=inter, combined=combined))
    return scores
