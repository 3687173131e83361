"""Greedy word-budget sentence selection and end-to-end corpus summarization."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .corpus import Document
from .embed import embed_document
from .graph import RankConfig, build_graph
from .rank import SentenceScore, centrality

logger = logging.getLogger(__name__)


class SelectionError(Exception):
    """Raised when scores do not align with the document."""


@dataclass(slots=True)
class ScoredSummary:
    """Selected sentences for one document, emitted in document order."""

    article_id: str
    picks: list[tuple[int, int]]   # (section_index, sentence_index), document order
    texts: list[str]
    total_tokens: int
    scores: list[float]            # aligned to picks

    def to_record(self) -> dict:
        return {
            "article_id": self.article_id,
            "summary": list(self.texts),
            "picks": [list(p) for p in self.picks],
            "scores": list(self.scores),
            "total_tokens": self.total_tokens,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ScoredSummary":
        return cls(
            article_id=str(record["article_id"]),
            picks=[tuple(p) for p in record.get("picks", [])],
            texts=[str(t) for t in record["summary"]],
            total_tokens=int(record.get("total_tokens", 0)),
            scores=[float(s) for s in record.get("scores", [])],
        )


def select(
    scores: Sequence[SentenceScore],
    doc: Document,
    word_limit: int,
    budget: str = "pass",
) -> ScoredSummary:
    """Greedy highest-score-first selection under a word budget.

    Ties break toward the earlier document position. In ``pass`` mode the
    sentence that first pushes the running total to >= word_limit is kept;
    in ``strict`` mode selection stops just before it.
    """
    by_pos = {(s.section_index, s.sentence_index): s for s in scores}
    grid = [(sent.section_index, sent.sentence_index) for sent in doc.iter_sentences()]
    if len(by_pos) != len(scores) or set(by_pos) != set(grid):
        raise SelectionError(f"{doc.article_id}: scores are not aligned with the document grid")

    order = sorted(range(len(grid)), key=lambda g: (-by_pos[grid[g]].combined, g))
    chosen: list[int] = []
    total = 0
    for g in order:
        tokens = doc.sentence(*grid[g]).token_count
        if budget == "strict" and total + tokens > word_limit:
            break
        chosen.append(g)
        total += tokens
        if total >= word_limit:
            break

    chosen.sort()
    picks = [grid[g] for g in chosen]
    return ScoredSummary(
        article_id=doc.article_id,
        picks=picks,
        texts=[doc.sentence(*p).text for p in picks],
        total_tokens=total,
        scores=[by_pos[p].combined for p in picks],
    )


def summarize_document(doc: Document, provider, cfg: RankConfig) -> ScoredSummary:
    """embed -> build graph -> centrality -> select, for one document."""
    es = embed_document(doc, provider)
    g = build_graph(doc, es, cfg)
    scores = centrality(g, cfg)
    return select(scores, doc, cfg.word_limit, budget=cfg.budget)


def summarize_corpus(
    docs: Iterable[Document],
    provider,
    cfg: RankConfig,
    strict: bool = False,
    score_sink=None,
) -> Iterator[ScoredSummary]:
    """Summarize a document stream; failing documents are skipped in lenient mode.

    ``score_sink``, when given, receives ``(article_id, list[SentenceScore])``
    per document (the flag-gated score dump).
    """
    failures = 0
    for doc in docs:
        try:
            es = embed_document(doc, provider)
            g = build_graph(doc, es, cfg)
            scores = centrality(g, cfg)
            if score_sink is not None:
                score_sink(doc.article_id, scores)
            yield select(scores, doc, cfg.word_limit, budget=cfg.budget)
        except Exception as exc:
            if strict:
                raise
            failures += 1
            logger.warning("%s: summarization failed, skipping (%s)", doc.article_id, exc)
    if failures:
        logger.warning("summarize_corpus: skipped %d failing document(s)", failures)
