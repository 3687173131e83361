"""ROUGE-1/2/L F1 scoring, lead and greedy-oracle baselines, corpus aggregation.

Tokenization: lowercase, whitespace split, surrounding punctuation stripped;
optional Porter stemming. ROUGE-L uses a single summary-level longest common
subsequence over the concatenated token sequences, computed with the
bit-parallel Allison-Dix recurrence (the test suite checks it against a
quadratic dynamic program and an exhaustive subsequence enumerator).
"""

from __future__ import annotations

import logging
import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _porter
from .corpus import Document
from .summarize import ScoredSummary

logger = logging.getLogger(__name__)

_STRIP = string.punctuation


class EvaluationError(Exception):
    """Raised for evaluator misuse (misaligned corpora, missing references)."""


def tokenize(text: str, stem: bool = False) -> list[str]:
    tokens = [t.strip(_STRIP) for t in text.lower().split()]
    tokens = [t for t in tokens if t]
    if stem:
        tokens = [_porter.stem(t) for t in tokens]
    return tokens


@dataclass(frozen=True, slots=True)
class MetricScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: float, candidate_total: int, reference_total: int) -> "MetricScore":
        p = overlap / candidate_total if candidate_total else 0.0
        r = overlap / reference_total if reference_total else 0.0
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(precision=p, recall=r, f1=f)


@dataclass(frozen=True, slots=True)
class RougeScores:
    rouge1: MetricScore
    rouge2: MetricScore
    rougeL: MetricScore

    def as_dict(self, scale: float = 100.0, digits: int = 2) -> dict:
        def fmt(m: MetricScore) -> dict:
            return {
                "p": round(m.precision * scale, digits),
                "r": round(m.recall * scale, digits),
                "f": round(m.f1 * scale, digits),
            }

        return {"rouge1": fmt(self.rouge1), "rouge2": fmt(self.rouge2), "rougeL": fmt(self.rougeL)}


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> MetricScore:
    """Clipped n-gram multiset overlap; empty inputs score zero."""
    if n not in (1, 2):
        raise EvaluationError(f"rouge_n supports n in (1, 2), got {n}")
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        logger.debug("rouge_n: empty candidate or reference")
        return MetricScore(0.0, 0.0, 0.0)
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return MetricScore.from_counts(overlap, cand_total, ref_total)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length via the bit-parallel recurrence."""
    if not a or not b:
        return 0
    positions: dict[str, int] = {}
    for idx, token in enumerate(b):
        positions[token] = positions.get(token, 0) | (1 << idx)
    row = 0
    for token in a:
        matches = row | positions.get(token, 0)
        row = matches & ~(matches - ((row << 1) | 1))
    return row.bit_count()


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> MetricScore:
    """Summary-level LCS F1 over the full token sequences."""
    if not candidate or not reference:
        logger.debug("rouge_l: empty candidate or reference")
        return MetricScore(0.0, 0.0, 0.0)
    lcs = lcs_length(candidate, reference)
    return MetricScore.from_counts(lcs, len(candidate), len(reference))


def score_pair(candidate_tokens: Sequence[str], reference_tokens: Sequence[str]) -> RougeScores:
    return RougeScores(
        rouge1=rouge_n(candidate_tokens, reference_tokens, 1),
        rouge2=rouge_n(candidate_tokens, reference_tokens, 2),
        rougeL=rouge_l(candidate_tokens, reference_tokens),
    )


# ---------------------------------------------------------------------------
# Baselines
# ---------------------------------------------------------------------------


def lead_summary(doc: Document, k: int) -> ScoredSummary:
    """Sentences from the document start until the token budget is passed."""
    if k <= 0:
        raise EvaluationError(f"lead budget must be positive, got {k}")
    picks: list[tuple[int, int]] = []
    total = 0
    for sent in doc.iter_sentences():
        picks.append((sent.section_index, sent.sentence_index))
        total += sent.token_count
        if total >= k:
            break
    return ScoredSummary(
        article_id=doc.article_id,
        picks=picks,
        texts=[doc.sentence(*p).text for p in picks],
        total_tokens=total,
        scores=[0.0] * len(picks),
    )


def _merged_bigram_counts(
    pick_indices: list[int], unigrams: list[list[str]]
) -> tuple[Counter, int]:
    """Bigram counts of the concatenation of the picked sentences (document order)."""
    counts: Counter = Counter()
    total = 0
    prev_last: str | None = None
    for idx in pick_indices:
        tokens = unigrams[idx]
        if not tokens:
            continue
        if prev_last is not None:
            counts[(prev_last, tokens[0])] += 1
            total += 1
        for i in range(len(tokens) - 1):
            counts[(tokens[i], tokens[i + 1])] += 1
        total += len(tokens) - 1
        prev_last = tokens[-1]
    return counts, total


def oracle_summary(doc: Document, word_limit: int, stem: bool = False) -> ScoredSummary:
    """Greedy extractive upper bound: repeatedly add the sentence that most
    improves bigram-overlap F1 against the reference summary; stop on no
    strictly positive gain or once the word budget is passed."""
    if not doc.reference_summary:
        raise EvaluationError(f"{doc.article_id}: oracle needs a non-empty reference summary")
    reference = tokenize(" ".join(doc.reference_summary), stem=stem)
    ref_bigrams = _ngrams(reference, 2)
    ref_total = sum(ref_bigrams.values())

    sentences = list(doc.iter_sentences())
    sent_tokens = [tokenize(s.text, stem=stem) for s in sentences]

    chosen: list[int] = []
    chosen_gain: dict[int, float] = {}
    total_tokens = 0
    best_f1 = 0.0

    def f1_of(pick_indices: list[int]) -> float:
        cand, cand_total = _merged_bigram_counts(pick_indices, sent_tokens)
        if cand_total == 0 or ref_total == 0:
            return 0.0
        overlap = sum(min(count, ref_bigrams[g]) for g, count in cand.items())
        return MetricScore.from_counts(overlap, cand_total, ref_total).f1

    while True:
        best_idx = -1
        best_candidate_f1 = best_f1
        for idx in range(len(sentences)):
            if idx in chosen_gain:
                continue
            candidate = sorted(chosen + [idx])
            f1 = f1_of(candidate)
            if f1 > best_candidate_f1:
                best_candidate_f1 = f1
                best_idx = idx
        if best_idx < 0:
            break
        chosen_gain[best_idx] = best_candidate_f1 - best_f1
        best_f1 = best_candidate_f1
        chosen = sorted(chosen + [best_idx])
        total_tokens += sentences[best_idx].token_count
        if total_tokens >= word_limit:
            break

    picks = [(sentences[i].section_index, sentences[i].sentence_index) for i in chosen]
    return ScoredSummary(
        article_id=doc.article_id,
        picks=picks,
        texts=[sentences[i].text for i in chosen],
        total_tokens=total_tokens,
        scores=[chosen_gain[i] for i in chosen],
    )


# ---------------------------------------------------------------------------
# Corpus-level evaluation
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class EvaluationReport:
    aggregate: RougeScores
    per_document: list[tuple[str, RougeScores]]

    def as_dict(self) -> dict:
        return {
            "aggregate": self.aggregate.as_dict(),
            "per_document": [
                {"article_id": aid, **scores.as_dict()} for aid, scores in self.per_document
            ],
        }


def evaluate_corpus(
    system: Iterable[ScoredSummary],
    references: Iterable[Document],
    stem: bool = False,
) -> EvaluationReport:
    """Score system summaries against reference summaries matched by article_id."""
    refs = {doc.article_id: doc for doc in references}
    per_document: list[tuple[str, RougeScores]] = []
    unmatched: list[str] = []
    for summary in system:
        doc = refs.get(summary.article_id)
        if doc is None:
            unmatched.append(summary.article_id)
            continue
        cand = tokenize(" ".join(summary.texts), stem=stem)
        ref = tokenize(" ".join(doc.reference_summary), stem=stem)
        per_document.append((summary.article_id, score_pair(cand, ref)))
    if unmatched:
        raise EvaluationError(
            f"system summaries without matching reference documents: {sorted(unmatched)}"
        )
    if not per_document:
        raise EvaluationError("nothing to evaluate: no matched documents")

    def mean(metrics: list[MetricScore]) -> MetricScore:
        n = len(metrics)
        return MetricScore(
            precision=sum(m.precision for m in metrics) / n,
            recall=sum(m.recall for m in metrics) / n,
            f1=sum(m.f1 for m in metrics) / n,
        )

    aggregate = RougeScores(
        rouge1=mean([s.rouge1 for _, s in per_document]),
        rouge2=mean([s.rouge2 for _, s in per_document]),
        rougeL=mean([s.rougeL for _, s in per_document]),
    )
    return EvaluationReport(aggregate=aggregate, per_document=per_document)
