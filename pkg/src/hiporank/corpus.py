"""Sectioned-document corpus: parsing, validation, and statistics.

Input is the PubMed/arXiv-style JSONL dump: one JSON object per line with
``article_id``, ``abstract_text`` (list of sentence strings), ``sections``
(list of lists of sentence strings) and ``section_names``.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

_TAG_RE = re.compile(r"</?[^<>]{1,20}>")


class CorpusError(Exception):
    """Raised for unrecoverable corpus problems (unreadable file, strict-mode line failure)."""


@dataclass(frozen=True, slots=True)
class Sentence:
    text: str
    token_count: int
    section_index: int
    sentence_index: int


@dataclass(frozen=True, slots=True)
class Section:
    name: str
    sentences: list[Sentence]
    section_index: int

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True, slots=True)
class Document:
    article_id: str
    sections: list[Section]
    reference_summary: list[str]

    @property
    def num_sentences(self) -> int:
        return sum(len(s) for s in self.sections)

    @property
    def num_tokens(self) -> int:
        return sum(sent.token_count for sec in self.sections for sent in sec.sentences)

    @property
    def summary_tokens(self) -> int:
        return sum(len(s.split()) for s in self.reference_summary)

    def iter_sentences(self) -> Iterator[Sentence]:
        """All sentences in document order (section-major)."""
        for sec in self.sections:
            yield from sec.sentences

    def sentence(self, section_index: int, sentence_index: int) -> Sentence:
        return self.sections[section_index].sentences[sentence_index]

    def to_record(self) -> dict:
        """Serialize back to the JSONL schema this document was parsed from."""
        return {
            "article_id": self.article_id,
            "abstract_text": list(self.reference_summary),
            "sections": [[s.text for s in sec.sentences] for sec in self.sections],
            "section_names": [sec.name for sec in self.sections],
        }


@dataclass(slots=True)
class ParseStats:
    """Counters accumulated over one :func:`parse_corpus` pass."""

    lines_read: int = 0
    documents: int = 0
    skipped_lines: int = 0
    dropped_documents: int = 0
    dropped_sections: int = 0
    dropped_sentences: int = 0

    def as_dict(self) -> dict:
        return {
            "lines_read": self.lines_read,
            "documents": self.documents,
            "skipped_lines": self.skipped_lines,
            "dropped_documents": self.dropped_documents,
            "dropped_sections": self.dropped_sections,
            "dropped_sentences": self.dropped_sentences,
        }


@dataclass(frozen=True, slots=True)
class CorpusStats:
    doc_count: int
    mean_doc_tokens: float
    mean_summary_tokens: float

    def as_dict(self) -> dict:
        return {
            "doc_count": self.doc_count,
            "mean_doc_tokens": self.mean_doc_tokens,
            "mean_summary_tokens": self.mean_summary_tokens,
        }


def _clean_abstract_sentence(text: str) -> str:
    # Public dumps wrap abstract sentences in <S>...</S> markers; strip any such
    # tags (to a fixpoint, so stripping is idempotent across re-parses).
    while True:
        stripped = _TAG_RE.sub("", text)
        if stripped == text:
            return stripped.strip()
        text = stripped


def document_from_record(record: dict, stats: ParseStats | None = None) -> Document | None:
    """Build a validated :class:`Document` from one decoded JSONL record.

    Empty sentences and empty sections are dropped. Returns None when nothing
    usable remains (the caller decides whether that is fatal).
    """
    article_id = record["article_id"]
    raw_sections = record["sections"]
    names = list(record.get("section_names") or [])
    if len(names) < len(raw_sections):
        names += [""] * (len(raw_sections) - len(names))
    elif len(names) > len(raw_sections):
        names = names[: len(raw_sections)]

    sections: list[Section] = []
    for raw_sentences, name in zip(raw_sections, names):
        sentences: list[Sentence] = []
        for raw in raw_sentences:
            text = str(raw).strip()
            if not text:
                if stats is not None:
                    stats.dropped_sentences += 1
                logger.warning("%s: dropping empty sentence", article_id)
                continue
            sentences.append(
                Sentence(
                    text=text,
                    token_count=len(text.split()),
                    section_index=len(sections),
                    sentence_index=len(sentences),
                )
            )
        if not sentences:
            if stats is not None:
                stats.dropped_sections += 1
            logger.warning("%s: dropping empty section %r", article_id, name)
            continue
        sections.append(Section(name=str(name), sentences=sentences, section_index=len(sections)))

    if not sections:
        return None

    abstract = [
        cleaned
        for raw in record.get("abstract_text") or []
        if (cleaned := _clean_abstract_sentence(str(raw)))
    ]
    return Document(article_id=str(article_id), sections=sections, reference_summary=abstract)


def parse_corpus(
    path: str | Path,
    limit: int | None = None,
    strict: bool = False,
    stats: ParseStats | None = None,
) -> Iterator[Document]:
    """Stream validated documents from a JSONL corpus file, preserving input order.

    Malformed lines are skipped with a warning (fatal under ``strict``).
    ``limit`` caps the number of *yielded* documents.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"corpus file not found: {path}")
    if stats is None:
        stats = ParseStats()

    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if limit is not None and stats.documents >= limit:
                break
            if not line.strip():
                continue
            stats.lines_read += 1
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("line is not a JSON object")
                for key in ("article_id", "sections"):
                    if key not in record:
                        raise ValueError(f"missing field {key!r}")
                doc = document_from_record(record, stats)
            except Exception as exc:
                if strict:
                    raise CorpusError(f"{path}:{lineno}: {exc}") from exc
                stats.skipped_lines += 1
                logger.warning("%s:%d: skipping malformed line (%s)", path, lineno, exc)
                continue
            if doc is None:
                if strict:
                    raise CorpusError(f"{path}:{lineno}: document has no non-empty sections")
                stats.dropped_documents += 1
                logger.warning("%s:%d: dropping document with no usable sections", path, lineno)
                continue
            stats.documents += 1
            yield doc


def document_stats(docs: Iterable[Document]) -> CorpusStats:
    """Exact arithmetic means of document/summary token counts over a document stream."""
    count = 0
    doc_tokens = 0
    summary_tokens = 0
    for doc in docs:
        count += 1
        doc_tokens += doc.num_tokens
        summary_tokens += doc.summary_tokens
    if count == 0:
        raise CorpusError("document stream is empty")
    return CorpusStats(
        doc_count=count,
        mean_doc_tokens=doc_tokens / count,
        mean_summary_tokens=summary_tokens / count,
    )
