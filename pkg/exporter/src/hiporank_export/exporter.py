"""Run a pretrained transformer sentence encoder over a corpus and write the
embedding interchange file.

Input: sectioned-corpus JSONL (one document per line with ``article_id``,
``sections`` as lists of sentence-string lists, ``section_names``). Empty
sentences and sections are dropped exactly as the consuming engine drops
them, so the exported grid always matches the engine's sentence grid.

Output: one JSONL line per document,
``{"article_id": str, "dim": int, "sections": [[[f, ...], ...], ...]}``
with floats fixed to 6 decimals.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

logger = logging.getLogger(__name__)

POOLING_MODES = ("cls", "mean")


class ExportError(Exception):
    """Fatal exporter failure (bad model, unreadable corpus, encode error)."""


@dataclass(slots=True)
class ExportJob:
    corpus_path: str
    model: str
    pooling: str = "mean"
    batch_size: int = 32
    output_path: str = "embeddings.jsonl"
    limit: int | None = None
    max_length: int | None = None
    device: str = "cpu"

    def __post_init__(self):
        if self.pooling not in POOLING_MODES:
            raise ExportError(f"pooling must be one of {POOLING_MODES}, got {self.pooling!r}")
        if self.batch_size < 1:
            raise ExportError("batch_size must be >= 1")


@dataclass(slots=True)
class ExportStats:
    documents: int = 0
    sentences: int = 0
    truncated_sentences: int = 0
    skipped_lines: int = 0


def iter_corpus(path: str | Path, limit: int | None = None):
    """Yield (article_id, [[sentence, ...], ...]) grids from a corpus file."""
    path = Path(path)
    if not path.is_file():
        raise ExportError(f"corpus file not found: {path}")
    count = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if limit is not None and count >= limit:
                return
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                article_id = str(record["article_id"])
                raw_sections = record["sections"]
            except Exception as exc:
                logger.warning("%s:%d: skipping malformed line (%s)", path, lineno, exc)
                continue
            sections = []
            for raw in raw_sections:
                sentences = [str(s).strip() for s in raw]
                sentences = [s for s in sentences if s]
                if sentences:
                    sections.append(sentences)
            if not sections:
                logger.warning("%s:%d: no usable sections, skipping", path, lineno)
                continue
            count += 1
            yield article_id, sections


class SentenceEncoder:
    """Transformer encoder with cls or mean pooling over contextual token states.

    Mean pooling averages non-special, non-padding positions, so a sentence
    that tokenizes to a single piece embeds as exactly that piece's vector.
    """

    def __init__(self, model: str, pooling: str = "mean", device: str = "cpu",
                 max_length: int | None = None):
        if pooling not in POOLING_MODES:
            raise ExportError(f"pooling must be one of {POOLING_MODES}, got {pooling!r}")
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model)
            self.model = AutoModel.from_pretrained(model)
        except Exception as exc:
            raise ExportError(f"cannot load model {model!r}: {exc}") from exc
        self.model.eval()
        self.device = torch.device(device)
        self.model.to(self.device)
        self.pooling = pooling
        model_max = getattr(self.tokenizer, "model_max_length", None) or 512
        if model_max > 100_000:  # some tokenizers report a sentinel "no limit"
            model_max = 512
        self.max_length = min(max_length, model_max) if max_length else model_max
        self.dim = int(self.model.config.hidden_size)
        self.truncated = 0

    def _count_truncated(self, texts: list[str]) -> None:
        lengths = [
            len(ids) for ids in self.tokenizer(texts, truncation=False)["input_ids"]
        ]
        overlong = sum(1 for n in lengths if n > self.max_length)
        if overlong:
            self.truncated += overlong
            logger.warning("truncating %d over-length sentence(s) to %d tokens", overlong, self.max_length)

    @torch.no_grad()
    def encode(self, texts: list[str]) -> np.ndarray:
        """(len(texts), dim) float array of pooled sentence vectors."""
        if not texts:
            return np.zeros((0, self.dim))
        self._count_truncated(texts)
        batch = self.tokenizer(
            texts,
            padding=True,
            truncation=True,
            max_length=self.max_length,
            return_tensors="pt",
            return_special_tokens_mask=True,
        )
        special = batch.pop("special_tokens_mask")
        batch = {k: v.to(self.device) for k, v in batch.items()}
        hidden = self.model(**batch).last_hidden_state
        if self.pooling == "cls":
            pooled = hidden[:, 0]
        else:
            keep = (batch["attention_mask"].bool() & ~special.bool().to(self.device)).unsqueeze(-1)
            counts = keep.sum(dim=1).clamp(min=1)
            pooled = (hidden * keep).sum(dim=1) / counts
            empty = keep.sum(dim=1).squeeze(-1) == 0
            if bool(empty.any()):
                logger.warning("%d sentence(s) had no content tokens; using [CLS] state", int(empty.sum()))
                pooled[empty] = hidden[:, 0][empty]
        return pooled.cpu().numpy().astype(float)


def _rounded(vectors: np.ndarray) -> list[list[float]]:
    return [[round(float(x), 6) for x in row] for row in vectors]


def export(job: ExportJob) -> ExportStats:
    """Encode the corpus and write the interchange file; returns counters."""
    encoder = SentenceEncoder(job.model, pooling=job.pooling, device=job.device,
                              max_length=job.max_length)
    stats = ExportStats()
    out_path = Path(job.output_path)
    with out_path.open("w", encoding="utf-8") as out:
        for article_id, sections in iter_corpus(job.corpus_path, limit=job.limit):
            encoded_sections = []
            for sentences in sections:
                rows = []
                for start in range(0, len(sentences), job.batch_size):
                    chunk = sentences[start : start + job.batch_size]
                    vectors = encoder.encode(chunk)
                    if vectors.shape != (len(chunk), encoder.dim):
                        raise ExportError(
                            f"{article_id}: encoder returned shape {vectors.shape}, "
                            f"expected {(len(chunk), encoder.dim)}"
                        )
                    rows.extend(_rounded(vectors))
                stats.sentences += len(rows)
                encoded_sections.append(rows)
            out.write(
                json.dumps(
                    {"article_id": article_id, "dim": encoder.dim, "sections": encoded_sections}
                )
                + "\n"
            )
            stats.documents += 1
    stats.truncated_sentences = encoder.truncated
    logger.info(
        "exported %d document(s), %d sentence(s), %d truncated",
        stats.documents, stats.sentences, stats.truncated_sentences,
    )
    return stats
