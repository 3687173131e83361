"""Sentence/section vector representations and cosine similarity.

Four providers produce per-sentence vectors aligned to a document's
section/sentence grid:

* ``random``       — seeded hash-derived unit vector per distinct token,
                     sentence = mean of its token vectors;
* ``word_vectors`` — lookup in a word2vec text-format file, sentence = mean
                     of in-vocabulary token vectors;
* ``precomputed``  — vectors read from the JSONL interchange format
                     (one line per document, nested section/sentence lists);
* ``tfidf``        — sparse tf-idf rows with idf fitted on an ingested corpus.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import Document, Section

logger = logging.getLogger(__name__)


class EmbeddingError(Exception):
    """Raised for provider failures: missing files, missing keys, shape mismatches."""


@dataclass(slots=True)
class EmbeddingSet:
    """Per-sentence vectors for one document.

    ``sections[i]`` is an (n_sentences, dim) matrix (dense ndarray or CSR)
    whose rows align with the document's sentence grid.
    """

    article_id: str
    dim: int
    sections: list  # list of (n_i, dim) matrices
    provider_tag: str

    def sentence_vector(self, section_index: int, sentence_index: int):
        return self.sections[section_index][sentence_index]

    def validate_against(self, doc: Document) -> None:
        if len(self.sections) != len(doc.sections):
            raise EmbeddingError(
                f"{self.article_id}: embedding grid has {len(self.sections)} sections, "
                f"document has {len(doc.sections)}"
            )
        for sec, block in zip(doc.sections, self.sections):
            if block.shape != (len(sec), self.dim):
                raise EmbeddingError(
                    f"{self.article_id}: section {sec.section_index} embeddings have shape "
                    f"{block.shape}, expected {(len(sec), self.dim)}"
                )


@dataclass(frozen=True, slots=True)
class SectionEmbedding:
    section_index: int
    vector: object  # (dim,) dense vector or (1, dim) sparse row


def section_embedding(es: EmbeddingSet, section: Section) -> SectionEmbedding:
    """Component-wise arithmetic mean of the section's sentence vectors."""
    block = es.sections[section.section_index]
    if sp.issparse(block):
        vec = sp.csr_matrix(block.mean(axis=0))
        degenerate = vec.count_nonzero() == 0
    else:
        vec = np.asarray(block, dtype=float).mean(axis=0)
        degenerate = not np.any(vec)
    if degenerate:
        logger.warning(
            "%s: section %d mean vector is all-zero", es.article_id, section.section_index
        )
    return SectionEmbedding(section_index=section.section_index, vector=vec)


def cosine(a, b) -> float:
    """Cosine similarity in [-1, 1]; zero-norm inputs yield 0.0 (flagged)."""
    if sp.issparse(a) or sp.issparse(b):
        a = sp.csr_matrix(a)
        b = sp.csr_matrix(b)
        if a.shape[1] != b.shape[1]:
            raise EmbeddingError(f"cosine: length mismatch {a.shape[1]} vs {b.shape[1]}")
        na = float(np.sqrt(a.multiply(a).sum()))
        nb = float(np.sqrt(b.multiply(b).sum()))
        dot = float(a.multiply(b).sum())
    else:
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        if a.shape[0] != b.shape[0]:
            raise EmbeddingError(f"cosine: length mismatch {a.shape[0]} vs {b.shape[0]}")
        na = float(np.linalg.norm(a))
        nb = float(np.linalg.norm(b))
        dot = float(a @ b)
    if na == 0.0 or nb == 0.0:
        logger.debug("cosine: zero-norm vector, returning 0.0")
        return 0.0
    return float(dot / (na * nb))


# ---------------------------------------------------------------------------
# Providers
# ---------------------------------------------------------------------------


class RandomProvider:
    """Deterministic pseudo-random token vectors.

    Each distinct token maps to a fixed unit vector derived from a seeded hash
    of the token string, so lexical overlap still drives sentence similarity.
    A sentence vector is the mean of its token vectors.
    """

    def __init__(self, dim: int = 200, seed: int = 0):
        if dim <= 0:
            raise EmbeddingError("random provider: dim must be positive")
        self.dim = dim
        self.seed = seed
        self.tag = f"random:{dim}:{seed}"
        self._cache: dict[str, np.ndarray] = {}

    def _token_vector(self, token: str) -> np.ndarray:
        vec = self._cache.get(token)
        if vec is None:
            digest = hashlib.blake2b(
                token.encode("utf-8"), digest_size=8, salt=str(self.seed).encode()[:16]
            ).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            vec = rng.standard_normal(self.dim)
            vec /= np.linalg.norm(vec)
            self._cache[token] = vec
        return vec

    def embed(self, doc: Document) -> EmbeddingSet:
        blocks = []
        for sec in doc.sections:
            rows = [
                np.mean([self._token_vector(t) for t in sent.text.split()], axis=0)
                for sent in sec.sentences
            ]
            blocks.append(np.vstack(rows))
        return EmbeddingSet(doc.article_id, self.dim, blocks, self.tag)


class WordVectorsProvider:
    """Pretrained word vectors in word2vec text format.

    File layout: a ``"vocab_size dim"`` header line, then one
    ``"token f1 ... fdim"`` line per token. Lookup is lowercased; a sentence
    with no in-vocabulary token falls back to the vocabulary mean vector.
    """

    def __init__(self, path: str | Path):
        path = Path(path)
        if not path.is_file():
            raise EmbeddingError(f"word vector file not found: {path}")
        self.tag = f"word_vectors:{path.name}"
        self._vocab: dict[str, np.ndarray] = {}
        with path.open("r", encoding="utf-8", errors="replace") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise EmbeddingError(f"{path}: malformed word2vec header {header!r}")
            declared, dim = int(header[0]), int(header[1])
            for line in fh:
                parts = line.rstrip("\n").split(" ")
                if len(parts) < dim + 1:
                    continue
                token = parts[0].lower()
                if token in self._vocab:
                    continue
                # float32 keeps multi-million-token vocabularies in memory
                self._vocab[token] = np.asarray(parts[1 : dim + 1], dtype=np.float32)
        if not self._vocab:
            raise EmbeddingError(f"{path}: no vectors loaded")
        if len(self._vocab) != declared:
            logger.warning(
                "%s: header declares %d vectors, loaded %d", path, declared, len(self._vocab)
            )
        self.dim = dim
        self._mean = np.mean(np.vstack(list(self._vocab.values())), axis=0, dtype=float)

    def embed(self, doc: Document) -> EmbeddingSet:
        blocks = []
        oov_sentences = 0
        for sec in doc.sections:
            rows = []
            for sent in sec.sentences:
                vecs = [
                    self._vocab[t] for t in (w.lower() for w in sent.text.split()) if t in self._vocab
                ]
                if vecs:
                    rows.append(np.mean(vecs, axis=0, dtype=float))
                else:
                    oov_sentences += 1
                    rows.append(self._mean.copy())
            blocks.append(np.vstack(rows).astype(float))
        if oov_sentences:
            logger.warning(
                "%s: %d sentence(s) fully out of vocabulary, used mean vector",
                doc.article_id,
                oov_sentences,
            )
        return EmbeddingSet(doc.article_id, self.dim, blocks, self.tag)


class PrecomputedProvider:
    """Vectors from the JSONL interchange file, keyed by article_id.

    Lines are ``{"article_id": str, "dim": int, "sections": [[[f, ...], ...], ...]}``
    with the nesting mirroring the document grid. The file is offset-indexed
    once, then lines are parsed on demand.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        if not self._path.is_file():
            raise EmbeddingError(f"precomputed embedding file not found: {self._path}")
        self.tag = f"precomputed:{self._path.name}"
        self.dim = 0
        self._offsets: dict[str, int] = {}
        # index by byte offset; grab the key with a regex so indexing a large
        # file does not JSON-parse every vector
        key_re = re.compile(rb'"article_id"\s*:\s*"((?:[^"\\]|\\.)*)"')
        with self._path.open("rb") as fh:
            offset = 0
            for line in fh:
                stripped = line.strip()
                if stripped:
                    match = key_re.search(stripped)
                    if match is None:
                        raise EmbeddingError(
                            f"{self._path}: interchange line without article_id at offset {offset}"
                        )
                    key = json.loads(b'"' + match.group(1) + b'"')
                    self._offsets[str(key)] = offset
                offset += len(line)

    def embed(self, doc: Document) -> EmbeddingSet:
        offset = self._offsets.get(doc.article_id)
        if offset is None:
            raise EmbeddingError(f"{self._path}: no embeddings for article {doc.article_id!r}")
        with self._path.open("rb") as fh:
            fh.seek(offset)
            record = json.loads(fh.readline().decode("utf-8"))
        dim = int(record["dim"])
        blocks = []
        zero_rows = 0
        for sec_vectors in record["sections"]:
            block = np.asarray(sec_vectors, dtype=float)
            if block.ndim != 2 or block.shape[1] != dim:
                raise EmbeddingError(
                    f"{doc.article_id}: interchange section has shape {block.shape}, dim={dim}"
                )
            zero_rows += int(np.sum(~np.any(block, axis=1)))
            blocks.append(block)
        if zero_rows:
            logger.warning("%s: %d all-zero precomputed vector(s)", doc.article_id, zero_rows)
        es = EmbeddingSet(doc.article_id, dim, blocks, self.tag)
        es.validate_against(doc)
        self.dim = dim
        return es


class TfidfProvider:
    """Sparse tf-idf sentence vectors; idf fitted over a document corpus.

    ``idf(t) = ln((1 + n_docs) / (1 + df_t)) + 1`` with df counted per
    document. Must be fitted before embedding.
    """

    def __init__(self):
        self.tag = "tfidf"
        self.dim = 0
        self._vocab: dict[str, int] = {}
        self._idf: np.ndarray | None = None

    def fit(self, docs: Iterable[Document]) -> "TfidfProvider":
        df: dict[str, int] = {}
        n_docs = 0
        for doc in docs:
            n_docs += 1
            seen = {t.lower() for sent in doc.iter_sentences() for t in sent.text.split()}
            for token in seen:
                df[token] = df.get(token, 0) + 1
        if n_docs == 0:
            raise EmbeddingError("tfidf provider: cannot fit on an empty corpus")
        self._vocab = {t: i for i, t in enumerate(sorted(df))}
        self.dim = len(self._vocab)
        idf = np.empty(self.dim)
        for token, i in self._vocab.items():
            idf[i] = np.log((1 + n_docs) / (1 + df[token])) + 1.0
        self._idf = idf
        return self

    def embed(self, doc: Document) -> EmbeddingSet:
        if self._idf is None:
            raise EmbeddingError("tfidf provider: fit() must run before embedding")
        blocks = []
        for sec in doc.sections:
            data, indices, indptr = [], [], [0]
            for sent in sec.sentences:
                counts: dict[int, float] = {}
                for token in sent.text.split():
                    idx = self._vocab.get(token.lower())
                    if idx is not None:
                        counts[idx] = counts.get(idx, 0.0) + 1.0
                for idx in sorted(counts):
                    indices.append(idx)
                    data.append(counts[idx] * self._idf[idx])
                indptr.append(len(indices))
            blocks.append(
                sp.csr_matrix(
                    (np.asarray(data), np.asarray(indices, dtype=np.int32), indptr),
                    shape=(len(sec), self.dim),
                )
            )
        return EmbeddingSet(doc.article_id, self.dim, blocks, self.tag)


@dataclass(frozen=True, slots=True)
class ProviderSpec:
    """Parsed ``name[:arg[:arg]]`` provider selector (CLI surface)."""

    name: str
    args: tuple[str, ...]

    @classmethod
    def parse(cls, text: str) -> "ProviderSpec":
        parts = text.split(":")
        return cls(name=parts[0], args=tuple(parts[1:]))

    def __str__(self) -> str:
        return ":".join((self.name,) + self.args)


def make_provider(spec: str | ProviderSpec, corpus_docs: Sequence[Document] | None = None):
    """Instantiate a provider from its spec string.

    ``random:DIM:SEED`` | ``word_vectors:PATH`` | ``precomputed:PATH`` | ``tfidf``.
    ``tfidf`` is fitted on ``corpus_docs``, which must be supplied.
    """
    if isinstance(spec, str):
        spec = ProviderSpec.parse(spec)
    if spec.name == "random":
        dim = int(spec.args[0]) if len(spec.args) > 0 else 200
        seed = int(spec.args[1]) if len(spec.args) > 1 else 0
        return RandomProvider(dim=dim, seed=seed)
    if spec.name in ("word_vectors", "w2v"):
        if not spec.args:
            raise EmbeddingError("word_vectors provider needs a path: word_vectors:PATH")
        return WordVectorsProvider(":".join(spec.args))
    if spec.name == "precomputed":
        if not spec.args:
            raise EmbeddingError("precomputed provider needs a path: precomputed:PATH")
        return PrecomputedProvider(":".join(spec.args))
    if spec.name == "tfidf":
        if corpus_docs is None:
            raise EmbeddingError("tfidf provider needs the ingested corpus to fit idf")
        return TfidfProvider().fit(corpus_docs)
    raise EmbeddingError(f"unknown embedding provider {spec.name!r}")


def embed_document(doc: Document, provider) -> EmbeddingSet:
    """Embed one document and check the grid shape against it."""
    es = provider.embed(doc)
    es.validate_against(doc)
    return es
