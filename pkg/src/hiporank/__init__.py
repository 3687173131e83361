"""Unsupervised extractive summarization of sectioned documents.

Sentences are ranked by centrality in a hierarchical, directed,
boundary-aware document graph; a greedy word-budget selector assembles the
summary. Includes ROUGE-1/2/L evaluation, lead and greedy-oracle baselines,
hyperparameter sweeps, and position-distribution analysis.
"""

from .corpus import CorpusStats, Document, Section, Sentence, document_stats, parse_corpus
from .embed import EmbeddingSet, SectionEmbedding, cosine, embed_document, make_provider, section_embedding
from .graph import (
    DocumentGraph,
    RankConfig,
    build_graph,
    compute_similarities,
    section_boundary,
    sentence_boundary,
    weight_inter,
    weight_intra,
)
from .rank import SentenceScore, centrality, centrality_oracle
from .summarize import ScoredSummary, select, summarize_corpus, summarize_document
from .evaluation import (
    EvaluationReport,
    RougeScores,
    evaluate_corpus,
    lead_summary,
    oracle_summary,
    rouge_l,
    rouge_n,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusStats", "Document", "Section", "Sentence", "document_stats", "parse_corpus",
    "EmbeddingSet", "SectionEmbedding", "cosine", "embed_document", "make_provider", "section_embedding",
    "DocumentGraph", "RankConfig", "build_graph", "compute_similarities",
    "section_boundary", "sentence_boundary", "weight_inter", "weight_intra",
    "SentenceScore", "centrality", "centrality_oracle",
    "ScoredSummary", "select", "summarize_corpus", "summarize_document",
    "EvaluationReport", "RougeScores", "evaluate_corpus", "lead_summary",
    "oracle_summary", "rouge_l", "rouge_n", "tokenize",
]
