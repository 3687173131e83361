"""Transformer sentence-embedding exporter for sectioned JSONL corpora."""

from .exporter import ExportError, ExportJob, ExportStats, SentenceEncoder, export, iter_corpus

__version__ = "0.1.0"

__all__ = ["ExportError", "ExportJob", "ExportStats", "SentenceEncoder", "export", "iter_corpus"]
