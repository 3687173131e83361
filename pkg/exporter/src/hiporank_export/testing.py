"""Offline test fixtures: a tiny randomly initialized BERT saved to disk, so
the exporter can be exercised without downloading any pretrained weights."""

from __future__ import annotations

from pathlib import Path

import torch
from transformers import BertConfig, BertModel, BertTokenizer

TINY_VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list("abcdefghijklmnopqrstuvwxyz")
    + [
        "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
        "study", "method", "result", "patient", "model", "graph", "rank", "cell",
        "hello", "world", "one", "two", "three",
        "##s", "##ing", "##0", "##1", "##2", "##3", "##4", "##5", "##6", "##7", "##8", "##9",
    ]
)


def tiny_bert_dir(path: str | Path, seed: int = 0, hidden_size: int = 32) -> Path:
    """Create (idempotently) a local directory holding a small seeded BERT."""
    path = Path(path)
    if (path / "config.json").exists():
        return path
    path.mkdir(parents=True, exist_ok=True)
    vocab_file = path / "vocab.txt"
    vocab_file.write_text("\n".join(TINY_VOCAB) + "\n", encoding="utf-8")
    tokenizer = BertTokenizer(vocab_file=str(vocab_file))
    tokenizer.save_pretrained(path)

    config = BertConfig(
        vocab_size=len(TINY_VOCAB),
        hidden_size=hidden_size,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=hidden_size * 2,
        max_position_embeddings=64,
    )
    torch.manual_seed(seed)
    model = BertModel(config)
    model.save_pretrained(path)
    return path
