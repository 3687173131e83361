import itertools
import random

import pytest

from hiporank.corpus import Document, document_from_record
from hiporank.graph import RankConfig

VOCAB = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
    "study", "method", "result", "patient", "model", "graph", "rank", "cell",
]

GRID_LAMBDA1 = (-0.2, 0.0, 0.5)
GRID_ALPHA = (0.0, 0.5, 0.8, 1.0, 1.2)
GRID_MU1 = (0.5, 1.0, 1.5)
GRID_POSITIONAL = ("lead", "undirected", "boundary")
GRID_HIERARCHY = ("none", "add", "multiply")


def random_document(
    rng: random.Random,
    article_id: str = "doc",
    max_sections: int = 4,
    max_sentences: int = 6,
    with_abstract: bool = True,
) -> Document:
    n_sections = rng.randint(1, max_sections)
    sections = []
    for _ in range(n_sections):
        n_sent = rng.randint(1, max_sentences)
        sections.append(
            [" ".join(rng.choices(VOCAB, k=rng.randint(3, 10))) for _ in range(n_sent)]
        )
    abstract = (
        [" ".join(rng.choices(VOCAB, k=rng.randint(4, 12))) for _ in range(rng.randint(1, 3))]
        if with_abstract
        else []
    )
    doc = document_from_record(
        {
            "article_id": article_id,
            "abstract_text": abstract,
            "sections": sections,
            "section_names": [f"sec{i}" for i in range(n_sections)],
        }
    )
    assert doc is not None
    return doc


def grid_configs(word_limit: int = 30, norm: str = "neighbors"):
    """All valid configs of the published hyperparameter grid."""
    configs = []
    for positional, hierarchy, lam1, alpha, mu1 in itertools.product(
        GRID_POSITIONAL, GRID_HIERARCHY, GRID_LAMBDA1, GRID_ALPHA, GRID_MU1
    ):
        try:
            configs.append(
                RankConfig(
                    alpha=alpha,
                    lambda1=lam1,
                    lambda2=1.0,
                    mu1=mu1,
                    word_limit=word_limit,
                    positional=positional,
                    hierarchy=hierarchy,
                    norm=norm,
                )
            )
        except Exception:
            continue
    return configs


@pytest.fixture
def rng():
    return random.Random(20240517)
