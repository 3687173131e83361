import json
from pathlib import Path

import numpy as np
import pytest

from hiporank.embed import embed_document, make_provider
from hiporank.graph import (
    DocumentGraph,
    RankConfig,
    SimilarityBundle,
    build_graph,
    build_graph_from_sims,
)
from hiporank.rank import centrality, centrality_oracle

from conftest import grid_configs, random_document

FIXTURE = Path(__file__).parent / "fixtures" / "toy_centrality.json"


def scores_for(doc, es, cfg):
    return centrality(build_graph(doc, es, cfg), cfg)


def test_single_sentence_section_intra_zero():
    g = DocumentGraph(section_sizes=[1], flat=False, intra=[np.zeros((1, 1))], inter=np.zeros((1, 1)))
    (score,) = centrality(g, RankConfig())
    assert score.intra == 0.0
    assert score.inter == 0.0


def test_incoming_weights_hand_value():
    # one 3-sentence section; incoming weights {0.5, 0.2} into sentence 0
    W = np.zeros((3, 3))
    W[1, 0] = 0.5
    W[2, 0] = 0.2
    g = DocumentGraph(section_sizes=[3], flat=False, intra=[W], inter=np.zeros((1, 3)))
    scores = centrality(g, RankConfig())
    assert scores[0].intra == pytest.approx(0.35)


def test_multiply_with_zero_intra_is_zero(rng):
    doc = random_document(rng, max_sections=3, max_sentences=4)
    es = embed_document(doc, make_provider("random:8:2"))
    cfg = RankConfig(hierarchy="multiply")
    for score in scores_for(doc, es, cfg):
        if score.intra == 0.0:
            assert score.combined == 0.0


def test_combined_matches_mode_formula(rng):
    doc = random_document(rng, max_sections=3, max_sentences=5)
    es = embed_document(doc, make_provider("random:8:2"))
    for hierarchy in ("add", "multiply"):
        cfg = RankConfig(hierarchy=hierarchy, mu1=1.5)
        for s in scores_for(doc, es, cfg):
            expected = 1.5 * s.inter + s.intra if hierarchy == "add" else 1.5 * s.inter * s.intra
            assert s.combined == pytest.approx(expected, abs=1e-12)
    cfg = RankConfig(hierarchy="none")
    for s in scores_for(doc, es, cfg):
        assert s.inter == 0.0
        assert s.combined == s.intra


def test_hand_fixture_matches_pipeline():
    fixture = json.loads(FIXTURE.read_text())
    sims = SimilarityBundle(
        section_sizes=fixture["section_sizes"],
        intra=[np.asarray(m, dtype=float) for m in fixture["intra_sims"]],
        inter=np.asarray(fixture["inter_sims"], dtype=float),
    )
    for case in fixture["cases"]:
        cfg = RankConfig(**case["config"])
        scores = centrality(build_graph_from_sims(sims, cfg), cfg)
        assert [s.intra for s in scores] == pytest.approx(case["intra"], abs=1e-12), case["name"]
        assert [s.inter for s in scores] == pytest.approx(case["inter"], abs=1e-12), case["name"]
        assert [s.combined for s in scores] == pytest.approx(case["combined"], abs=1e-12), case["name"]


def test_oracle_equivalence_sampled_configs(rng):
    configs = grid_configs()
    for i in range(40):
        doc = random_document(rng, article_id=f"r{i}", max_sections=4, max_sentences=6)
        es = embed_document(doc, make_provider(f"random:8:{i}"))
        cfg = configs[(i * 11) % len(configs)]
        pipeline = scores_for(doc, es, cfg)
        oracle = centrality_oracle(doc, es, cfg)
        for a, b in zip(pipeline, oracle):
            assert a.intra == pytest.approx(b.intra, abs=1e-9)
            assert a.inter == pytest.approx(b.inter, abs=1e-9)
            assert a.combined == pytest.approx(b.combined, abs=1e-9)


def test_oracle_equivalence_size_norm(rng):
    for i in range(10):
        doc = random_document(rng, article_id=f"s{i}", max_sections=4, max_sentences=6)
        es = embed_document(doc, make_provider("random:8:9"))
        cfg = RankConfig(norm="size", hierarchy="add")
        pipeline = scores_for(doc, es, cfg)
        oracle = centrality_oracle(doc, es, cfg)
        for a, b in zip(pipeline, oracle):
            assert a.combined == pytest.approx(b.combined, abs=1e-9)


def test_undirected_flat_identical_sentences_all_equal():
    from hiporank.corpus import document_from_record

    doc = document_from_record(
        {
            "article_id": "u",
            "abstract_text": [],
            "sections": [["same words here", "same words here", "same words here"]],
            "section_names": ["s"],
        }
    )
    es = embed_document(doc, make_provider("random:8:3"))
    cfg = RankConfig(positional="undirected", hierarchy="none")
    scores = centrality(build_graph(doc, es, cfg), cfg)
    assert len({round(s.combined, 12) for s in scores}) == 1


def test_add_with_mu1_small_matches_intra_ranking(rng):
    # mu1 cannot be zero; a tiny mu1 must give the same ranking as intra alone
    doc = random_document(rng, max_sections=3, max_sentences=6)
    es = embed_document(doc, make_provider("random:16:6"))
    cfg = RankConfig(mu1=1e-12)
    scores = scores_for(doc, es, cfg)
    by_combined = sorted(range(len(scores)), key=lambda i: (-scores[i].combined, i))
    by_intra = sorted(range(len(scores)), key=lambda i: (-scores[i].intra, i))
    assert by_combined == by_intra


def test_nonnegative_scores_with_nonnegative_sims(rng):
    doc = random_document(rng, max_sections=3, max_sentences=5)
    es = embed_document(doc, make_provider("random:16:8"))
    es.sections = [np.abs(b) for b in es.sections]  # all cosines >= 0
    for cfg in (RankConfig(), RankConfig(lambda1=0.5), RankConfig(hierarchy="multiply")):
        for s in scores_for(doc, es, cfg):
            assert s.combined >= 0.0


def test_argmax_invariant_under_uniform_scaling(rng):
    for i in range(10):
        doc = random_document(rng, article_id=f"a{i}", max_sections=4, max_sentences=6)
        es = embed_document(doc, make_provider(f"random:16:{i}"))
        cfg = RankConfig()
        base = scores_for(doc, es, cfg)
        es.sections = [b * 0.013 for b in es.sections]
        scaled = scores_for(doc, es, cfg)
        rank = lambda ss: sorted(range(len(ss)), key=lambda k: (-ss[k].combined, k))
        assert rank(base) == rank(scaled)


def test_oracle_rejects_large_documents(rng):
    doc = random_document(rng, max_sections=4, max_sentences=6)
    while doc.num_sentences <= 30:
        doc = random_document(rng, max_sections=8, max_sentences=10)
    es = embed_document(doc, make_provider("random:8:1"))
    with pytest.raises(ValueError):
        centrality_oracle(doc, es, RankConfig())
