import numpy as np
import pytest

from hiporank.embed import embed_document, make_provider
from hiporank.graph import (
    GraphError,
    RankConfig,
    build_graph,
    section_boundary,
    sentence_boundary,
    weight_inter,
    weight_intra,
)

from conftest import random_document

BOUNDARY = RankConfig()  # lambda1=0, lambda2=1, alpha=1, boundary, add
UNDIRECTED = RankConfig(positional="undirected")


def test_sentence_boundary_values():
    assert sentence_boundary(0, 5, 1.0) == 0.0
    assert sentence_boundary(4, 5, 1.0) == 1.0
    assert sentence_boundary(2, 5, 0.5) == 1.5


def test_section_boundary_values():
    assert section_boundary(0, 7, 1.0) == 0.0
    assert section_boundary(3, 4, 1.0) == 1.0
    # alpha=0 collapses every position onto the trailing boundary
    assert all(section_boundary(x, 6, 0.0) == 0.0 for x in range(6))


def test_weight_intra_boundary_branches():
    w_into_i = weight_intra(0.5, 0.0, 1.0, BOUNDARY)
    w_into_j = weight_intra(0.5, 1.0, 0.0, BOUNDARY)
    assert w_into_i == 0.5
    assert w_into_j == 0.0


def test_weight_intra_tie_takes_lambda1():
    cfg = RankConfig(lambda1=0.25)
    assert weight_intra(0.8, 1.0, 1.0, cfg) == pytest.approx(0.2)


def test_weight_intra_undirected_symmetric():
    assert weight_intra(0.5, 0.0, 1.0, UNDIRECTED) == 0.5
    assert weight_intra(0.5, 1.0, 0.0, UNDIRECTED) == 0.5


def test_weight_intra_negative_lambda_and_pruning():
    pruned = RankConfig(lambda1=-0.2, beta=0.0)
    unpruned = RankConfig(lambda1=-0.2)
    assert weight_intra(0.5, 1.0, 1.0, pruned) == 0.0
    assert weight_intra(0.5, 1.0, 1.0, unpruned) == pytest.approx(-0.1)


def test_weight_inter_branches():
    assert weight_inter(0.4, 0.0, 2.0, BOUNDARY) == 0.4  # receiver closer to boundary
    assert weight_inter(0.9, 1.0, 1.0, BOUNDARY) == 0.0  # tie -> lambda1
    assert weight_inter(0.9, 2.0, 0.0, BOUNDARY) == 0.0


def test_config_validation():
    with pytest.raises(GraphError):
        RankConfig(lambda1=1.0, lambda2=1.0)  # boundary requires lambda1 < lambda2
    with pytest.raises(GraphError):
        RankConfig(alpha=-0.1)
    with pytest.raises(GraphError):
        RankConfig(mu1=0.0)
    with pytest.raises(GraphError):
        RankConfig(positional="sideways")
    # undirected mode does not constrain the lambdas
    RankConfig(positional="undirected", lambda1=1.0, lambda2=1.0)


def two_by_three_doc():
    import random

    r = random.Random(99)
    while True:
        doc = random_document(r, max_sections=2, max_sentences=3)
        if len(doc.sections) == 2 and all(len(s) == 3 for s in doc.sections):
            return doc


def test_two_by_three_toy_edge_counts():
    doc = two_by_three_doc()
    es = embed_document(doc, make_provider("random:16:2"))
    g = build_graph(doc, es, BOUNDARY)
    assert g.num_intra_edges == 12
    assert g.num_inter_edges == 6
    # counting section<->sentence arrows as bidirectional pairs
    assert g.num_intra_edges + 2 * g.num_inter_edges == 24
    assert len(list(g.intra_edges())) == 12
    assert len(list(g.inter_edges())) == 6


def test_flat_toy_edge_count():
    doc = two_by_three_doc()
    es = embed_document(doc, make_provider("random:16:2"))
    g = build_graph(doc, es, RankConfig(hierarchy="none"))
    assert g.num_intra_edges == 30
    assert g.num_inter_edges == 0
    assert len(list(g.intra_edges())) == 30


def test_edge_count_formulas_random_shapes(rng):
    for i in range(100):
        doc = random_document(rng, article_id=f"g{i}", max_sections=5, max_sentences=7)
        es = embed_document(doc, make_provider("random:8:1"))
        g = build_graph(doc, es, BOUNDARY)
        sizes = [len(s) for s in doc.sections]
        assert g.num_intra_edges == sum(n * (n - 1) for n in sizes)
        assert g.num_inter_edges == sum(sizes) * (len(sizes) - 1)


def test_no_self_edges_no_own_section_inter(rng):
    doc = random_document(rng, max_sections=4, max_sentences=5)
    es = embed_document(doc, make_provider("random:8:1"))
    g = build_graph(doc, es, BOUNDARY)
    for sec, j, i, _ in g.intra_edges():
        assert j != i
    for J, I, _, _ in g.inter_edges():
        assert J != I


def test_single_section_doc_has_no_inter_edges():
    import random

    r = random.Random(5)
    doc = random_document(r, max_sections=1, max_sentences=5)
    es = embed_document(doc, make_provider("random:8:1"))
    g = build_graph(doc, es, BOUNDARY)
    assert g.num_inter_edges == 0
    assert not list(g.inter_edges())


def test_undirected_intra_blocks_symmetric(rng):
    doc = random_document(rng, max_sections=3, max_sentences=6)
    es = embed_document(doc, make_provider("random:16:3"))
    g = build_graph(doc, es, UNDIRECTED)
    for W in g.intra:
        assert np.allclose(W, W.T, atol=1e-12)


def test_lambda1_zero_zeroes_downweighted_direction(rng):
    doc = random_document(rng, max_sections=3, max_sentences=6)
    es = embed_document(doc, make_provider("random:16:3"))
    g = build_graph(doc, es, BOUNDARY)
    for sec, W in enumerate(g.intra):
        n = W.shape[0]
        d = [sentence_boundary(x, n, BOUNDARY.alpha) for x in range(n)]
        for j in range(n):
            for i in range(n):
                if i != j and d[i] >= d[j]:
                    assert W[j, i] == 0.0


def test_edge_weights_invariant_under_positive_scaling(rng):
    doc = random_document(rng, max_sections=3, max_sentences=5)
    es = embed_document(doc, make_provider("random:16:4"))
    g1 = build_graph(doc, es, BOUNDARY)
    es.sections = [b * 3.7 for b in es.sections]
    g2 = build_graph(doc, es, BOUNDARY)
    for a, b in zip(g1.intra, g2.intra):
        assert np.allclose(a, b, atol=1e-12)
    assert np.allclose(g1.inter, g2.inter, atol=1e-12)


def test_scaling_one_sentence_preserves_its_edges(rng):
    # scaling a single sentence vector cannot change intra weights anywhere,
    # nor the inter weights INTO that sentence (its own section's mean moves,
    # so edges that section sends elsewhere may legitimately change)
    doc = random_document(rng, max_sections=3, max_sentences=5)
    while len(doc.sections) < 2:
        doc = random_document(rng, max_sections=3, max_sentences=5)
    es = embed_document(doc, make_provider("random:16:9"))
    g1 = build_graph(doc, es, BOUNDARY)
    sec_idx = 0
    sent_idx = len(doc.sections[0]) - 1
    scaled = [b.copy() for b in es.sections]
    scaled[sec_idx][sent_idx] *= 12.5
    es.sections = scaled
    g2 = build_graph(doc, es, BOUNDARY)
    for a, b in zip(g1.intra, g2.intra):
        assert np.allclose(a, b, atol=1e-12)
    g = g1.global_index(sec_idx, sent_idx)
    assert np.allclose(g1.inter[:, g], g2.inter[:, g], atol=1e-12)


def test_pruning_removes_interval_below_beta(rng):
    doc = random_document(rng, max_sections=3, max_sentences=6)
    es = embed_document(doc, make_provider("random:16:5"))
    cfg = RankConfig(lambda1=-0.2, beta=0.05)
    g = build_graph(doc, es, cfg)
    for _, _, _, w in g.intra_edges():
        assert w == 0.0 or w >= cfg.beta
    for _, _, _, w in g.inter_edges():
        assert w == 0.0 or w >= cfg.beta


def test_shape_mismatch_raises(rng):
    doc = random_document(rng, max_sections=3, max_sentences=5)
    other = random_document(rng, max_sections=4, max_sentences=6, article_id="other")
    es = embed_document(doc, make_provider("random:8:1"))
    if [len(s) for s in other.sections] != [len(s) for s in doc.sections]:
        with pytest.raises(GraphError):
            build_graph(other, es, BOUNDARY)


def test_vectorized_weights_match_scalar_ops(rng):
    # every built edge must equal the scalar weight rule applied to raw cosines
    from hiporank.embed import cosine, section_embedding
    from hiporank.graph import section_boundary as sb

    doc = random_document(rng, max_sections=4, max_sentences=5)
    es = embed_document(doc, make_provider("random:16:6"))
    for cfg in (BOUNDARY, UNDIRECTED, RankConfig(positional="lead", lambda1=-0.2, beta=0.1)):
        g = build_graph(doc, es, cfg)
        for sec, j, i, w in g.intra_edges():
            n = len(doc.sections[sec])
            if cfg.positional == "lead":
                d_i, d_j = float(i), float(j)
            else:
                d_i = sentence_boundary(i, n, cfg.alpha)
                d_j = sentence_boundary(j, n, cfg.alpha)
            sim = cosine(es.sections[sec][j], es.sections[sec][i])
            assert w == pytest.approx(weight_intra(sim, d_i, d_j, cfg), abs=1e-12)
        N = len(doc.sections)
        sec_embs = [section_embedding(es, s).vector for s in doc.sections]
        for J, I, i, w in g.inter_edges():
            if cfg.positional == "lead":
                d_I, d_J = float(I), float(J)
            else:
                d_I = sb(I, N, cfg.alpha)
                d_J = sb(J, N, cfg.alpha)
            sim = cosine(sec_embs[J], es.sections[I][i])
            assert w == pytest.approx(weight_inter(sim, d_I, d_J, cfg), abs=1e-12)


def test_graph_json_dump_shape(rng):
    doc = random_document(rng, max_sections=2, max_sentences=3)
    es = embed_document(doc, make_provider("random:8:1"))
    g = build_graph(doc, es, BOUNDARY)
    payload = g.to_json_dict(doc.article_id, BOUNDARY)
    assert payload["mode"] == "hierarchical"
    assert len(payload["intra_edges"]) == g.num_intra_edges
    assert len(payload["inter_edges"]) == g.num_inter_edges
