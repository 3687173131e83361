import csv
import random

import pytest
from scipy import stats as scipy_stats

from hiporank.analysis import (
    PositionGrid,
    SweepSpec,
    position_histogram,
    run_sweep,
    write_histogram_csv,
    write_positions_csv,
    write_sweep_csv,
)
from hiporank.evaluation import lead_summary
from hiporank.graph import RankConfig
from hiporank.summarize import ScoredSummary

from conftest import random_document

SMALL_SPEC = SweepSpec(
    lambda1_values=(0.0, 0.5),
    alpha_values=(0.5, 1.0),
    mu1_values=(1.0,),
    positional_modes=("boundary", "lead"),
    hierarchy_modes=("add", "none"),
    providers=("random:16:3",),
)


def sample_docs(rng, n=4):
    return [random_document(rng, article_id=f"sw{i}") for i in range(n)]


def test_sweep_rows_cover_grid_exactly_once(rng):
    docs = sample_docs(rng)
    result = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12))
    assert len(result.rows) == SMALL_SPEC.grid_size()
    assert not result.errors
    keys = {
        (r.provider, r.config.positional, r.config.hierarchy, r.config.lambda1,
         r.config.alpha, r.config.mu1)
        for r in result.rows
    }
    assert len(keys) == len(result.rows)


def test_sweep_sorted_by_rouge_l_desc(rng):
    docs = sample_docs(rng)
    result = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12))
    values = [r.rougeL_f for r in result.rows]
    assert values == sorted(values, reverse=True)


def test_sweep_deterministic(rng):
    docs = sample_docs(rng)
    r1 = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12))
    r2 = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12))
    assert r1.as_dict() == r2.as_dict()


def test_sweep_parallel_matches_serial(rng):
    docs = sample_docs(rng)
    serial = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12), workers=1)
    parallel = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12), workers=3)
    assert serial.as_dict() == parallel.as_dict()


def test_published_grid_size_is_405():
    spec = SweepSpec()
    assert spec.grid_size() == 3 * 5 * 3 * 3 * 3


def test_sweep_csv_schema(tmp_path, rng):
    docs = sample_docs(rng, n=2)
    result = run_sweep(docs, SMALL_SPEC, base=RankConfig(word_limit=12))
    path = tmp_path / "sweep.csv"
    write_sweep_csv(result, path)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(result.rows)
    assert set(rows[0]) == {
        "provider", "positional", "hierarchy", "lambda1", "lambda2", "alpha",
        "mu1", "beta", "word_limit", "norm", "rouge1_f", "rouge2_f", "rougeL_f",
    }


def test_sweep_empty_sample_rejected():
    with pytest.raises(ValueError):
        run_sweep([], SweepSpec())


# ---------------------------------------------------------------------------
# position histograms
# ---------------------------------------------------------------------------


def test_lead_positions_concentrate_near_zero(rng):
    docs = [random_document(rng, article_id=f"l{i}", max_sections=4, max_sentences=6) for i in range(30)]
    summaries = [lead_summary(doc, 5) for doc in docs]
    grid = position_histogram(summaries, docs, bins=10)
    assert all(rel < 0.51 for _, _, rel in grid.points)
    low_mass = sum(grid.density[:3])
    assert low_mass > 0.8


def test_uniform_random_picks_approximately_uniform():
    # docs of exactly 50 sentences so relative positions tile [0, 1) evenly
    r = random.Random(31)
    from hiporank.corpus import document_from_record

    docs = []
    for i in range(120):
        sections = [["w w w" for _ in range(10)] for _ in range(5)]
        docs.append(
            document_from_record(
                {"article_id": f"u{i}", "abstract_text": [], "sections": sections,
                 "section_names": [str(k) for k in range(5)]}
            )
        )
    summaries = []
    for doc in docs:
        coords = [(s.section_index, s.sentence_index) for s in doc.iter_sentences()]
        picks = sorted(r.sample(coords, k=10))
        summaries.append(
            ScoredSummary(doc.article_id, picks, [doc.sentence(*p).text for p in picks],
                          total_tokens=0, scores=[0.0] * len(picks))
        )
    grid = position_histogram(summaries, docs, bins=10)
    assert sum(grid.counts) >= 1000
    _, p = scipy_stats.chisquare(grid.counts)
    assert p > 1e-4


def test_docs_ordered_by_increasing_length(rng):
    docs = [random_document(rng, article_id=f"o{i}") for i in range(10)]
    summaries = [lead_summary(doc, 3) for doc in docs]
    grid = position_histogram(summaries, docs, bins=5)
    by_rank = {}
    for rank, aid, _ in grid.points:
        by_rank[aid] = rank
    lengths = {d.article_id: d.num_tokens for d in docs}
    ordered = sorted(by_rank, key=lambda aid: by_rank[aid])
    assert all(
        lengths[a] <= lengths[b] for a, b in zip(ordered, ordered[1:])
    )


def test_positions_csv_written(tmp_path, rng):
    docs = [random_document(rng, article_id=f"c{i}") for i in range(5)]
    summaries = [lead_summary(doc, 4) for doc in docs]
    grid = position_histogram(summaries, docs, bins=4)
    points_path = tmp_path / "points.csv"
    hist_path = tmp_path / "hist.csv"
    write_positions_csv(grid, points_path)
    write_histogram_csv(grid, hist_path)
    with open(points_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(grid.points)
    with open(hist_path, newline="") as fh:
        hist = list(csv.DictReader(fh))
    assert len(hist) == 4
    assert sum(float(h["density"]) for h in hist) == pytest.approx(1.0, abs=1e-6)


def test_unknown_summary_rejected(rng):
    docs = [random_document(rng, article_id="known")]
    stray = ScoredSummary("stray", [(0, 0)], ["x"], 1, [0.0])
    with pytest.raises(ValueError):
        position_histogram([stray], docs)
