"""Unified command-line entry point.

Subcommands: summarize, evaluate, oracle, lead, sweep, positions, stats,
export-graph. Values resolve as: config file > explicit flag > preset >
built-in default. Worker count falls back to the HIPORANK_WORKERS
environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path

from . import analysis
from .corpus import CorpusError, ParseStats, document_stats, parse_corpus
from .embed import ProviderSpec, embed_document, make_provider
from .evaluation import evaluate_corpus, lead_summary, oracle_summary
from .graph import RankConfig, build_graph, compute_similarities
from .rank import centrality
from .summarize import ScoredSummary, select

logger = logging.getLogger(__name__)

PRESETS = {
    "pubmed": {"mu1": 0.5, "word_limit": 203},
    "arxiv": {"mu1": 1.0, "word_limit": 220},
}

_RANK_FIELDS = [
    "alpha", "lambda1", "lambda2", "beta", "mu1", "word_limit",
    "positional", "hierarchy", "norm", "budget",
]


def _add_rank_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--lambda1", type=float, default=None)
    p.add_argument("--lambda2", type=float, default=None)
    p.add_argument("--beta", type=float, default=None, help="prune edges below this weight (default: disabled)")
    p.add_argument("--mu1", type=float, default=None)
    p.add_argument("--word-limit", dest="word_limit", type=int, default=None)
    p.add_argument("--positional", choices=["boundary", "lead", "undirected"], default=None)
    p.add_argument("--hierarchy", choices=["add", "multiply", "none"], default=None)
    p.add_argument("--norm", choices=["neighbors", "size"], default=None)
    p.add_argument("--budget", choices=["pass", "strict"], default=None)
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="JSON config file; its values override flags")
    p.add_argument("--strict", action="store_true", default=None)
    p.add_argument("--limit", type=int, default=None, help="cap the number of ingested documents")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="seed for the random provider when its spec omits one")
    p.add_argument("-v", "--verbose", action="store_true", default=None)


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not getattr(args, "config", None):
        return
    try:
        overrides = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except Exception as exc:
        parser.error(f"cannot read config file {args.config}: {exc}")
    if not isinstance(overrides, dict):
        parser.error(f"config file {args.config} must hold a JSON object")
    for key, value in overrides.items():
        if not hasattr(args, key):
            parser.error(f"config file {args.config}: unknown option {key!r}")
        setattr(args, key, value)


def _rank_config(args: argparse.Namespace) -> RankConfig:
    values = {}
    preset = PRESETS.get(getattr(args, "preset", None) or "", {})
    for name in _RANK_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
        elif name in preset:
            values[name] = preset[name]
    return RankConfig(**values)


def _workers(args: argparse.Namespace) -> int:
    if getattr(args, "workers", None) is not None:
        return max(1, args.workers)
    return max(1, int(os.environ.get("HIPORANK_WORKERS", "1")))


def _provider_spec(args: argparse.Namespace) -> ProviderSpec:
    spec = ProviderSpec.parse(getattr(args, "provider", None) or "random:200:0")
    if spec.name == "random" and len(spec.args) == 1 and getattr(args, "seed", None) is not None:
        spec = ProviderSpec(spec.name, (spec.args[0], str(args.seed)))
    return spec


def _load_docs(args: argparse.Namespace, stats: ParseStats):
    return parse_corpus(
        args.input, limit=args.limit, strict=bool(args.strict), stats=stats
    )


def _report_parse_stats(stats: ParseStats) -> None:
    print(json.dumps({"event": "parse_stats", **stats.as_dict()}), file=sys.stderr)


def _write_jsonl(records, path: str | None):
    count = 0
    if path in (None, "-"):
        for record in records:
            print(json.dumps(record))
            count += 1
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for record in records:
                fh.write(json.dumps(record) + "\n")
                count += 1
    return count


# ---------------------------------------------------------------------------
# Per-document pipeline (worker-friendly)
# ---------------------------------------------------------------------------

_POOL_STATE: dict = {}


def _pipeline_one(doc):
    provider = _POOL_STATE["provider"]
    cfg = _POOL_STATE["cfg"]
    want_scores = _POOL_STATE["want_scores"]
    try:
        es = embed_document(doc, provider)
        g = build_graph(doc, es, cfg)
        scores = centrality(g, cfg)
        summary = select(scores, doc, cfg.word_limit, cfg.budget)
        return ("ok", summary, [s.as_dict() for s in scores] if want_scores else None)
    except Exception as exc:  # lenient mode reports and skips
        return ("err", doc.article_id, str(exc))


def _run_pipeline(docs, provider, cfg, workers: int, strict: bool, want_scores: bool):
    """Yield ('ok', summary, scores|None) / ('err', id, msg) in input order."""
    _POOL_STATE.update(provider=provider, cfg=cfg, want_scores=want_scores)
    if workers <= 1:
        for doc in docs:
            result = _pipeline_one(doc)
            if result[0] == "err" and strict:
                raise RuntimeError(f"{result[1]}: {result[2]}")
            yield result
        return
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(processes=workers) as pool:
        for result in pool.imap(_pipeline_one, docs, chunksize=4):
            if result[0] == "err" and strict:
                pool.terminate()
                raise RuntimeError(f"{result[1]}: {result[2]}")
            yield result


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_summarize(args) -> int:
    cfg = _rank_config(args)
    stats = ParseStats()
    spec = _provider_spec(args)
    if spec.name == "tfidf":
        fit_docs = list(_load_docs(args, stats))  # one parse pass: fit idf, then reuse
        provider = make_provider(spec, corpus_docs=fit_docs)
        docs = iter(fit_docs)
    else:
        provider = make_provider(spec)
        docs = _load_docs(args, stats)

    score_fh = open(args.score_dump, "w", encoding="utf-8") if args.score_dump else None
    skipped = 0

    def records():
        nonlocal skipped
        for result in _run_pipeline(docs, provider, cfg, _workers(args), bool(args.strict), score_fh is not None):
            if result[0] == "err":
                skipped += 1
                logger.warning("%s: skipped (%s)", result[1], result[2])
                continue
            _, summary, scores = result
            if score_fh is not None:
                score_fh.write(json.dumps({"article_id": summary.article_id, "scores": scores}) + "\n")
            yield summary.to_record()

    try:
        count = _write_jsonl(records(), args.out)
    finally:
        if score_fh is not None:
            score_fh.close()
    _report_parse_stats(stats)
    print(
        json.dumps({"event": "summarize_done", "written": count, "skipped_documents": skipped}),
        file=sys.stderr,
    )
    if count == 0:
        logger.warning("no documents summarized")
    return 0


def _cmd_evaluate(args) -> int:
    summaries = []
    with open(args.system, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                summaries.append(ScoredSummary.from_record(json.loads(line)))
    stats = ParseStats()
    refs = list(parse_corpus(args.reference, strict=bool(args.strict), stats=stats))
    report = evaluate_corpus(summaries, refs, stem=bool(args.stem))
    payload = report.as_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    else:
        print(json.dumps(payload, indent=2))
    if args.csv:
        import csv as _csv

        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["article_id", "r1_f", "r2_f", "rl_f"])
            for aid, scores in report.per_document:
                d = scores.as_dict()
                writer.writerow([aid, d["rouge1"]["f"], d["rouge2"]["f"], d["rougeL"]["f"]])
    return 0


def _cmd_oracle(args) -> int:
    cfg = _rank_config(args)
    stats = ParseStats()
    skipped = 0

    def records():
        nonlocal skipped
        for doc in _load_docs(args, stats):
            try:
                yield oracle_summary(doc, cfg.word_limit, stem=bool(args.stem)).to_record()
            except Exception as exc:
                if args.strict:
                    raise
                skipped += 1
                logger.warning("%s: oracle failed (%s)", doc.article_id, exc)

    count = _write_jsonl(records(), args.out)
    _report_parse_stats(stats)
    print(json.dumps({"event": "oracle_done", "written": count, "skipped_documents": skipped}), file=sys.stderr)
    return 0


def _cmd_lead(args) -> int:
    cfg = _rank_config(args)
    stats = ParseStats()
    count = _write_jsonl(
        (lead_summary(doc, cfg.word_limit).to_record() for doc in _load_docs(args, stats)),
        args.out,
    )
    _report_parse_stats(stats)
    print(json.dumps({"event": "lead_done", "written": count}), file=sys.stderr)
    return 0


def _cmd_stats(args) -> int:
    stats = ParseStats()
    corpus_stats = document_stats(_load_docs(args, stats))
    print(json.dumps({**corpus_stats.as_dict(), "parse": stats.as_dict()}))
    return 0


def _cmd_sweep(args) -> int:
    spec = analysis.SweepSpec()
    if args.providers:
        spec.providers = [p.strip() for p in args.providers.split(",") if p.strip()]
    for flag, attr, cast in [
        ("grid_lambda1", "lambda1_values", float),
        ("grid_alpha", "alpha_values", float),
        ("grid_mu1", "mu1_values", float),
        ("grid_positional", "positional_modes", str),
        ("grid_hierarchy", "hierarchy_modes", str),
    ]:
        raw = getattr(args, flag)
        if raw:
            setattr(spec, attr, [cast(v.strip()) for v in raw.split(",") if v.strip()])

    stats = ParseStats()
    sample = args.sample if args.sample is not None else 1000
    limit = args.limit if args.limit is not None else sample
    docs = list(parse_corpus(args.input, limit=min(sample, limit), strict=bool(args.strict), stats=stats))
    base = _rank_config(args)
    result = analysis.run_sweep(docs, spec, base=base, stem=bool(args.stem), workers=_workers(args))

    if args.out_csv:
        analysis.write_sweep_csv(result, args.out_csv)
    payload = result.as_dict()
    if args.out_json:
        Path(args.out_json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    if not args.out_csv and not args.out_json:
        print(json.dumps(payload, indent=2))
    _report_parse_stats(stats)
    print(
        json.dumps({"event": "sweep_done", "rows": len(result.rows), "errors": len(result.errors)}),
        file=sys.stderr,
    )
    return 0


def _cmd_positions(args) -> int:
    summaries = []
    with open(args.system, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                summaries.append(ScoredSummary.from_record(json.loads(line)))
    stats = ParseStats()
    docs = list(parse_corpus(args.input, strict=bool(args.strict), stats=stats))
    grid = analysis.position_histogram(summaries, docs, bins=args.bins)
    analysis.write_positions_csv(grid, args.out)
    if args.hist:
        analysis.write_histogram_csv(grid, args.hist)
    return 0


def _cmd_export_graph(args) -> int:
    cfg = _rank_config(args)
    stats = ParseStats()
    spec = _provider_spec(args)
    docs = list(_load_docs(args, stats))
    if spec.name == "tfidf":
        provider = make_provider(spec, corpus_docs=docs)
    else:
        provider = make_provider(spec)
    for doc in docs:
        if doc.article_id == args.article_id:
            es = embed_document(doc, provider)
            g = build_graph(doc, es, cfg, sims=compute_similarities(es))
            payload = g.to_json_dict(doc.article_id, cfg)
            if args.out:
                Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
            else:
                print(json.dumps(payload, indent=2))
            return 0
    raise CorpusError(f"article {args.article_id!r} not found in {args.input}")


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiporank",
        description="Extractive summarization of sectioned documents via hierarchical sentence graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="summarize a JSONL corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None, help="output JSONL (default: stdout)")
    p.add_argument("--provider", default="random:200:0")
    p.add_argument("--score-dump", dest="score_dump", default=None, help="optional per-sentence score JSONL")
    _add_rank_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("evaluate", help="score system summaries against references")
    p.add_argument("--system", required=True, help="summaries JSONL (summarize/oracle/lead output)")
    p.add_argument("--reference", required=True, help="reference corpus JSONL")
    p.add_argument("--out", default=None, help="JSON report path (default: stdout)")
    p.add_argument("--csv", default=None, help="optional per-document CSV")
    p.add_argument("--stem", action="store_true", default=None)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("oracle", help="greedy bigram-overlap upper-bound summaries")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--stem", action="store_true", default=None)
    _add_rank_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("lead", help="document-prefix baseline summaries")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    _add_rank_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_lead)

    p = sub.add_parser("sweep", help="hyperparameter grid evaluation (full grid by default)")
    p.add_argument("--input", required=True)
    p.add_argument("--providers", default=None, help="comma-separated provider specs")
    p.add_argument("--sample", type=int, default=None, help="validation subsample size (default 1000)")
    p.add_argument("--grid-lambda1", dest="grid_lambda1", default=None)
    p.add_argument("--grid-alpha", dest="grid_alpha", default=None)
    p.add_argument("--grid-mu1", dest="grid_mu1", default=None)
    p.add_argument("--grid-positional", dest="grid_positional", default=None)
    p.add_argument("--grid-hierarchy", dest="grid_hierarchy", default=None)
    p.add_argument("--out-csv", dest="out_csv", default=None)
    p.add_argument("--out-json", dest="out_json", default=None)
    p.add_argument("--stem", action="store_true", default=None)
    _add_rank_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("positions", help="relative source positions of selected sentences")
    p.add_argument("--system", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--out", required=True, help="points CSV path")
    p.add_argument("--hist", default=None, help="optional aggregate histogram CSV path")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_positions)

    p = sub.add_parser("stats", help="corpus ingestion statistics")
    p.add_argument("--input", required=True)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("export-graph", help="dump one document's graph as JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--article-id", dest="article_id", required=True)
    p.add_argument("--provider", default="random:200:0")
    p.add_argument("--out", default=None)
    _add_rank_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_export_graph)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config_file(args, parser)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", None) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except Exception as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
