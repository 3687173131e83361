"""Command-line front end for the embedding exporter."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .exporter import ExportError, ExportJob, export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiporank-export",
        description="Export transformer sentence embeddings for a sectioned JSONL corpus",
    )
    parser.add_argument("--input", required=True, help="corpus JSONL path")
    parser.add_argument("--model", required=True, help="model name or local directory")
    parser.add_argument("--pooling", choices=["cls", "mean"], default="mean")
    parser.add_argument("--batch-size", dest="batch_size", type=int, default=32)
    parser.add_argument("--out", required=True, help="interchange JSONL output path")
    parser.add_argument("--limit", type=int, default=None)
    parser.add_argument("--max-length", dest="max_length", type=int, default=None)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    job = ExportJob(
        corpus_path=args.input,
        model=args.model,
        pooling=args.pooling,
        batch_size=args.batch_size,
        output_path=args.out,
        limit=args.limit,
        max_length=args.max_length,
        device=args.device,
    )
    try:
        stats = export(job)
    except ExportError as exc:
        print(json.dumps({"error": "ExportError", "message": str(exc)}), file=sys.stderr)
        return 1
    print(
        json.dumps(
            {
                "event": "export_done",
                "documents": stats.documents,
                "sentences": stats.sentences,
                "truncated_sentences": stats.truncated_sentences,
            }
        ),
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
