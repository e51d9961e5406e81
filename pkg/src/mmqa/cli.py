"""Command line interface: ingest, ask, serve, eval."""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .answer import DEFAULT_K
from .attribution import DEFAULT_THRESHOLD
from .errors import MmqaError
from .evaluation import (
    DEFAULT_Z,
    agreement_report,
    aggregate,
    format_agreement_table,
    load_annotations,
)
from .index import EmbeddingIndex, build_index
from .ingestion import corpus_stats, load_corpus, save_corpus
from .mm_retrieval import DEFAULT_MIN_SCORE, PER_MODALITY, SINGLE
from .pipeline import AnswerPipeline, PipelineConfig
from .providers import (
    completion_provider_from_env,
    embedding_provider_from_env,
)
from .segmentation import DEFAULT_MAX_TOKENS, DEFAULT_MIN_TOKENS

CORPUS_FILE = "corpus.jsonl"
INDEX_FILE = "index.jsonl"


@click.group()
def main() -> None:
    """Multimodal question answering over a documentation corpus."""


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--min-tokens", default=DEFAULT_MIN_TOKENS, show_default=True)
@click.option("--max-tokens", default=DEFAULT_MAX_TOKENS, show_default=True)
def ingest(corpus_path: str, out_dir: str, min_tokens: int, max_tokens: int) -> None:
    """Segment a raw corpus, embed it, and write corpus + index files."""
    try:
        corpus = load_corpus(corpus_path, min_tokens=min_tokens, max_tokens=max_tokens)
    except MmqaError as exc:
        raise click.ClickException(str(exc)) from exc
    for warning in corpus.warnings:
        click.echo(f"warning: {warning}", err=True)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        index = build_index(corpus, embedding_provider_from_env())
    except MmqaError as exc:
        raise click.ClickException(str(exc)) from exc
    for item_id in index.skipped:
        click.echo(f"warning: {item_id} has no embeddable text, skipped", err=True)

    save_corpus(corpus, out / CORPUS_FILE)
    index.save(out / INDEX_FILE)
    stats = corpus_stats(corpus)
    stats["index_entries"] = len(index)
    click.echo(json.dumps(stats, indent=2))


def _load_pipeline(index_dir: str, config: PipelineConfig) -> AnswerPipeline:
    base = Path(index_dir)
    corpus_file = base / CORPUS_FILE
    index_file = base / INDEX_FILE
    for path in (corpus_file, index_file):
        if not path.exists():
            raise click.ClickException(
                f"{path} not found; run ingest with --out {index_dir} first"
            )
    corpus = load_corpus(corpus_file)
    index = EmbeddingIndex.load(index_file)
    return AnswerPipeline(
        corpus=corpus,
        index=index,
        embedder=embedding_provider_from_env(),
        completer=completion_provider_from_env(),
        config=config,
    )


@main.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("--k", default=DEFAULT_K, show_default=True)
@click.option("--text-only", is_flag=True)
@click.option("--attr-threshold", default=DEFAULT_THRESHOLD, show_default=True)
@click.option("--mm-min-score", default=DEFAULT_MIN_SCORE, show_default=True)
@click.option(
    "--mm-per-span",
    type=click.Choice([PER_MODALITY, SINGLE]),
    default=PER_MODALITY,
    show_default=True,
)
def ask(
    index_dir: str,
    query: str,
    k: int,
    text_only: bool,
    attr_threshold: float,
    mm_min_score: float,
    mm_per_span: str,
) -> None:
    """Answer one query and print the block-structured result as JSON."""
    config = PipelineConfig(
        k=k,
        attribution_threshold=attr_threshold,
        mm_min_score=mm_min_score,
        mm_per_span=mm_per_span,
    )
    pipeline = _load_pipeline(index_dir, config)
    try:
        result = pipeline.ask(query, text_only=text_only)
    except MmqaError as exc:
        raise click.ClickException(str(exc)) from exc
    spans = result.attributed.spans if result.attributed else []
    click.echo(
        json.dumps(
            {
                "query_id": result.query.query_id,
                "answer": result.answer.to_dict(),
                "text_answer": result.text_answer.text,
                "spans": [
                    {
                        "span_id": span.span_id,
                        "start_sentence": span.start_sentence,
                        "end_sentence": span.end_sentence,
                        "source_snippet_id": span.source_snippet_id,
                        "score": span.score,
                        "section_id": span.section_id,
                    }
                    for span in spans
                ],
                "timing_ms": result.timing_ms,
            },
            indent=2,
        )
    )


@main.command()
@click.option("--index", "index_dir", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--votes",
    "votes_path",
    default=None,
    type=click.Path(),
    help="CSV file for preference votes [default: <index>/votes.csv]",
)
def serve(index_dir: str, port: int, host: str, votes_path: str | None) -> None:
    """Serve the pipeline over HTTP."""
    import uvicorn

    from .service import create_app

    if votes_path is None:
        votes_path = str(Path(index_dir) / "votes.csv")
    app = create_app(
        loader=lambda: _load_pipeline(index_dir, PipelineConfig()),
        votes_path=votes_path,
    )
    uvicorn.run(app, host=host, port=port)


@main.command("eval")
@click.option(
    "--annotations", "annotations_path", required=True, type=click.Path(exists=True)
)
@click.option(
    "--treatment",
    type=click.Choice(["normal", "merging", "drop-outliers"]),
    default="normal",
    show_default=True,
)
@click.option(
    "--alpha-level",
    type=click.Choice(["nominal", "ordinal", "interval"]),
    default="ordinal",
    show_default=True,
)
@click.option("--z", default=DEFAULT_Z, show_default=True)
def eval_command(
    annotations_path: str, treatment: str, alpha_level: str, z: float
) -> None:
    """Aggregate an annotation CSV and report agreement statistics.

    The JSON report goes to stdout; the human-readable agreement table
    goes to stderr.
    """
    try:
        records = load_annotations(annotations_path)
        if not records:
            raise click.ClickException("annotation file has no records")
        summary = aggregate(records)
        report = agreement_report(
            records,
            treatment=treatment.replace("-", "_"),
            level=alpha_level,
            z=z,
        )
    except MmqaError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(
        json.dumps(
            {"aggregate": summary.to_dict(), "agreement": report.to_dict()},
            indent=2,
        )
    )
    click.echo(format_agreement_table(report), err=True)


if __name__ == "__main__":
    main()
