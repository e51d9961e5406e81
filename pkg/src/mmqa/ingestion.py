"""Load and save the JSONL corpus format.

One JSON object per line, discriminated by "kind": document records embed
their sections (with raw bodies), asset records carry the flat asset
fields. Loading segments every section body into token-bounded snippets
with ids of the form "<section_id>/s<n>".
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .corpus import (
    MODALITIES,
    Corpus,
    CorpusDocument,
    MultimodalAsset,
    Section,
    TextSnippet,
    flatten_table,
)
from .errors import IntegrityError, ParseError
from .segmentation import DEFAULT_MAX_TOKENS, DEFAULT_MIN_TOKENS, segment_text
from .tokenizer import TokenCounter, count_tokens

_ASSET_TEXT_FIELDS = (
    "uri",
    "payload",
    "pre_context",
    "post_context",
    "enrichment",
    "transcript",
    "title",
    "heading",
    "doc_url",
)


def load_corpus(
    path: str | Path,
    tokenizer: TokenCounter = count_tokens,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> Corpus:
    """Parse a JSONL corpus file; raises ParseError with the 1-based line
    number on malformed records and IntegrityError on duplicate ids or
    dangling references."""
    documents: list[CorpusDocument] = []
    assets: list[MultimodalAsset] = []
    warnings: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(record, dict):
                raise ParseError("record is not a JSON object", line=lineno)
            kind = record.get("kind")
            if kind == "document":
                documents.append(_parse_document(record, lineno))
            elif kind == "asset":
                asset, warning = _parse_asset(record, lineno)
                assets.append(asset)
                if warning:
                    warnings.append(warning)
            else:
                raise ParseError(f"unknown record kind {kind!r}", line=lineno)

    snippets = []
    seen_docs: set[str] = set()
    for doc in documents:
        if doc.doc_id in seen_docs:
            raise IntegrityError(f"duplicate doc_id {doc.doc_id!r}")
        seen_docs.add(doc.doc_id)
        for section in doc.sections:
            for i, text in enumerate(
                segment_text(section.body, tokenizer, min_tokens, max_tokens)
            ):
                snippets.append(
                    TextSnippet(
                        snippet_id=f"{section.section_id}/s{i}",
                        section_id=section.section_id,
                        text=text,
                        token_count=tokenizer(text),
                    )
                )
    return Corpus(documents, snippets, assets, warnings)


def _require(record: dict, key: str, lineno: int) -> Any:
    if key not in record:
        raise ParseError(f"missing field {key!r}", line=lineno)
    return record[key]


def _text_field(record: dict, key: str, lineno: int, default: str | None = None) -> str:
    if key not in record:
        if default is None:
            raise ParseError(f"missing field {key!r}", line=lineno)
        return default
    value = record[key]
    if not isinstance(value, str):
        raise ParseError(f"field {key!r} is not a string", line=lineno)
    return value


def _parse_document(record: dict, lineno: int) -> CorpusDocument:
    doc_id = _text_field(record, "doc_id", lineno)
    raw_sections = _require(record, "sections", lineno)
    if not isinstance(raw_sections, list) or not raw_sections:
        raise ParseError("document has no sections", line=lineno)
    sections = []
    for raw in raw_sections:
        if not isinstance(raw, dict):
            raise ParseError("section is not a JSON object", line=lineno)
        chain = _require(raw, "heading_chain", lineno)
        if (
            not isinstance(chain, list)
            or not chain
            or not all(isinstance(h, str) for h in chain)
        ):
            raise ParseError("heading_chain must be a non-empty list of strings", line=lineno)
        asset_ids = raw.get("assets", [])
        if not isinstance(asset_ids, list) or not all(
            isinstance(a, str) for a in asset_ids
        ):
            raise ParseError("assets must be a list of asset ids", line=lineno)
        sections.append(
            Section(
                section_id=_text_field(raw, "section_id", lineno),
                heading_chain=tuple(chain),
                body=_text_field(raw, "body", lineno),
                assets=tuple(asset_ids),
            )
        )
    return CorpusDocument(
        doc_id=doc_id,
        title=_text_field(record, "title", lineno, default=""),
        url=_text_field(record, "url", lineno, default=""),
        sections=tuple(sections),
    )


def _parse_asset(record: dict, lineno: int) -> tuple[MultimodalAsset, str | None]:
    asset_id = _text_field(record, "asset_id", lineno)
    modality = _text_field(record, "modality", lineno)
    if modality not in MODALITIES:
        raise ParseError(f"unknown modality {modality!r}", line=lineno)
    section_id = _text_field(record, "section_id", lineno)
    fields = {
        key: _text_field(record, key, lineno, default="") for key in _ASSET_TEXT_FIELDS
    }

    warning = None
    if modality == "image" and not fields["enrichment"]:
        raise ParseError(f"image {asset_id!r} has no caption", line=lineno)
    if modality == "table":
        if not fields["payload"]:
            raise ParseError(f"table {asset_id!r} has no payload", line=lineno)
        try:
            flattened = flatten_table(fields["payload"])
        except (json.JSONDecodeError, TypeError) as exc:
            raise ParseError(
                f"table {asset_id!r} payload is not valid JSON", line=lineno
            ) from exc
        # flattened rendering wins; a hand-authored enrichment is kept as-is
        if not fields["enrichment"]:
            fields["enrichment"] = flattened
    if modality == "video" and not fields["enrichment"] and not fields["transcript"]:
        warning = (
            f"video {asset_id!r} has neither summary nor transcript; "
            "retrievable only via surrounding context"
        )

    asset = MultimodalAsset(
        asset_id=asset_id, modality=modality, section_id=section_id, **fields
    )
    return asset, warning


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus back out in the JSONL input format."""
    with open(path, "w", encoding="utf-8") as handle:
        for doc in corpus.documents:
            record = {
                "kind": "document",
                "doc_id": doc.doc_id,
                "title": doc.title,
                "url": doc.url,
                "sections": [
                    {
                        "section_id": s.section_id,
                        "heading_chain": list(s.heading_chain),
                        "body": s.body,
                        "assets": list(s.assets),
                    }
                    for s in doc.sections
                ],
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        for asset in corpus.assets:
            record = {"kind": "asset", "asset_id": asset.asset_id,
                      "modality": asset.modality, "section_id": asset.section_id}
            for key in _ASSET_TEXT_FIELDS:
                value = getattr(asset, key)
                if value:
                    record[key] = value
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def corpus_stats(corpus: Corpus, tokenizer: TokenCounter = count_tokens) -> dict:
    """Per-modality counts and mean token lengths.

    Mirrors the dataset-statistics layout: text reports content tokens,
    image and video report context plus caption/summary tokens, tables
    report context plus flattened-content tokens. Averages are None when
    a modality is absent.
    """

    def mean(values: list[int]) -> float | None:
        if not values:
            return None
        return sum(values) / len(values)

    by_modality: dict[str, list[MultimodalAsset]] = {m: [] for m in MODALITIES}
    for asset in corpus.assets:
        by_modality[asset.modality].append(asset)

    def context_tokens(asset: MultimodalAsset) -> int:
        return tokenizer(asset.pre_context) + tokenizer(asset.post_context)

    images = by_modality["image"]
    tables = by_modality["table"]
    videos = by_modality["video"]
    return {
        "text": {
            "count": len(corpus.snippets),
            "avg_content_tokens": mean([s.token_count for s in corpus.snippets]),
        },
        "image": {
            "count": len(images),
            "avg_context_tokens": mean([context_tokens(a) for a in images]),
            "avg_enrichment_tokens": mean([tokenizer(a.enrichment) for a in images]),
        },
        "video": {
            "count": len(videos),
            "avg_context_tokens": mean([context_tokens(a) for a in videos]),
            "avg_enrichment_tokens": mean([tokenizer(a.enrichment) for a in videos]),
        },
        "table": {
            "count": len(tables),
            "avg_context_tokens": mean([context_tokens(a) for a in tables]),
            "avg_content_tokens": mean([tokenizer(a.enrichment) for a in tables]),
        },
    }
