"""Turn an attributed answer plus selected assets into the final
block-structured multimodal answer.

Placeholder tokens are inserted after the last sentence of each anchoring
span, the provider is prompted to rewrite the draft placing one ``![k]``
marker per placeholder, and the output is parsed back into blocks. Any
provider failure or marker mismatch falls back to a deterministic
template that splits the draft at the tokens, so refinement as a whole
cannot fail.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .attribution import AttributedAnswer
from .corpus import MODALITY_RANK, Corpus, MultimodalAsset
from .errors import IntegrityError, TransportError
from .mm_retrieval import SelectionResult
from .prompts import (
    MARKER_RE,
    PLACEHOLDER_RE,
    REFINE_SYSTEM,
    marker_token,
    placeholder_token,
)
from .providers import CompletionProvider
from .sentences import split_sentences


@dataclass(frozen=True)
class Placeholder:
    token: str
    asset_id: str
    span_id: str
    insertion_offset: int  # offset into the original answer text


@dataclass
class PlaceholderDoc:
    text_with_placeholders: str
    placeholders: list[Placeholder]
    query_id: str
    original_text: str


@dataclass
class RefinementPrompt:
    question: str
    doc: PlaceholderDoc
    asset_contexts: list[dict]
    exemplars: list[dict] = field(default_factory=list)


@dataclass
class MultimodalAnswer:
    query_id: str
    blocks: list[dict]
    provenance: list[dict]

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "blocks": [dict(b) for b in self.blocks],
            "provenance": [dict(p) for p in self.provenance],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MultimodalAnswer":
        return cls(
            query_id=payload["query_id"],
            blocks=[dict(b) for b in payload["blocks"]],
            provenance=[dict(p) for p in payload["provenance"]],
        )

    def validate(self) -> None:
        """Structural checks; raises IntegrityError on violation."""
        if not self.blocks:
            raise IntegrityError("answer has no blocks")
        seen_assets: set[str] = set()
        for i, block in enumerate(self.blocks):
            kind = block.get("type")
            if kind == "text":
                if not block.get("text"):
                    raise IntegrityError(f"text block {i} is empty")
                if PLACEHOLDER_RE.search(block["text"]):
                    raise IntegrityError(f"text block {i} contains a placeholder")
            elif kind == "image":
                _require_keys(block, i, "uri", "caption")
            elif kind == "table":
                _require_keys(block, i, "payload", "text")
            elif kind == "video":
                _require_keys(block, i, "uri", "summary")
            else:
                raise IntegrityError(f"block {i} has unknown type {kind!r}")
        for entry in self.provenance:
            asset_id = entry.get("asset_id")
            if asset_id is not None:
                if asset_id in seen_assets:
                    raise IntegrityError(f"asset {asset_id!r} appears twice")
                seen_assets.add(asset_id)


def _require_keys(block: dict, i: int, *keys: str) -> None:
    for key in keys:
        if key not in block:
            raise IntegrityError(f"block {i} is missing {key!r}")


def load_exemplars() -> list[dict]:
    data = resources.files("mmqa.data").joinpath("refinement_exemplars.json")
    return json.loads(data.read_text(encoding="utf-8"))


def insert_placeholders(
    attributed: AttributedAnswer, selection: SelectionResult
) -> PlaceholderDoc:
    """Insert one token per selected asset after its span's last sentence.

    Assets landing on the same span are ordered image < table < video;
    numbering is dense and follows document order.
    """
    answer = attributed.answer
    if PLACEHOLDER_RE.search(answer.text):
        raise IntegrityError("answer text already contains placeholder tokens")
    spans_by_id = {span.span_id: span for span in attributed.spans}
    pending = []
    for candidate in selection.selected:
        span = spans_by_id.get(candidate.span_id)
        if span is None:
            raise IntegrityError(f"candidate references unknown span {candidate.span_id!r}")
        offset = answer.sentences[span.end_sentence][1]
        pending.append(
            (offset, MODALITY_RANK[candidate.modality], candidate.asset_id, candidate)
        )
    pending.sort(key=lambda item: item[:3])

    placeholders: list[Placeholder] = []
    pieces: list[str] = []
    cursor = 0
    for k, (offset, _, _, candidate) in enumerate(pending, start=1):
        token = placeholder_token(k)
        pieces.append(answer.text[cursor:offset])
        pieces.append(" " + token)
        cursor = offset
        placeholders.append(
            Placeholder(
                token=token,
                asset_id=candidate.asset_id,
                span_id=candidate.span_id,
                insertion_offset=offset,
            )
        )
    pieces.append(answer.text[cursor:])
    return PlaceholderDoc(
        text_with_placeholders="".join(pieces),
        placeholders=placeholders,
        query_id=answer.query_id,
        original_text=answer.text,
    )


def build_refinement_prompt(
    question: str, doc: PlaceholderDoc, corpus: Corpus
) -> RefinementPrompt:
    contexts = []
    for k, placeholder in enumerate(doc.placeholders, start=1):
        asset = corpus.assets_by_id[placeholder.asset_id]
        contexts.append(
            {
                "k": k,
                "modality": asset.modality,
                "headings": " > ".join(corpus.heading_chain(asset.section_id)),
                "enrichment": asset.enrichment,
                "pre_context": asset.pre_context,
                "post_context": asset.post_context,
            }
        )
    return RefinementPrompt(
        question=question, doc=doc, asset_contexts=contexts, exemplars=load_exemplars()
    )


def render_refinement_prompt(prompt: RefinementPrompt) -> str:
    lines: list[str] = []
    for exemplar in prompt.exemplars:
        lines.append(f"Example question: {exemplar['question']}")
        lines.append(f"Example draft:\n{exemplar['draft']}")
        lines.append(f"Example answer:\n{exemplar['answer']}")
        lines.append("")
    lines.append(f"Question: {prompt.question}")
    lines.append("")
    lines.append(f"Draft answer:\n{prompt.doc.text_with_placeholders}")
    if prompt.asset_contexts:
        lines.append("")
        lines.append("Media items:")
        for ctx in prompt.asset_contexts:
            lines.append(f"[ASSET {ctx['k']}] ({ctx['modality']}) {ctx['headings']}")
            for key in ("pre_context", "enrichment", "post_context"):
                if ctx[key]:
                    lines.append(ctx[key])
    return "\n".join(lines)


def refine(
    prompt: RefinementPrompt, provider: CompletionProvider, corpus: Corpus
) -> MultimodalAnswer:
    """Provider-refined answer, or the deterministic template on any
    provider failure or marker-contract violation."""
    doc = prompt.doc
    if not doc.placeholders:
        # nothing to integrate, and the provider call could only drift
        return template_refine(doc, corpus)
    try:
        completion = provider.complete(REFINE_SYSTEM, render_refinement_prompt(prompt))
        answer = _parse_refined(completion, doc, corpus)
        if answer is not None:
            answer.validate()
            return answer
    except (TransportError, IntegrityError):
        pass
    return template_refine(doc, corpus)


def _parse_refined(
    completion: str, doc: PlaceholderDoc, corpus: Corpus
) -> MultimodalAnswer | None:
    """Markers must map one-to-one onto placeholders; None when they don't."""
    markers = [int(m.group(1)) for m in MARKER_RE.finditer(completion)]
    if sorted(markers) != list(range(1, len(doc.placeholders) + 1)):
        return None
    if PLACEHOLDER_RE.search(completion):
        return None
    by_k = {k: p for k, p in enumerate(doc.placeholders, start=1)}
    blocks: list[dict] = []
    provenance: list[dict] = []
    cursor = 0
    for match in MARKER_RE.finditer(completion):
        _append_text_block(blocks, completion[cursor : match.start()])
        placeholder = by_k[int(match.group(1))]
        _append_media_block(blocks, provenance, placeholder, corpus)
        cursor = match.end()
    _append_text_block(blocks, completion[cursor:])
    if not blocks:
        return None
    return MultimodalAnswer(query_id=doc.query_id, blocks=blocks, provenance=provenance)


def template_refine(doc: PlaceholderDoc, corpus: Corpus) -> MultimodalAnswer:
    """Split the draft at its tokens; each token becomes its media block."""
    blocks: list[dict] = []
    provenance: list[dict] = []
    text = doc.text_with_placeholders
    cursor = 0
    by_token = {p.token: p for p in doc.placeholders}
    for match in PLACEHOLDER_RE.finditer(text):
        _append_text_block(blocks, text[cursor : match.start()])
        _append_media_block(blocks, provenance, by_token[match.group(0)], corpus)
        cursor = match.end()
    _append_text_block(blocks, text[cursor:])
    if not blocks:
        _append_text_block(blocks, doc.original_text)
    answer = MultimodalAnswer(
        query_id=doc.query_id, blocks=blocks, provenance=provenance
    )
    answer.validate()
    return answer


def _append_text_block(blocks: list[dict], text: str) -> None:
    text = text.strip()
    if text:
        blocks.append({"type": "text", "text": text})


def _append_media_block(
    blocks: list[dict],
    provenance: list[dict],
    placeholder: Placeholder,
    corpus: Corpus,
) -> None:
    asset = corpus.assets_by_id[placeholder.asset_id]
    blocks.append(_media_block(asset))
    provenance.append(
        {
            "block": len(blocks) - 1,
            "asset_id": placeholder.asset_id,
            "span_id": placeholder.span_id,
        }
    )


def _media_block(asset: MultimodalAsset) -> dict:
    lead_in = _first_sentence(asset.enrichment)
    if asset.modality == "image":
        return {"type": "image", "uri": asset.uri, "caption": lead_in}
    if asset.modality == "table":
        return {"type": "table", "payload": asset.payload, "text": asset.enrichment}
    if asset.modality == "video":
        return {"type": "video", "uri": asset.uri, "summary": lead_in}
    raise ValueError(f"unknown modality {asset.modality!r}")


def _first_sentence(text: str) -> str:
    spans = split_sentences(text)
    if not spans:
        return text
    start, end = spans[0]
    return text[start:end]
