"""Section-scoped multimodal retrieval.

Every answer span anchors a search over the assets of its source
snippet's section: similarity is computed between the snippet's index
embedding and each asset's embedding, the best asset per modality (or
the single best overall) survives per span, and a global pass keeps each
asset only at the span where it scored highest.
"""
from __future__ import annotations

from dataclasses import dataclass

from .attribution import AnswerSpan, AttributedAnswer
from .corpus import MODALITY_RANK, Corpus, MultimodalAsset
from .index import EmbeddingIndex, cosine

DEFAULT_MIN_SCORE = 0.3

PER_MODALITY = "per-modality"
SINGLE = "single"


@dataclass(frozen=True)
class AssetCandidate:
    asset_id: str
    modality: str
    span_id: str
    score: float


@dataclass
class SelectionResult:
    selected: list[AssetCandidate]

    def asset_ids(self) -> set[str]:
        return {c.asset_id for c in self.selected}


def section_scope(corpus: Corpus, span: AnswerSpan) -> list[MultimodalAsset]:
    """Assets anchored to the span's source section, nothing else."""
    return corpus.section_assets(span.section_id)


def rank_assets(
    span: AnswerSpan,
    scoped_assets: list[MultimodalAsset],
    index: EmbeddingIndex,
    min_score: float = DEFAULT_MIN_SCORE,
    per_span: str = PER_MODALITY,
) -> list[AssetCandidate]:
    """Best candidate per modality (or single best) for one span.

    The query vector is the source snippet's embedding as stored in the
    index. Assets that never made it into the index (nothing embeddable)
    are silently not candidates. Ties go to the lexically smaller
    asset_id.
    """
    if per_span not in (PER_MODALITY, SINGLE):
        raise ValueError(f"unknown per_span mode {per_span!r}")
    query = index.get(span.source_snippet_id).vector
    best_by_modality: dict[str, AssetCandidate] = {}
    for asset in scoped_assets:
        if asset.asset_id not in index:
            continue
        score = cosine(query, index.get(asset.asset_id).vector)
        if score < min_score:
            continue
        candidate = AssetCandidate(
            asset_id=asset.asset_id,
            modality=asset.modality,
            span_id=span.span_id,
            score=score,
        )
        current = best_by_modality.get(asset.modality)
        if (
            current is None
            or candidate.score > current.score
            or (candidate.score == current.score and candidate.asset_id < current.asset_id)
        ):
            best_by_modality[asset.modality] = candidate
    winners = sorted(
        best_by_modality.values(), key=lambda c: MODALITY_RANK[c.modality]
    )
    if per_span == SINGLE and winners:
        winners = [max(winners, key=lambda c: (c.score, c.asset_id))]
    return winners


def dedupe(
    candidates: list[AssetCandidate], spans: list[AnswerSpan]
) -> SelectionResult:
    """Keep each asset only at its best-scoring span.

    Ties go to the earliest span in answer order. Survivors come back
    ordered by (span position, modality, asset_id).
    """
    position = {span.span_id: i for i, span in enumerate(spans)}
    best: dict[str, AssetCandidate] = {}
    for candidate in candidates:
        current = best.get(candidate.asset_id)
        if (
            current is None
            or candidate.score > current.score
            or (
                candidate.score == current.score
                and position[candidate.span_id] < position[current.span_id]
            )
        ):
            best[candidate.asset_id] = candidate
    survivors = sorted(
        best.values(),
        key=lambda c: (position[c.span_id], MODALITY_RANK[c.modality], c.asset_id),
    )
    return SelectionResult(selected=survivors)


def select_assets(
    corpus: Corpus,
    attributed: AttributedAnswer,
    index: EmbeddingIndex,
    min_score: float = DEFAULT_MIN_SCORE,
    per_span: str = PER_MODALITY,
) -> SelectionResult:
    """Scope, rank, and dedupe over all spans of an attributed answer."""
    candidates: list[AssetCandidate] = []
    for span in attributed.spans:
        scoped = section_scope(corpus, span)
        candidates.extend(rank_assets(span, scoped, index, min_score, per_span))
    return dedupe(candidates, attributed.spans)
