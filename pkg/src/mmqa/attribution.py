"""Sentence-level source attribution.

Each answer sentence is embedded and matched to the retrieved snippet
with the highest cosine similarity; matches under the threshold stay
unattributed. Contiguous sentences with the same source merge into one
answer span, which later anchors multimodal retrieval to that snippet's
section.

Snippet texts are embedded on demand here (raw text, no heading prefix),
so a sentence copied verbatim from a snippet scores exactly 1.0 under
the stub provider.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .answer import RetrievedContext, TextAnswer
from .index import embed_texts
from .providers import EmbeddingProvider

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class AnswerSpan:
    span_id: str
    start_sentence: int
    end_sentence: int  # inclusive
    source_snippet_id: str
    score: float
    section_id: str


@dataclass
class AttributedAnswer:
    answer: TextAnswer
    spans: list[AnswerSpan]
    unattributed: list[int]

    def span_by_id(self, span_id: str) -> AnswerSpan:
        for span in self.spans:
            if span.span_id == span_id:
                return span
        raise KeyError(span_id)


def attribute(
    answer: TextAnswer,
    context: RetrievedContext,
    provider: EmbeddingProvider,
    threshold: float = DEFAULT_THRESHOLD,
) -> AttributedAnswer:
    """Assign each sentence its argmax-similarity snippet and merge runs.

    Ties go to the higher-ranked snippet in the retrieval order. A
    sentence whose best score is below the threshold (or which has no
    usable embedding) is unattributed and never anchors media.
    """
    sentences = [answer.text[a:b] for a, b in answer.sentences]
    if not sentences or not context.snippets:
        return AttributedAnswer(
            answer=answer, spans=[], unattributed=list(range(len(sentences)))
        )

    snippet_vectors = embed_texts(
        provider, [snippet.text for snippet, _ in context.snippets]
    )
    sentence_vectors = embed_texts(provider, sentences)
    # rows: sentences; columns: snippets in retrieval rank order
    scores = sentence_vectors @ snippet_vectors.T

    assigned: list[tuple[int, float] | None] = []
    for i in range(len(sentences)):
        if not np.any(sentence_vectors[i]):
            assigned.append(None)
            continue
        best = int(np.argmax(scores[i]))  # first max wins the tie
        best_score = float(scores[i][best])
        assigned.append((best, best_score) if best_score >= threshold else None)

    spans: list[AnswerSpan] = []
    unattributed: list[int] = []
    run_start = -1
    run_snippet = -1
    run_score = 0.0

    def close_run(end: int) -> None:
        snippet = context.snippets[run_snippet][0]
        spans.append(
            AnswerSpan(
                span_id=f"span{len(spans)}",
                start_sentence=run_start,
                end_sentence=end,
                source_snippet_id=snippet.snippet_id,
                score=run_score,
                section_id=snippet.section_id,
            )
        )

    for i, choice in enumerate(assigned):
        if choice is None:
            if run_start >= 0:
                close_run(i - 1)
                run_start = -1
            unattributed.append(i)
            continue
        snippet_pos, score = choice
        if run_start >= 0 and snippet_pos == run_snippet:
            run_score = max(run_score, score)
            continue
        if run_start >= 0:
            close_run(i - 1)
        run_start = i
        run_snippet = snippet_pos
        run_score = score
    if run_start >= 0:
        close_run(len(assigned) - 1)

    return AttributedAnswer(answer=answer, spans=spans, unattributed=unattributed)
