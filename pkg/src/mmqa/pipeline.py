"""End-to-end answer pipeline.

Wires the stages together: snippet retrieval, text answer drafting,
sentence attribution, section-scoped asset selection, placeholder
insertion, and refinement. Each stage's wall time lands in a per-stage
timing map. text_only mode stops after drafting and wraps the draft in
a single text block, so callers always get a block-structured answer.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .answer import (
    DEFAULT_K,
    DEFAULT_MAX_PROMPT_CHARS,
    Query,
    TextAnswer,
    generate_text_answer,
    retrieve_context,
)
from .attribution import DEFAULT_THRESHOLD, AttributedAnswer, attribute
from .corpus import Corpus
from .index import EmbeddingIndex
from .mm_retrieval import (
    DEFAULT_MIN_SCORE,
    PER_MODALITY,
    SelectionResult,
    select_assets,
)
from .providers import CompletionProvider, EmbeddingProvider
from .refinement import (
    MultimodalAnswer,
    build_refinement_prompt,
    insert_placeholders,
    refine,
)


@dataclass
class PipelineConfig:
    k: int = DEFAULT_K
    attribution_threshold: float = DEFAULT_THRESHOLD
    mm_min_score: float = DEFAULT_MIN_SCORE
    mm_per_span: str = PER_MODALITY
    max_prompt_chars: int = DEFAULT_MAX_PROMPT_CHARS

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "attribution_threshold": self.attribution_threshold,
            "mm_min_score": self.mm_min_score,
            "mm_per_span": self.mm_per_span,
            "max_prompt_chars": self.max_prompt_chars,
        }


@dataclass
class PipelineResult:
    query: Query
    answer: MultimodalAnswer
    text_answer: TextAnswer
    attributed: AttributedAnswer | None
    selection: SelectionResult | None
    timing_ms: dict[str, int] = field(default_factory=dict)


class AnswerPipeline:
    """Single-corpus pipeline over an immutable index.

    The index and corpus are read-only after construction; the only I/O
    during ask() is the provider calls, so one instance can serve
    concurrent requests.
    """

    def __init__(
        self,
        corpus: Corpus,
        index: EmbeddingIndex,
        embedder: EmbeddingProvider,
        completer: CompletionProvider,
        config: PipelineConfig | None = None,
    ):
        self.corpus = corpus
        self.index = index
        self.embedder = embedder
        self.completer = completer
        self.config = config or PipelineConfig()

    def ask(self, text: str, text_only: bool = False) -> PipelineResult:
        config = self.config
        timing: dict[str, int] = {}
        clock = _StageClock(timing)

        query = Query.from_text(text)
        with clock.stage("retrieve"):
            context = retrieve_context(
                query, self.index, self.corpus, self.embedder, k=config.k
            )
        with clock.stage("generate"):
            text_answer = generate_text_answer(
                query, context, self.completer, config.max_prompt_chars
            )

        if text_only:
            answer = MultimodalAnswer(
                query_id=query.query_id,
                blocks=[{"type": "text", "text": text_answer.text}],
                provenance=[],
            )
            answer.validate()
            return PipelineResult(
                query=query,
                answer=answer,
                text_answer=text_answer,
                attributed=None,
                selection=None,
                timing_ms=timing,
            )

        with clock.stage("attribute"):
            attributed = attribute(
                text_answer, context, self.embedder, config.attribution_threshold
            )
        with clock.stage("select_assets"):
            selection = select_assets(
                self.corpus,
                attributed,
                self.index,
                config.mm_min_score,
                config.mm_per_span,
            )
        with clock.stage("refine"):
            doc = insert_placeholders(attributed, selection)
            prompt = build_refinement_prompt(query.text, doc, self.corpus)
            answer = refine(prompt, self.completer, self.corpus)

        return PipelineResult(
            query=query,
            answer=answer,
            text_answer=text_answer,
            attributed=attributed,
            selection=selection,
            timing_ms=timing,
        )


class _StageClock:
    """Context-manager factory recording stage durations in whole ms."""

    def __init__(self, sink: dict[str, int]):
        self.sink = sink

    def stage(self, name: str) -> "_Stage":
        return _Stage(self.sink, name)


class _Stage:
    def __init__(self, sink: dict[str, int], name: str):
        self.sink = sink
        self.name = name

    def __enter__(self) -> None:
        self.start = time.perf_counter()

    def __exit__(self, *exc_info) -> None:
        elapsed = time.perf_counter() - self.start
        self.sink[self.name] = int(elapsed * 1000)
