"""Initial text answer: retrieve top-k snippets, prompt the provider.

The prompt is assembled from the formats in prompts.py so tests (and the
stub completion provider) can parse it back. Lowest-ranked snippets are
dropped when the prompt exceeds the configured character budget.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .corpus import Corpus, TextSnippet
from .errors import ContextOverflowError, EmptyAnswerError, NoCorpusError
from .index import EmbeddingIndex, embed_texts
from .prompts import ANSWER_SYSTEM, QUESTION_PREFIX, format_snippet_block
from .providers import CompletionProvider, EmbeddingProvider
from .sentences import split_sentences

DEFAULT_K = 5
DEFAULT_MAX_PROMPT_CHARS = 24000

PROMPT_INSTRUCTION = (
    "Answer the question using only the snippets below. "
    "If they do not contain the answer, say so."
)


@dataclass(frozen=True)
class Query:
    text: str
    query_id: str

    @classmethod
    def from_text(cls, text: str) -> "Query":
        trimmed = text.strip()
        if not trimmed:
            raise ValueError("query text is empty")
        digest = hashlib.sha1(trimmed.encode("utf-8")).hexdigest()[:12]
        return cls(text=trimmed, query_id=f"q{digest}")


@dataclass
class RetrievedContext:
    snippets: list[tuple[TextSnippet, float]]
    k: int

    def __post_init__(self) -> None:
        scores = [score for _, score in self.snippets]
        if len(self.snippets) > self.k:
            raise ValueError(f"{len(self.snippets)} snippets for k={self.k}")
        if scores != sorted(scores, reverse=True):
            raise ValueError("snippet scores must be descending")


@dataclass
class TextAnswer:
    text: str
    sentences: list[tuple[int, int]]
    query_id: str
    context: RetrievedContext = field(repr=False)


def retrieve_context(
    query: Query,
    index: EmbeddingIndex,
    corpus: Corpus,
    provider: EmbeddingProvider,
    k: int = DEFAULT_K,
) -> RetrievedContext:
    """Top-k snippet retrieval for a query.

    A query whose embedding is empty (no recognizable tokens) retrieves
    nothing; the caller then answers from an empty context.
    """
    if index.count("snippet") == 0:
        raise NoCorpusError("index contains no snippets")
    vector = embed_texts(provider, [query.text])[0]
    hits = index.top_k(vector, k=k, predicate=lambda e: e.item_kind == "snippet")
    snippets = [(corpus.snippets_by_id[item_id], score) for item_id, score in hits]
    return RetrievedContext(snippets=snippets, k=k)


def build_answer_prompt(
    query: Query,
    context: RetrievedContext,
    max_prompt_chars: int = DEFAULT_MAX_PROMPT_CHARS,
) -> str:
    """Instruction, one block per snippet, then the question line.

    Drops lowest-ranked snippets until the prompt fits; if even the
    top snippet alone does not fit, raises ContextOverflowError.
    """
    blocks = [
        format_snippet_block(snippet.snippet_id, snippet.text)
        for snippet, _ in context.snippets
    ]
    question_line = f"{QUESTION_PREFIX}{query.text}"
    base = "\n\n".join([PROMPT_INSTRUCTION, question_line])
    if len(base) > max_prompt_chars:
        raise ContextOverflowError(
            f"question alone exceeds the prompt budget of {max_prompt_chars} characters"
        )
    for used in range(len(blocks), 0, -1):
        prompt = "\n\n".join([PROMPT_INSTRUCTION, *blocks[:used], question_line])
        if len(prompt) <= max_prompt_chars:
            return prompt
    if blocks:
        raise ContextOverflowError(
            "top snippet alone exceeds the prompt budget of "
            f"{max_prompt_chars} characters"
        )
    return base


def generate_text_answer(
    query: Query,
    context: RetrievedContext,
    provider: CompletionProvider,
    max_prompt_chars: int = DEFAULT_MAX_PROMPT_CHARS,
) -> TextAnswer:
    prompt = build_answer_prompt(query, context, max_prompt_chars)
    completion = provider.complete(ANSWER_SYSTEM, prompt).strip()
    if not completion:
        raise EmptyAnswerError(f"provider returned an empty answer for {query.query_id}")
    return TextAnswer(
        text=completion,
        sentences=split_sentences(completion),
        query_id=query.query_id,
        context=context,
    )
