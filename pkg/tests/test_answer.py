"""Tests for retrieval and text answer generation."""
import random

import numpy as np
import pytest

from mmqa.answer import (
    Query,
    RetrievedContext,
    build_answer_prompt,
    generate_text_answer,
    retrieve_context,
)
from mmqa.errors import ContextOverflowError, EmptyAnswerError, NoCorpusError
from mmqa.index import EmbeddingIndex
from mmqa.prompts import parse_question, parse_snippet_blocks
from mmqa.providers import StubCompletionProvider


def test_query_from_text_trims_and_hashes():
    q1 = Query.from_text("  How do I save?  ")
    q2 = Query.from_text("How do I save?")
    assert q1.text == "How do I save?"
    assert q1.query_id == q2.query_id
    assert q1.query_id.startswith("q")
    assert Query.from_text("Other question").query_id != q1.query_id


def test_query_rejects_empty():
    with pytest.raises(ValueError):
        Query.from_text("   ")


def test_context_validates_shape(toy_world):
    snippet = toy_world.corpus.snippets[0]
    with pytest.raises(ValueError):
        RetrievedContext(snippets=[(snippet, 0.5), (snippet, 0.9)], k=5)
    with pytest.raises(ValueError):
        RetrievedContext(snippets=[(snippet, 0.5)] * 3, k=2)


def test_retrieve_all_when_k_exceeds_corpus(toy_world):
    query = Query.from_text("anything at all")
    context = retrieve_context(
        query, toy_world.index, toy_world.corpus, toy_world.embedder, k=20
    )
    assert context.k == 20
    assert len(context.snippets) == 8
    scores = [score for _, score in context.snippets]
    assert scores == sorted(scores, reverse=True)


def test_retrieve_ranks_matching_snippet_first(toy_world):
    text = toy_world.snippet_texts["a2/s0"]
    context = retrieve_context(
        Query.from_text(text), toy_world.index, toy_world.corpus, toy_world.embedder
    )
    assert context.snippets[0][0].snippet_id == "a2/s0"
    assert len(context.snippets) <= 5


def test_query_equal_to_indexed_text_scores_one(toy_world):
    embed_text = toy_world.index.get("a2/s0").embed_text
    context = retrieve_context(
        Query.from_text(embed_text),
        toy_world.index,
        toy_world.corpus,
        toy_world.embedder,
    )
    snippet, score = context.snippets[0]
    assert snippet.snippet_id == "a2/s0"
    assert score == pytest.approx(1.0, abs=1e-12)


def test_retrieve_from_snippetless_index_fails(toy_world):
    empty = EmbeddingIndex(dim=4)
    with pytest.raises(NoCorpusError):
        retrieve_context(
            Query.from_text("q"), empty, toy_world.corpus, toy_world.embedder
        )


def test_retrieve_matches_brute_force(toy_world):
    rng = random.Random(31)
    all_words = [w for pool in toy_world.pools.values() for w in pool]
    snippet_entries = [
        e for e in toy_world.index.entries() if e.item_kind == "snippet"
    ]
    for _ in range(20):
        words = rng.sample(all_words, k=rng.randint(2, 12))
        query = Query.from_text(" ".join(words))
        vector = toy_world.embedder.embed([query.text])[0]
        scores = {e.item_id: float(vector @ e.vector) for e in snippet_entries}
        expected = sorted(scores, key=lambda i: (-scores[i], i))[:5]
        context = retrieve_context(
            query, toy_world.index, toy_world.corpus, toy_world.embedder, k=5
        )
        assert [s.snippet_id for s, _ in context.snippets] == expected


def build_context(toy_world, snippet_ids, k=None):
    snippets = [toy_world.corpus.snippets_by_id[sid] for sid in snippet_ids]
    scored = [(s, 1.0 - 0.1 * i) for i, s in enumerate(snippets)]
    return RetrievedContext(snippets=scored, k=k or len(snippets))


def test_prompt_round_trips_structure(toy_world):
    query = Query.from_text("How does the editor work?")
    context = build_context(toy_world, ["a1/s0", "a1/s1", "a2/s0"])
    prompt = build_answer_prompt(query, context)
    blocks = parse_snippet_blocks(prompt)
    assert [b[0] for b in blocks] == ["a1/s0", "a1/s1", "a2/s0"]
    assert [b[1] for b in blocks] == [
        toy_world.snippet_texts["a1/s0"],
        toy_world.snippet_texts["a1/s1"],
        toy_world.snippet_texts["a2/s0"],
    ]
    assert parse_question(prompt) == query.text
    assert prompt.count(query.text) == 1


def test_prompt_with_single_snippet(toy_world):
    query = Query.from_text("q")
    prompt = build_answer_prompt(query, build_context(toy_world, ["c1/s0"]))
    assert len(parse_snippet_blocks(prompt)) == 1


def test_prompt_truncates_lowest_ranked(toy_world):
    query = Query.from_text("q")
    ids = ["a1/s0", "a1/s1", "b1/s0", "b1/s1", "b2/s0"]
    context = build_context(toy_world, ids)
    full = build_answer_prompt(query, context)
    trimmed = build_answer_prompt(query, context, max_prompt_chars=len(full) - 1)
    blocks = parse_snippet_blocks(trimmed)
    assert [b[0] for b in blocks] == ids[:4]


def test_prompt_overflow_on_single_snippet(toy_world):
    query = Query.from_text("q")
    context = build_context(toy_world, ["a1/s0"])
    with pytest.raises(ContextOverflowError):
        build_answer_prompt(query, context, max_prompt_chars=80)


def test_prompt_with_empty_context():
    query = Query.from_text("unanswerable")
    prompt = build_answer_prompt(query, RetrievedContext(snippets=[], k=5))
    assert parse_snippet_blocks(prompt) == []
    assert parse_question(prompt) == "unanswerable"


def test_generate_echoes_first_snippet(toy_world):
    query = Query.from_text("q")
    context = build_context(toy_world, ["b1/s0", "b1/s1"])
    answer = generate_text_answer(query, context, StubCompletionProvider())
    assert answer.text == toy_world.snippet_texts["b1/s0"]
    assert answer.query_id == query.query_id
    assert len(answer.sentences) == 1


def test_generate_splits_sentences(toy_world):
    provider = StubCompletionProvider(mode="fixed-text:First part. Second part.")
    query = Query.from_text("q")
    answer = generate_text_answer(query, build_context(toy_world, ["a1/s0"]), provider)
    assert len(answer.sentences) == 2
    start, end = answer.sentences[1]
    assert answer.text[start:end] == "Second part."


def test_generate_numbered_list_sentences(toy_world):
    provider = StubCompletionProvider(mode="fixed-text:Steps:\n1. Open it.\n2. Save it.")
    query = Query.from_text("q")
    answer = generate_text_answer(query, build_context(toy_world, ["a1/s0"]), provider)
    assert len(answer.sentences) == 3


def test_generate_rejects_empty_completion(toy_world):
    provider = StubCompletionProvider(mode="fixed-text:")
    query = Query.from_text("q")
    with pytest.raises(EmptyAnswerError):
        generate_text_answer(query, build_context(toy_world, ["a1/s0"]), provider)


def test_generation_is_deterministic(toy_world):
    query = Query.from_text("How does the editor work?")

    def run():
        context = retrieve_context(
            query, toy_world.index, toy_world.corpus, toy_world.embedder
        )
        return generate_text_answer(query, context, StubCompletionProvider())

    first, second = run(), run()
    assert first.text == second.text
    assert first.sentences == second.sentences
    assert first.query_id == second.query_id
    assert [
        (s.snippet_id, score) for s, score in first.context.snippets
    ] == [(s.snippet_id, score) for s, score in second.context.snippets]
