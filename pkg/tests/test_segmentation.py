"""Tests for snippet segmentation."""
import random
import re

import pytest

from mmqa.segmentation import segment_text
from mmqa.tokenizer import count_tokens


def normalized(text):
    return re.sub(r"\s+", " ", text).strip()


def check_invariants(body, chunks, min_tokens, max_tokens):
    counts = [count_tokens(c) for c in chunks]
    assert sum(counts) == count_tokens(body)
    for n in counts:
        assert n <= max_tokens
    if len(chunks) > 1:
        for n in counts:
            assert n >= min_tokens
    assert normalized(" ".join(chunks)) == normalized(body)


def test_empty_body():
    assert segment_text("") == []
    assert segment_text("   \n ") == []


def test_whole_body_below_min_is_one_snippet():
    body = "Tiny body here."  # 4 tokens
    chunks = segment_text(body, min_tokens=11, max_tokens=1500)
    assert chunks == [body]


def test_body_of_exactly_max_tokens_is_one_snippet():
    words = " ".join(f"w{i}" for i in range(40))  # 40 tokens
    chunks = segment_text(words, min_tokens=5, max_tokens=40)
    assert chunks == [words]


def test_oversize_sentence_split_at_whitespace():
    sentence = " ".join(f"w{i}" for i in range(30))  # no terminators
    chunks = segment_text(sentence, min_tokens=3, max_tokens=10)
    assert [count_tokens(c) for c in chunks] == [10, 10, 10]
    check_invariants(sentence, chunks, 3, 10)


def test_unsplittable_word_raises():
    word = "a" + ",b" * 20  # 41 tokens, no whitespace
    with pytest.raises(ValueError):
        segment_text(word, min_tokens=1, max_tokens=10)


def test_bad_bounds_raise():
    with pytest.raises(ValueError):
        segment_text("x", min_tokens=0, max_tokens=5)
    with pytest.raises(ValueError):
        segment_text("x", min_tokens=6, max_tokens=5)


def test_short_chunk_stranded_before_long_sentence_is_repaired():
    # Greedy packing flushes the 3-token opener alone because the next
    # sentence nearly fills max_tokens; the repair pass must fix it.
    opener = "Aa bb."  # 3 tokens
    long = " ".join(f"w{i}" for i in range(10)) + "."  # 11 tokens
    body = opener + " " + long
    chunks = segment_text(body, min_tokens=5, max_tokens=12)
    check_invariants(body, chunks, 5, 12)
    assert len(chunks) == 2


def test_short_tail_borrows_from_predecessor():
    long = " ".join(f"w{i}" for i in range(10)) + "."  # 11 tokens
    tail = "Bb cc."  # 3 tokens
    body = long + " " + tail
    chunks = segment_text(body, min_tokens=5, max_tokens=12)
    check_invariants(body, chunks, 5, 12)


def test_short_tail_merges_into_predecessor():
    first = " ".join(f"w{i}" for i in range(6)) + "."  # 7 tokens
    tail = "Bb cc."  # 3 tokens
    chunks = segment_text(first + " " + tail, min_tokens=5, max_tokens=12)
    assert len(chunks) == 1


def _random_document(rng, target_tokens):
    parts = []
    total = 0
    while total < target_tokens:
        n = rng.randint(3, 25)
        sentence = " ".join(rng.choice(["alpha", "beta", "gamma", "delta", "eps"])
                            for _ in range(n)).capitalize() + "."
        parts.append(sentence)
        total += n + 1
        if rng.random() < 0.2:
            parts.append("\n\n")
    return " ".join(parts)


def test_random_documents_hold_bounds_and_reconstruct():
    # Brute-force recount of every emitted snippet against the whole body.
    rng = random.Random(23)
    for _ in range(60):
        body = _random_document(rng, rng.randint(40, 800))
        min_tokens, max_tokens = 11, 120
        chunks = segment_text(body, min_tokens=min_tokens, max_tokens=max_tokens)
        check_invariants(body, chunks, min_tokens, max_tokens)


def test_long_document_with_paragraph_breaks():
    rng = random.Random(5)
    body = _random_document(rng, 3200)
    chunks = segment_text(body)  # default 11..1500
    check_invariants(body, chunks, 11, 1500)
    assert len(chunks) >= 2
