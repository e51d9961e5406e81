"""Chunk section bodies into retrieval snippets.

Snippets are packed from sentence units, so every cut lands on a sentence
or whitespace boundary. Token counts are therefore additive: the per-snippet
counts sum to the count of the whole body, and joining the snippets with
single spaces reconstructs the body up to whitespace normalization.
"""
from __future__ import annotations

from .sentences import split_sentences
from .tokenizer import TokenCounter, count_tokens

DEFAULT_MIN_TOKENS = 11
DEFAULT_MAX_TOKENS = 1500


def segment_text(
    body: str,
    tokenizer: TokenCounter = count_tokens,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[str]:
    """Split ``body`` into snippet texts of min_tokens..max_tokens tokens.

    Greedily packs sentences up to max_tokens, then repairs undersized
    chunks by merging them into a neighbor or, when the merge would break
    the upper bound, borrowing words from one. A body shorter than
    min_tokens comes back as a single undersized snippet. The lower bound
    is guaranteed whenever 2 * min_tokens <= max_tokens; a sentence with
    no whitespace and more than max_tokens tokens is unsplittable and
    raises ValueError.
    """
    if min_tokens < 1:
        raise ValueError(f"min_tokens must be >= 1, got {min_tokens}")
    if max_tokens < min_tokens:
        raise ValueError(
            f"max_tokens ({max_tokens}) must be >= min_tokens ({min_tokens})"
        )
    atoms = _sentence_atoms(body, tokenizer, max_tokens)
    if not atoms:
        return []

    chunks: list[tuple[str, int]] = []
    parts: list[str] = []
    part_tokens = 0
    for text, n in atoms:
        if parts and part_tokens + n > max_tokens:
            chunks.append((" ".join(parts), part_tokens))
            parts = []
            part_tokens = 0
        parts.append(text)
        part_tokens += n
    if parts:
        chunks.append((" ".join(parts), part_tokens))

    if len(chunks) > 1:
        _repair_undersized(chunks, tokenizer, min_tokens, max_tokens)
    return [text for text, _ in chunks]


def _sentence_atoms(
    body: str, tokenizer: TokenCounter, max_tokens: int
) -> list[tuple[str, int]]:
    """Sentence units with token counts, oversize ones split at whitespace."""
    atoms: list[tuple[str, int]] = []
    for start, end in split_sentences(body):
        unit = body[start:end]
        n = tokenizer(unit)
        if n <= max_tokens:
            atoms.append((unit, n))
            continue
        words: list[str] = []
        word_tokens = 0
        for word in unit.split():
            wn = tokenizer(word)
            if wn > max_tokens:
                raise ValueError(
                    f"unsplittable word of {wn} tokens exceeds max_tokens={max_tokens}"
                )
            if words and word_tokens + wn > max_tokens:
                atoms.append((" ".join(words), word_tokens))
                words = []
                word_tokens = 0
            words.append(word)
            word_tokens += wn
        if words:
            atoms.append((" ".join(words), word_tokens))
    return atoms


def _repair_undersized(
    chunks: list[tuple[str, int]],
    tokenizer: TokenCounter,
    min_tokens: int,
    max_tokens: int,
) -> None:
    """Left-to-right pass eliminating chunks below min_tokens, in place.

    Greedy packing can strand a short chunk mid-stream when a near-max
    sentence follows a small one, not just at the tail.
    """
    i = 0
    while i < len(chunks):
        text, n = chunks[i]
        if n >= min_tokens or len(chunks) == 1:
            i += 1
            continue
        if i + 1 < len(chunks) and n + chunks[i + 1][1] <= max_tokens:
            next_text, next_n = chunks[i + 1]
            chunks[i] = (text + " " + next_text, n + next_n)
            del chunks[i + 1]
            continue
        if i > 0 and n + chunks[i - 1][1] <= max_tokens:
            prev_text, prev_n = chunks[i - 1]
            chunks[i - 1] = (prev_text + " " + text, prev_n + n)
            del chunks[i]
            continue
        # Neither merge fits under max_tokens, so a neighbor is large
        # enough to give up words and stay above min_tokens itself.
        if i + 1 < len(chunks) and _donate(chunks, i, i + 1, tokenizer, min_tokens, max_tokens):
            i += 1
            continue
        if i > 0 and _donate(chunks, i, i - 1, tokenizer, min_tokens, max_tokens):
            i += 1
            continue
        i += 1  # pathological bounds (2 * min > max); leave it short


def _donate(
    chunks: list[tuple[str, int]],
    receiver: int,
    donor: int,
    tokenizer: TokenCounter,
    min_tokens: int,
    max_tokens: int,
) -> bool:
    """Move boundary words from donor to receiver until receiver >= min."""
    recv_words = chunks[receiver][0].split()
    recv_n = chunks[receiver][1]
    donor_words = chunks[donor][0].split()
    donor_n = chunks[donor][1]
    from_front = donor > receiver
    moved = False
    while recv_n < min_tokens and len(donor_words) > 1:
        word = donor_words[0] if from_front else donor_words[-1]
        wn = tokenizer(word)
        if donor_n - wn < min_tokens or recv_n + wn > max_tokens:
            break
        if from_front:
            donor_words.pop(0)
            recv_words.append(word)
        else:
            donor_words.pop()
            recv_words.insert(0, word)
        donor_n -= wn
        recv_n += wn
        moved = True
    if recv_n < min_tokens or not moved:
        return False
    chunks[receiver] = (" ".join(recv_words), recv_n)
    chunks[donor] = (" ".join(donor_words), donor_n)
    return True
