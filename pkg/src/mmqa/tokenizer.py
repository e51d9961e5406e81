"""Token counting for snippet bounds and corpus statistics.

Every consumer takes the counter as an injectable callable so a byte-pair
tokenizer can be plugged in; the default counts word runs plus individual
punctuation marks, which is deterministic and needs no model assets.
A token never spans whitespace, so counting text piecewise at whitespace
boundaries sums to the count of the whole.
"""
from __future__ import annotations

import re
from typing import Callable

TokenCounter = Callable[[str], int]

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def count_tokens(text: str) -> int:
    """Count tokens: maximal word-character runs and single punctuation marks."""
    return len(_TOKEN_RE.findall(text))
