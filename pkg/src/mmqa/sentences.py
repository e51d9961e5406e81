"""Sentence boundary detection over answer text.

The splitter returns character spans instead of strings so downstream
consumers (attribution spans, placeholder insertion) can address the
original text. Boundary rules:

* a terminator (``.`` ``!`` ``?``) followed by whitespace and then a
  capital letter or digit ends a sentence;
* a markdown list item (``- x``, ``* x``, ``1. x``, ``2) x``) is one
  sentence;
* a fenced code block (``` ... ```) is one sentence;
* a blank line always ends the current sentence.

Spans are trimmed to non-whitespace and together cover every
non-whitespace character exactly once.
"""
from __future__ import annotations

import re

_TERMINATOR_GAP = re.compile(r"(?<=[.!?])\s+(?=[A-Z0-9])")
_FENCE = re.compile(r"^[ \t]*```")
_LIST_ITEM = re.compile(r"^[ \t]*(?:[-*+]|\d{1,4}[.)])[ \t]+")

Span = tuple[int, int]


def split_sentences(text: str) -> list[Span]:
    """Split ``text`` into sentence spans ``(start, end)``, end exclusive."""
    lines = _line_spans(text)
    spans: list[Span] = []
    para: list[Span] = []

    def flush_para() -> None:
        if para:
            spans.extend(_split_paragraph(text, para[0][0], para[-1][1]))
            para.clear()

    i = 0
    while i < len(lines):
        start, end = lines[i]
        line = text[start:end]
        if not line.strip():
            flush_para()
            i += 1
            continue
        if _FENCE.match(line):
            flush_para()
            j = i + 1
            while j < len(lines) and not _FENCE.match(text[lines[j][0]:lines[j][1]]):
                j += 1
            last = j if j < len(lines) else len(lines) - 1
            span = _trim(text, start, lines[last][1])
            if span:
                spans.append(span)
            i = last + 1
            continue
        if _LIST_ITEM.match(line):
            flush_para()
            span = _trim(text, start, end)
            if span:
                spans.append(span)
            i += 1
            continue
        para.append((start, end))
        i += 1
    flush_para()
    return spans


def _line_spans(text: str) -> list[Span]:
    spans = []
    start = 0
    while start <= len(text):
        nl = text.find("\n", start)
        if nl < 0:
            if start < len(text):
                spans.append((start, len(text)))
            break
        spans.append((start, nl))
        start = nl + 1
    return spans


def _split_paragraph(text: str, start: int, end: int) -> list[Span]:
    spans = []
    cursor = start
    for gap in _TERMINATOR_GAP.finditer(text, start, end):
        span = _trim(text, cursor, gap.start())
        if span:
            spans.append(span)
        cursor = gap.end()
    span = _trim(text, cursor, end)
    if span:
        spans.append(span)
    return spans


def _trim(text: str, start: int, end: int) -> Span | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    return (start, end)
