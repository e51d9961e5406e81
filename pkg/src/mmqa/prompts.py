"""Prompt formats shared by answer generation, refinement, and the stub
completion provider.

Both prompts are built from a small number of line-oriented markers so
they can be parsed back: snippet blocks are delimited by bracket tags,
the question is a single prefixed line, media insertion points are
``<<ASSET k>>`` tokens, and the refined output references them with
``![k]`` markers.
"""
from __future__ import annotations

import re

ANSWER_SYSTEM = (
    "You are a documentation assistant. Answer the user's question using "
    "only the provided snippets. If the snippets do not contain the "
    "answer, say that you cannot answer from the documentation."
)

REFINE_SYSTEM = (
    "You are a documentation assistant. Rewrite the draft answer so the "
    "media items fit naturally at their insertion points. Keep every fact "
    "from the draft. Where the draft contains <<ASSET k>>, place the "
    "marker ![k] on its own line at the spot where that media item "
    "belongs. Use every marker exactly once and add no other markers."
)

QUESTION_PREFIX = "Question: "

_SNIPPET_OPEN = "[SNIPPET {snippet_id}]"
_SNIPPET_CLOSE = "[/SNIPPET]"
_SNIPPET_RE = re.compile(
    r"^\[SNIPPET (?P<id>[^\]]+)\]\n(?P<text>.*?)\n\[/SNIPPET\]$",
    re.MULTILINE | re.DOTALL,
)

PLACEHOLDER_RE = re.compile(r"<<ASSET (\d+)>>")
MARKER_RE = re.compile(r"!\[(\d+)\]")


def placeholder_token(k: int) -> str:
    return f"<<ASSET {k}>>"


def marker_token(k: int) -> str:
    return f"![{k}]"


def format_snippet_block(snippet_id: str, text: str) -> str:
    return f"{_SNIPPET_OPEN.format(snippet_id=snippet_id)}\n{text}\n{_SNIPPET_CLOSE}"


def parse_snippet_blocks(prompt: str) -> list[tuple[str, str]]:
    """Recover (snippet_id, text) pairs from a built prompt."""
    out = []
    for match in _SNIPPET_RE.finditer(prompt):
        out.append((match.group("id"), match.group("text")))
    return out


def parse_question(prompt: str) -> str | None:
    """Recover the question line from a built prompt, if present."""
    for line in prompt.splitlines():
        if line.startswith(QUESTION_PREFIX):
            return line[len(QUESTION_PREFIX):]
    return None
