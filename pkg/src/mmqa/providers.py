"""Embedding and completion providers.

Two HTTP-backed implementations speak minimal JSON contracts, and two
deterministic stubs make the whole pipeline runnable offline. Providers
are chosen from environment variables:

* ``EMBED_ENDPOINT``: ``stub`` (default), ``stub:<dim>``, or an HTTP URL.
* ``LLM_ENDPOINT``: ``stub``, ``stub:<mode>``, or an HTTP URL, with
  ``LLM_API_KEY`` and ``LLM_MODEL`` alongside.

Stub completion modes: ``echo-first-snippet`` (default), ``fixed-text:<s>``,
and ``concat-snippets``.
"""
from __future__ import annotations

import os
import re
import zlib
from typing import Mapping, Protocol

import httpx
import numpy as np

from .errors import TransportError
from .prompts import parse_snippet_blocks

DEFAULT_STUB_DIM = 256

_WORD_RE = re.compile(r"\w+")


class EmbeddingProvider(Protocol):
    def embed(self, texts: list[str]) -> np.ndarray:
        """Return a float64 array of shape (len(texts), dim)."""
        ...


class CompletionProvider(Protocol):
    def complete(self, system: str, user: str) -> str:
        ...


class StubEmbeddingProvider:
    """Deterministic bag-of-words embedding.

    Each lowercase word token is hashed (crc32, stable across processes)
    into one of ``dim`` buckets. Identical texts get identical vectors;
    texts whose vocabularies land in disjoint buckets are orthogonal.
    Vectors are unit-normalized; a text with no word tokens comes back as
    a zero vector for the caller to reject or treat as unattributable.
    """

    def __init__(self, dim: int = DEFAULT_STUB_DIM):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim

    def embed(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for row, text in enumerate(texts):
            for word in _WORD_RE.findall(text.lower()):
                out[row, zlib.crc32(word.encode("utf-8")) % self.dim] += 1.0
        norms = np.linalg.norm(out, axis=1, keepdims=True)
        np.divide(out, norms, out=out, where=norms > 0)
        return out


class HttpEmbeddingProvider:
    """POSTs {"texts": [...]} and expects {"vectors": [[...], ...]}."""

    def __init__(self, endpoint: str, api_key: str = "", timeout: float = 30.0):
        self.endpoint = endpoint
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._timeout = timeout

    def embed(self, texts: list[str]) -> np.ndarray:
        try:
            response = httpx.post(
                self.endpoint,
                json={"texts": texts},
                headers=self._headers,
                timeout=self._timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"embedding request failed: {exc}") from exc
        vectors = payload.get("vectors") if isinstance(payload, dict) else None
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise TransportError("embedding response missing vectors")
        try:
            return np.asarray(vectors, dtype=np.float64)
        except ValueError as exc:
            raise TransportError(f"embedding response malformed: {exc}") from exc


class StubCompletionProvider:
    """Deterministic completion built from the prompt's snippet blocks."""

    def __init__(self, mode: str = "echo-first-snippet"):
        known = mode in ("echo-first-snippet", "concat-snippets")
        if not known and not mode.startswith("fixed-text:"):
            raise ValueError(f"unknown stub completion mode {mode!r}")
        self.mode = mode

    def complete(self, system: str, user: str) -> str:
        if self.mode.startswith("fixed-text:"):
            return self.mode[len("fixed-text:"):]
        blocks = parse_snippet_blocks(user)
        if not blocks:
            return "I cannot answer from the documentation."
        if self.mode == "concat-snippets":
            return " ".join(text for _, text in blocks)
        return blocks[0][1]


class HttpCompletionProvider:
    """Chat-completion shaped JSON contract."""

    def __init__(
        self,
        endpoint: str,
        api_key: str = "",
        model: str = "",
        temperature: float = 0.0,
        timeout: float = 60.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._timeout = timeout

    def complete(self, system: str, user: str) -> str:
        body = {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        try:
            response = httpx.post(
                self.endpoint, json=body, headers=self._headers, timeout=self._timeout
            )
            response.raise_for_status()
            payload = response.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"completion request failed: {exc}") from exc
        try:
            content = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError("completion response malformed") from exc
        if not isinstance(content, str):
            raise TransportError("completion content is not text")
        return content


def embedding_provider_from_env(env: Mapping[str, str] | None = None) -> EmbeddingProvider:
    env = os.environ if env is None else env
    value = env.get("EMBED_ENDPOINT", "stub")
    if value == "stub":
        return StubEmbeddingProvider()
    if value.startswith("stub:"):
        return StubEmbeddingProvider(dim=int(value[len("stub:"):]))
    return HttpEmbeddingProvider(value, api_key=env.get("EMBED_API_KEY", ""))


def completion_provider_from_env(env: Mapping[str, str] | None = None) -> CompletionProvider:
    env = os.environ if env is None else env
    value = env.get("LLM_ENDPOINT", "stub")
    if value == "stub":
        return StubCompletionProvider()
    if value.startswith("stub:"):
        return StubCompletionProvider(mode=value[len("stub:"):])
    return HttpCompletionProvider(
        value,
        api_key=env.get("LLM_API_KEY", ""),
        model=env.get("LLM_MODEL", ""),
        temperature=float(env.get("LLM_TEMPERATURE", "0")),
    )


def provider_mode(env: Mapping[str, str] | None = None) -> str:
    """"stub" when both providers are stubs, "http" otherwise."""
    env = os.environ if env is None else env
    embed = env.get("EMBED_ENDPOINT", "stub")
    llm = env.get("LLM_ENDPOINT", "stub")
    if embed.split(":")[0] == "stub" and llm.split(":")[0] == "stub":
        return "stub"
    return "http"
