"""Exact cosine-similarity index over snippet and asset embeddings.

Exhaustive scan over a dense matrix: at the intended corpus scale
(tens of thousands of items) exactness is affordable, and it keeps
retrieval testable against a brute-force oracle. Ties are broken by
ascending item_id, which falls out of keeping the rows id-sorted and
using stable kernels.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ._kernels import select_kernel
from .corpus import Corpus, MultimodalAsset, TextSnippet
from .errors import IntegrityError, UnembeddableItemError
from .providers import EmbeddingProvider

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True)
class IndexEntry:
    item_id: str
    item_kind: str  # snippet | image | table | video
    section_id: str
    vector: np.ndarray
    embed_text: str


def unit_vector(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Normalize to unit length; zero vectors are rejected.

    A vector already unit-length (within a few ulp) is returned as-is so
    that save/load round trips reproduce stored vectors bitwise.
    """
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise ValueError("vector must be one-dimensional")
    norm = float(np.linalg.norm(vector))
    if norm == 0.0:
        raise IntegrityError("zero vector cannot be normalized")
    if abs(norm - 1.0) <= 1e-12:
        return vector
    return vector / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Dot product of two unit vectors of equal dimension."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def build_embed_text(
    item: TextSnippet | MultimodalAsset, heading_chain: Sequence[str]
) -> str:
    """Text that goes into the embedding for an item.

    Every kind is prefixed with its heading chain; images add their
    surrounding context around the caption, tables and videos put their
    flattened content or summary after the leading context.
    """
    prefix = " > ".join(heading_chain)
    if isinstance(item, TextSnippet):
        parts = [item.text]
    elif item.modality == "image":
        parts = [item.pre_context, item.enrichment, item.post_context]
    elif item.modality == "table":
        parts = [item.pre_context, item.enrichment]
    elif item.modality == "video":
        parts = [item.pre_context, item.enrichment]
    else:
        raise ValueError(f"unknown modality {item.modality!r}")
    parts = [p for p in parts if p]
    if not parts:
        item_id = item.snippet_id if isinstance(item, TextSnippet) else item.asset_id
        raise UnembeddableItemError(f"item {item_id!r} has no embeddable text")
    if prefix:
        parts.insert(0, prefix)
    return "\n".join(parts)


class EmbeddingIndex:
    """Immutable-after-build store of unit vectors with exact top-k."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.skipped: list[str] = []
        self._entries: list[IndexEntry] = []
        self._by_id: dict[str, IndexEntry] = {}
        self._matrix: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self._entries)

    def add(
        self,
        item_id: str,
        item_kind: str,
        section_id: str,
        vector: Sequence[float] | np.ndarray,
        embed_text: str,
    ) -> None:
        if item_id in self._by_id:
            raise IntegrityError(f"duplicate item_id {item_id!r}")
        if not embed_text:
            raise IntegrityError(f"item {item_id!r} has empty embed_text")
        unit = unit_vector(vector)
        if unit.shape[0] != self.dim:
            raise IntegrityError(
                f"vector of dim {unit.shape[0]} does not match index dim {self.dim}"
            )
        entry = IndexEntry(item_id, item_kind, section_id, unit, embed_text)
        self._entries.append(entry)
        self._by_id[item_id] = entry
        self._matrix = None

    def get(self, item_id: str) -> IndexEntry:
        return self._by_id[item_id]

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._by_id

    def entries(self) -> list[IndexEntry]:
        self._ensure_matrix()
        return list(self._entries)

    def count(self, item_kind: str) -> int:
        return sum(1 for e in self._entries if e.item_kind == item_kind)

    def _ensure_matrix(self) -> None:
        if self._matrix is None:
            self._entries.sort(key=lambda e: e.item_id)
            self._matrix = (
                np.stack([e.vector for e in self._entries])
                if self._entries
                else np.zeros((0, self.dim))
            )

    def top_k(
        self,
        query_vector: Sequence[float] | np.ndarray,
        k: int,
        predicate: Callable[[IndexEntry], bool] | None = None,
    ) -> list[tuple[str, float]]:
        """Exact top-k by cosine score, ties by ascending item_id.

        A zero query vector matches nothing.
        """
        if k < 1:
            raise ValueError("k must be positive")
        self._ensure_matrix()
        query = np.asarray(query_vector, dtype=np.float64)
        if query.shape != (self.dim,):
            raise IntegrityError(
                f"query of dim {query.shape} does not match index dim {self.dim}"
            )
        norm = float(np.linalg.norm(query))
        if norm == 0.0 or not self._entries:
            return []
        query = query / norm

        if predicate is None:
            rows = None
            matrix = self._matrix
        else:
            rows = [i for i, e in enumerate(self._entries) if predicate(e)]
            if not rows:
                return []
            matrix = self._matrix[rows]

        kernel = select_kernel()
        picked, scores = kernel(matrix, query, min(k, len(matrix)))
        out = []
        for pos, score in zip(picked, scores):
            row = rows[pos] if rows is not None else int(pos)
            out.append((self._entries[row].item_id, float(score)))
        return out

    def save(self, path: str | Path) -> None:
        """One meta line, then one JSON entry per line."""
        self._ensure_matrix()
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(json.dumps({"dim": self.dim, "size": len(self)}) + "\n")
            for entry in self._entries:
                handle.write(
                    json.dumps(
                        {
                            "item_id": entry.item_id,
                            "item_kind": entry.item_kind,
                            "section_id": entry.section_id,
                            "embed_text": entry.embed_text,
                            "vector": entry.vector.tolist(),
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingIndex":
        with open(path, encoding="utf-8") as handle:
            header = handle.readline()
            if not header.strip():
                raise IntegrityError(f"index file {path} is empty")
            meta = json.loads(header)
            index = cls(dim=int(meta["dim"]))
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                index.add(
                    record["item_id"],
                    record["item_kind"],
                    record["section_id"],
                    record["vector"],
                    record["embed_text"],
                )
        return index


def embed_texts(provider: EmbeddingProvider, texts: list[str]) -> np.ndarray:
    """Embed and unit-normalize; zero rows are passed through as zero."""
    vectors = np.asarray(provider.embed(texts), dtype=np.float64)
    if vectors.shape[0] != len(texts):
        raise IntegrityError(
            f"provider returned {vectors.shape[0]} vectors for {len(texts)} texts"
        )
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    return np.divide(vectors, norms, out=vectors, where=norms > 0)


def build_index(
    corpus: Corpus,
    provider: EmbeddingProvider,
    batch_size: int = 64,
) -> EmbeddingIndex:
    """Embed every snippet and asset into a fresh index.

    Items without embeddable text (or whose stub embedding is all zero)
    are skipped and recorded on ``index.skipped``, not fatal: a video
    with no transcript summary and no context is simply unfindable.
    """
    items: list[tuple[str, str, str, str]] = []
    skipped: list[str] = []
    for snippet in corpus.snippets:
        chain = corpus.heading_chain(snippet.section_id)
        items.append(
            (
                snippet.snippet_id,
                "snippet",
                snippet.section_id,
                build_embed_text(snippet, chain),
            )
        )
    for asset in corpus.assets:
        chain = corpus.heading_chain(asset.section_id)
        try:
            text = build_embed_text(asset, chain)
        except UnembeddableItemError:
            skipped.append(asset.asset_id)
            continue
        items.append((asset.asset_id, asset.modality, asset.section_id, text))

    dim = _probe_dim(provider)
    index = EmbeddingIndex(dim=dim)
    for start in range(0, len(items), batch_size):
        batch = items[start : start + batch_size]
        vectors = embed_texts(provider, [text for *_, text in batch])
        for (item_id, kind, section_id, text), vector in zip(batch, vectors):
            if float(np.linalg.norm(vector)) == 0.0:
                skipped.append(item_id)
                continue
            index.add(item_id, kind, section_id, vector, text)
    index.skipped.extend(skipped)
    return index


def _probe_dim(provider: EmbeddingProvider) -> int:
    probe = np.asarray(provider.embed(["dimension probe"]))
    return int(probe.shape[1])
