"""Shared fixtures: a small deterministic corpus tuned for the stub
embedding provider.

The toy corpus spans 3 documents, 5 sections, 8 snippets, 2 images,
1 table, and 1 video. All words are chosen so their stub hash buckets
never collide, which makes similarity scores exact: snippets are
pairwise orthogonal, and an asset built from a snippet's own words has a
hand-computable score against it.
"""
import json
import zlib
from dataclasses import dataclass

import pytest

from mmqa.corpus import Corpus
from mmqa.index import EmbeddingIndex, build_index
from mmqa.ingestion import load_corpus
from mmqa.providers import StubEmbeddingProvider

STUB_DIM = 256

TOY_MIN_TOKENS = 11
TOY_MAX_TOKENS = 60


def collision_free_words(count: int, dim: int = STUB_DIM) -> list[str]:
    """Deterministic words with pairwise-distinct stub hash buckets.

    One call returns a globally consistent pool; callers needing several
    disjoint vocabularies should slice a single pool.
    """
    words: list[str] = []
    used: set[int] = set()
    i = 0
    while len(words) < count:
        word = f"term{i}"
        bucket = zlib.crc32(word.encode("utf-8")) % dim
        if bucket not in used:
            used.add(bucket)
            words.append(word)
        i += 1
        if i > 100000:
            raise RuntimeError(f"cannot find {count} collision-free words")
    return words


def sentence(words: list[str]) -> str:
    return (" ".join(words) + ".").capitalize()


@dataclass
class ToyWorld:
    path: str
    corpus: Corpus
    index: EmbeddingIndex
    embedder: StubEmbeddingProvider
    pools: dict[str, list[str]]
    snippet_texts: dict[str, str]  # snippet_id -> text


def build_toy_records(pools: dict[str, list[str]]) -> list[dict]:
    h = pools["headings"]

    def section(section_id, chain, body, assets=()):
        return {
            "section_id": section_id,
            "heading_chain": chain,
            "body": body,
            "assets": list(assets),
        }

    a1_body = sentence(pools["a1"][:34]) + " " + sentence(pools["a1"][34:])
    a2_body = sentence(pools["a2"])
    b1_body = sentence(pools["b1"][:34]) + " " + sentence(pools["b1"][34:])
    b2_body = sentence(pools["b2"][:34]) + " " + sentence(pools["b2"][34:])
    c1_body = sentence(pools["c1"])

    t = pools["table"]
    return [
        {
            "kind": "document",
            "doc_id": "doc-a",
            "title": "Editor guide",
            "url": "https://example.test/a",
            "sections": [
                section("a1", [h[0], h[1]], a1_body),
                section("a2", [h[0], h[2]], a2_body, assets=["img-editor"]),
            ],
        },
        {
            "kind": "document",
            "doc_id": "doc-b",
            "title": "Workflow guide",
            "url": "https://example.test/b",
            "sections": [
                section("b1", [h[3], h[4]], b1_body, assets=["img-flow"]),
                section("b2", [h[3], h[5]], b2_body, assets=["tbl-limits"]),
            ],
        },
        {
            "kind": "document",
            "doc_id": "doc-c",
            "title": "Demo video page",
            "url": "https://example.test/c",
            "sections": [section("c1", [h[6], h[7]], c1_body, assets=["vid-demo"])],
        },
        {
            "kind": "asset",
            "asset_id": "img-editor",
            "modality": "image",
            "section_id": "a2",
            "uri": "https://example.test/editor.png",
            "enrichment": a2_body,  # caption equals the snippet text
        },
        {
            "kind": "asset",
            "asset_id": "img-flow",
            "modality": "image",
            "section_id": "b1",
            "uri": "https://example.test/flow.png",
            "enrichment": sentence(pools["b1"][:7]),
        },
        {
            "kind": "asset",
            "asset_id": "tbl-limits",
            "modality": "table",
            "section_id": "b2",
            "uri": "https://example.test/b#limits",
            "payload": json.dumps({t[0]: [t[1]], t[2]: [t[3]]}),
            "pre_context": " ".join(pools["b2"][:7]),
        },
        {
            "kind": "asset",
            "asset_id": "vid-demo",
            "modality": "video",
            "section_id": "c1",
            "uri": "https://example.test/demo.mp4",
            "enrichment": sentence(pools["c1"][:6]),
        },
    ]


def make_pools() -> dict[str, list[str]]:
    # "spare" words never appear in the corpus, so test sentences built
    # from them have similarity exactly 0 against every snippet.
    words = collision_free_words(8 + 68 + 14 + 68 + 68 + 14 + 4 + 12)
    pools = {}
    cursor = 0
    for name, size in [
        ("headings", 8),
        ("a1", 68),
        ("a2", 14),
        ("b1", 68),
        ("b2", 68),
        ("c1", 14),
        ("table", 4),
        ("spare", 12),
    ]:
        pools[name] = words[cursor : cursor + size]
        cursor += size
    return pools


@pytest.fixture(scope="session")
def toy_world(tmp_path_factory) -> ToyWorld:
    pools = make_pools()
    records = build_toy_records(pools)
    path = tmp_path_factory.mktemp("toy") / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")
    corpus = load_corpus(path, min_tokens=TOY_MIN_TOKENS, max_tokens=TOY_MAX_TOKENS)
    embedder = StubEmbeddingProvider(dim=STUB_DIM)
    index = build_index(corpus, embedder)
    snippet_texts = {s.snippet_id: s.text for s in corpus.snippets}
    return ToyWorld(
        path=str(path),
        corpus=corpus,
        index=index,
        embedder=embedder,
        pools=pools,
        snippet_texts=snippet_texts,
    )
