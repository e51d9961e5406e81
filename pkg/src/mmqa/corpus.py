"""Domain types for the documentation corpus.

A corpus is immutable after load: documents with ordered sections, text
snippets produced by segmentation, and multimodal assets (images, tables,
videos) anchored to sections.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import IntegrityError

MODALITIES = ("image", "table", "video")
MODALITY_RANK = {"image": 0, "table": 1, "video": 2}


@dataclass(frozen=True)
class Section:
    section_id: str
    heading_chain: tuple[str, ...]
    body: str
    assets: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorpusDocument:
    doc_id: str
    title: str
    url: str
    sections: tuple[Section, ...]


@dataclass(frozen=True)
class TextSnippet:
    snippet_id: str
    section_id: str
    text: str
    token_count: int


@dataclass(frozen=True)
class MultimodalAsset:
    asset_id: str
    modality: str
    section_id: str
    uri: str = ""
    payload: str = ""
    pre_context: str = ""
    post_context: str = ""
    enrichment: str = ""
    transcript: str = ""
    title: str = ""
    heading: str = ""
    doc_url: str = ""


def flatten_table(payload: str) -> str:
    """Render a table's JSON payload as "header: cell" text lines.

    Handles the three common shapes: column dict ({"h": [cells]}),
    row dicts ([{"h": cell}]), and header-first row lists ([[h...], [c...]]).
    Anything else is stringified.
    """
    data = json.loads(payload)
    lines: list[str] = []
    if isinstance(data, dict):
        for key, value in data.items():
            cells = value if isinstance(value, list) else [value]
            lines.append(f"{_cell(key)}: " + ", ".join(_cell(c) for c in cells))
    elif isinstance(data, list) and data and all(isinstance(r, dict) for r in data):
        for row in data:
            lines.append(", ".join(f"{_cell(k)}: {_cell(v)}" for k, v in row.items()))
    elif isinstance(data, list) and data and all(isinstance(r, list) for r in data):
        header = [_cell(h) for h in data[0]]
        for row in data[1:]:
            lines.append(", ".join(f"{h}: {_cell(c)}" for h, c in zip(header, row)))
        if len(data) == 1:
            lines.append(", ".join(header))
    else:
        lines.append(_cell(data))
    return "\n".join(lines)


def _cell(value) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, ensure_ascii=False)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass
class Corpus:
    """Loaded corpus plus id-based lookup indices."""

    documents: list[CorpusDocument]
    snippets: list[TextSnippet]
    assets: list[MultimodalAsset]
    warnings: list[str] = field(default_factory=list)

    sections_by_id: dict[str, Section] = field(init=False, repr=False)
    snippets_by_id: dict[str, TextSnippet] = field(init=False, repr=False)
    assets_by_id: dict[str, MultimodalAsset] = field(init=False, repr=False)
    assets_by_section: dict[str, list[MultimodalAsset]] = field(init=False, repr=False)
    _section_doc: dict[str, CorpusDocument] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.sections_by_id = {}
        self._section_doc = {}
        for doc in self.documents:
            for section in doc.sections:
                if section.section_id in self.sections_by_id:
                    raise IntegrityError(f"duplicate section_id {section.section_id!r}")
                self.sections_by_id[section.section_id] = section
                self._section_doc[section.section_id] = doc
        self.snippets_by_id = {}
        for snippet in self.snippets:
            if snippet.snippet_id in self.snippets_by_id:
                raise IntegrityError(f"duplicate snippet_id {snippet.snippet_id!r}")
            if snippet.section_id not in self.sections_by_id:
                raise IntegrityError(
                    f"snippet {snippet.snippet_id!r} references unknown section "
                    f"{snippet.section_id!r}"
                )
            self.snippets_by_id[snippet.snippet_id] = snippet
        self.assets_by_id = {}
        self.assets_by_section = {}
        for asset in self.assets:
            if asset.asset_id in self.assets_by_id:
                raise IntegrityError(f"duplicate asset_id {asset.asset_id!r}")
            if asset.section_id not in self.sections_by_id:
                raise IntegrityError(
                    f"asset {asset.asset_id!r} references unknown section "
                    f"{asset.section_id!r}"
                )
            self.assets_by_id[asset.asset_id] = asset
            self.assets_by_section.setdefault(asset.section_id, []).append(asset)
        for section in self.sections_by_id.values():
            for asset_id in section.assets:
                asset = self.assets_by_id.get(asset_id)
                if asset is None:
                    raise IntegrityError(
                        f"section {section.section_id!r} lists unknown asset "
                        f"{asset_id!r}"
                    )
                if asset.section_id != section.section_id:
                    raise IntegrityError(
                        f"section {section.section_id!r} lists asset {asset_id!r} "
                        f"anchored to {asset.section_id!r}"
                    )

    def heading_chain(self, section_id: str) -> tuple[str, ...]:
        return self.sections_by_id[section_id].heading_chain

    def section_assets(self, section_id: str) -> list[MultimodalAsset]:
        """Assets anchored to a section, in corpus order."""
        return list(self.assets_by_section.get(section_id, []))

    def document_for_section(self, section_id: str) -> CorpusDocument:
        return self._section_doc[section_id]
