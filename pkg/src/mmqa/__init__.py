"""Multimodal question answering over documentation corpora.

The pipeline drafts a text answer from retrieved snippets, attributes
each answer sentence back to its source, pulls in images, tables, and
videos anchored near those sources, and rewrites the draft into a
block-structured multimodal answer.
"""
from .answer import Query, RetrievedContext, TextAnswer, retrieve_context
from .attribution import AnswerSpan, AttributedAnswer, attribute
from .corpus import Corpus, CorpusDocument, MultimodalAsset, Section, TextSnippet
from .evaluation import (
    AgreementReport,
    AnnotationRecord,
    aggregate,
    agreement_report,
    apply_treatment,
    cohen_kappa,
    krippendorff_alpha,
    load_annotations,
    pairwise_kappa,
)
from .index import EmbeddingIndex, build_index
from .ingestion import corpus_stats, load_corpus, save_corpus
from .mm_retrieval import SelectionResult, select_assets
from .pipeline import AnswerPipeline, PipelineConfig, PipelineResult
from .refinement import MultimodalAnswer
from .segmentation import segment_text

__all__ = [
    "AgreementReport",
    "AnnotationRecord",
    "AnswerPipeline",
    "AnswerSpan",
    "AttributedAnswer",
    "Corpus",
    "CorpusDocument",
    "EmbeddingIndex",
    "MultimodalAnswer",
    "MultimodalAsset",
    "PipelineConfig",
    "PipelineResult",
    "Query",
    "RetrievedContext",
    "Section",
    "SelectionResult",
    "TextAnswer",
    "TextSnippet",
    "aggregate",
    "agreement_report",
    "apply_treatment",
    "attribute",
    "build_index",
    "cohen_kappa",
    "corpus_stats",
    "krippendorff_alpha",
    "load_annotations",
    "load_corpus",
    "pairwise_kappa",
    "retrieve_context",
    "save_corpus",
    "segment_text",
    "select_assets",
]
