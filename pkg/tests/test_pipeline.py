"""End-to-end pipeline tests on the deterministic toy corpus."""
import pytest

from mmqa.pipeline import AnswerPipeline, PipelineConfig
from mmqa.providers import StubCompletionProvider

FULL_STAGES = ["retrieve", "generate", "attribute", "select_assets", "refine"]


@pytest.fixture()
def pipeline(toy_world):
    return AnswerPipeline(
        corpus=toy_world.corpus,
        index=toy_world.index,
        embedder=toy_world.embedder,
        completer=StubCompletionProvider(),
    )


def test_snippet_query_yields_text_plus_image(toy_world, pipeline):
    query_text = toy_world.snippet_texts["a2/s0"]
    result = pipeline.ask(query_text)

    assert [b["type"] for b in result.answer.blocks] == ["text", "image"]
    assert result.answer.blocks[0]["text"] == query_text
    editor = toy_world.corpus.assets_by_id["img-editor"]
    assert result.answer.blocks[1]["uri"] == editor.uri
    assert result.answer.provenance == [
        {"block": 1, "asset_id": "img-editor", "span_id": "span0"}
    ]

    span = result.attributed.spans[0]
    assert span.source_snippet_id == "a2/s0"
    assert span.score == pytest.approx(1.0, abs=1e-9)
    assert result.selection.asset_ids() == {"img-editor"}


def test_timing_covers_every_stage(pipeline, toy_world):
    result = pipeline.ask(toy_world.snippet_texts["b1/s0"])
    assert list(result.timing_ms) == FULL_STAGES
    assert all(v >= 0 for v in result.timing_ms.values())


def test_text_only_skips_multimodal_stages(pipeline, toy_world):
    result = pipeline.ask(toy_world.snippet_texts["a2/s0"], text_only=True)
    assert result.answer.blocks == [
        {"type": "text", "text": toy_world.snippet_texts["a2/s0"]}
    ]
    assert result.answer.provenance == []
    assert result.attributed is None
    assert result.selection is None
    assert list(result.timing_ms) == ["retrieve", "generate"]


def test_pipeline_is_deterministic(pipeline, toy_world):
    query_text = toy_world.snippet_texts["b2/s0"]
    first = pipeline.ask(query_text)
    second = pipeline.ask(query_text)
    assert first.query.query_id == second.query.query_id
    assert first.answer.to_dict() == second.answer.to_dict()
    assert first.text_answer.text == second.text_answer.text


def test_empty_query_rejected(pipeline):
    with pytest.raises(ValueError):
        pipeline.ask("   ")


def test_answer_validates_for_arbitrary_queries(pipeline, toy_world):
    # queries mixing vocabularies still come back as valid block answers
    words = toy_world.pools["a1"][:3] + toy_world.pools["c1"][:3]
    result = pipeline.ask(" ".join(words))
    result.answer.validate()
    assert result.answer.blocks


def test_config_round_trip():
    config = PipelineConfig(k=3, mm_per_span="single")
    payload = config.to_dict()
    assert payload["k"] == 3
    assert payload["mm_per_span"] == "single"
    assert set(payload) == {
        "k",
        "attribution_threshold",
        "mm_min_score",
        "mm_per_span",
        "max_prompt_chars",
    }
