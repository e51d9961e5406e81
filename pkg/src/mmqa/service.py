"""HTTP facade over the answer pipeline.

Endpoints: POST /ask runs the full pipeline (or the text-only prefix),
GET /health reports readiness and index size, GET /config echoes the
active pipeline parameters, and POST /vote appends a preference record
to a CSV compatible with the evaluation tooling.

The pipeline loads once at startup and is immutable afterwards; the
votes file is the only mutable state and is guarded by a lock.
"""
from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from dataclasses import asdict
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import (
    ContextOverflowError,
    EmptyAnswerError,
    NoCorpusError,
    TransportError,
)
from .evaluation import AnnotationRecord, append_annotation, load_annotations
from .pipeline import AnswerPipeline
from .providers import provider_mode


class AskRequest(BaseModel):
    query: str = ""
    text_only: bool = False


class VoteRequest(BaseModel):
    item_id: str
    model: str
    annotator_id: int
    preference: str


def create_app(
    loader: Callable[[], AnswerPipeline],
    votes_path: str | Path | None = None,
) -> FastAPI:
    """Build the app around a pipeline loader.

    The loader runs in the startup phase, so /health reports "starting"
    until it returns. Passing an already-built pipeline is easiest via
    ``lambda: pipeline``.
    """

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.pipeline = loader()
        if votes_path is not None:
            app.state.vote_keys = _existing_vote_keys(votes_path)
        yield

    app = FastAPI(title="mmqa", lifespan=lifespan)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.pipeline = None
    app.state.votes_path = Path(votes_path) if votes_path is not None else None
    app.state.vote_keys = set()
    app.state.votes_lock = threading.Lock()

    @app.get("/health")
    def health() -> dict:
        pipeline = app.state.pipeline
        if pipeline is None:
            return {
                "status": "starting",
                "index_size": 0,
                "provider_mode": provider_mode(),
            }
        return {
            "status": "ok",
            "index_size": len(pipeline.index),
            "provider_mode": provider_mode(),
        }

    @app.get("/config")
    def config() -> dict:
        pipeline = app.state.pipeline
        return {
            "provider_mode": provider_mode(),
            "pipeline": pipeline.config.to_dict() if pipeline else None,
            "votes_enabled": app.state.votes_path is not None,
        }

    @app.post("/ask")
    def ask(request: AskRequest) -> dict:
        pipeline = app.state.pipeline
        if pipeline is None:
            raise HTTPException(503, "index is still loading")
        if not request.query.strip():
            raise HTTPException(400, "query must not be empty")
        try:
            result = pipeline.ask(request.query, text_only=request.text_only)
        except ContextOverflowError as exc:
            raise HTTPException(400, str(exc)) from exc
        except (TransportError, NoCorpusError, EmptyAnswerError) as exc:
            raise HTTPException(503, str(exc)) from exc
        spans = result.attributed.spans if result.attributed else []
        return {
            "query_id": result.query.query_id,
            "answer": result.answer.to_dict(),
            "text_answer": result.text_answer.text,
            "spans": [asdict(span) for span in spans],
            "timing_ms": result.timing_ms,
        }

    @app.post("/vote")
    def vote(request: VoteRequest) -> dict:
        if app.state.votes_path is None:
            raise HTTPException(503, "vote recording is not configured")
        try:
            record = AnnotationRecord(
                item_id=request.item_id,
                model=request.model,
                annotator_id=request.annotator_id,
                usefulness=None,
                readability=None,
                relevance=None,
                preference=request.preference,
            )
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        key = (record.item_id, record.annotator_id)
        with app.state.votes_lock:
            if key in app.state.vote_keys:
                raise HTTPException(
                    409, "this annotator already voted on this item"
                )
            append_annotation(app.state.votes_path, record)
            app.state.vote_keys.add(key)
        return {"status": "recorded", "item_id": record.item_id}

    return app


def _existing_vote_keys(path: str | Path) -> set[tuple[str, int]]:
    path = Path(path)
    if not path.exists() or path.stat().st_size == 0:
        return set()
    return {(r.item_id, r.annotator_id) for r in load_annotations(path)}
