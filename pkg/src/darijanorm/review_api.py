"""HTTP service for the human validation workflow.

Serves the candidate dictionary as a review queue: reviewers page
through pending pairs, inspect corpus contexts, and post accept,
reject, or remap decisions. Accepted and remapped pairs can be
exported at any time as a reference dictionary in TSV form.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .ingest import Corpus
from .review_state import (
    STATUSES,
    InvalidRemapError,
    ReviewState,
    UnknownPairError,
)

TSV_MEDIA_TYPE = "text/tab-separated-values"


class PairOut(BaseModel):
    translit: str
    canonical: str
    semantic_score: float
    lexical_score: float
    sources: list[str]
    status: str
    conflict_set: list[str]


class PairsPage(BaseModel):
    pairs: list[PairOut]
    total: int
    offset: int
    limit: int


class ContextOut(BaseModel):
    tokens: list[str]
    highlight_index: int


class DecisionIn(BaseModel):
    translit: str
    canonical: str
    verdict: str
    reviewer: str
    chosen_canonical: str | None = None


class DecisionOut(BaseModel):
    translit: str
    canonical: str
    verdict: str
    reviewer: str
    timestamp: str
    chosen_canonical: str | None
    status: str


class StatsOut(BaseModel):
    total: int
    pending: int
    accepted: int
    rejected: int
    remapped: int
    # null while nothing has been decided yet
    running_precision: float | None


def _guidelines_text() -> str:
    return (
        resources.files("darijanorm")
        .joinpath("data/review_guidelines.md")
        .read_text(encoding="utf-8")
    )


def create_app(
    state: ReviewState,
    corpus: Corpus,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="darijanorm review service")

    def pair_out(key: tuple[str, str]) -> PairOut:
        record = state.pair_record(key)
        return PairOut(
            translit=record.translit,
            canonical=record.canonical,
            semantic_score=record.semantic_score,
            lexical_score=record.lexical_score,
            sources=sorted(record.sources),
            status=state.status_of(key),
            conflict_set=state.conflict_set(record.translit, record.canonical),
        )

    @app.get("/pairs", response_model=PairsPage)
    def get_pairs(status: str = "pending", offset: int = 0, limit: int = 50):
        if status not in STATUSES:
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        if offset < 0:
            raise HTTPException(status_code=400, detail="offset must be >= 0")
        if limit < 1:
            raise HTTPException(status_code=400, detail="limit must be >= 1")
        keys = state.pairs_with_status(status)
        page = keys[offset : offset + limit]
        return PairsPage(
            pairs=[pair_out(k) for k in page],
            total=len(keys),
            offset=offset,
            limit=limit,
        )

    @app.get("/contexts", response_model=list[ContextOut])
    def get_contexts(word: str | None = None, limit: int = 20):
        if not word:
            raise HTTPException(status_code=400, detail="word parameter is required")
        if limit < 1:
            raise HTTPException(status_code=400, detail="limit must be >= 1")
        return [
            ContextOut(tokens=list(sentence.tokens), highlight_index=position)
            for sentence, position in corpus.contexts(word, limit)
        ]

    @app.post("/decisions", response_model=DecisionOut, status_code=201)
    def post_decision(body: DecisionIn):
        try:
            decision = state.record(
                translit=body.translit,
                canonical=body.canonical,
                verdict=body.verdict,
                reviewer=body.reviewer,
                chosen_canonical=body.chosen_canonical,
            )
        except UnknownPairError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except InvalidRemapError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return DecisionOut(
            translit=decision.translit,
            canonical=decision.canonical,
            verdict=decision.verdict,
            reviewer=decision.reviewer,
            timestamp=decision.timestamp,
            chosen_canonical=decision.chosen_canonical,
            status=decision.status,
        )

    @app.get("/export/reference")
    def export_reference():
        return PlainTextResponse(state.export_tsv(), media_type=TSV_MEDIA_TYPE)

    @app.get("/stats", response_model=StatsOut)
    def get_stats():
        counts = state.counts()
        return StatsOut(running_precision=state.running_precision(), **counts)

    @app.get("/guidelines")
    def get_guidelines():
        return PlainTextResponse(_guidelines_text(), media_type="text/markdown")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(
    state: ReviewState,
    corpus: Corpus,
    host: str = "127.0.0.1",
    port: int = 8000,
    static_dir: str | Path | None = None,
) -> None:
    """Run the review service until interrupted."""
    import uvicorn

    uvicorn.run(create_app(state, corpus, static_dir), host=host, port=port)
