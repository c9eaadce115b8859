"""JSON-over-HTTP service backing the web UI.

Read-only: every request sees the same immutable EngineSession. Static UI
assets, when present, are served from the root path.
"""

from __future__ import annotations

import logging
import uuid

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from soda.engine import EngineSession
from soda.errors import NoInterpretationError, SodaError, UnmatchedQuestionError
from soda.matcher import build_match_matrix
from soda.rules import trigger_keys

logger = logging.getLogger("soda.service")


def _tokens_payload(session: EngineSession, question: str) -> list[dict]:
    matrix = build_match_matrix(
        question,
        session.index,
        session.embeddings,
        session.config.matcher_config(),
        extra_keys=trigger_keys(session.rules),
    )
    tokens = []
    for token, candidates in zip(matrix.tokens, matrix.candidates):
        tokens.append(
            {
                "text": token.text,
                "normalized": token.normalized,
                "start": token.start,
                "end": token.end,
                "candidates": [
                    {
                        "kind": c.kind,
                        "class": c.cls,
                        "property": c.prop,
                        "uris": list(c.uris),
                        "match_values": list(c.match_values),
                        "string_sim": c.string_sim,
                        "pagerank_norm": c.pagerank_norm,
                        "semantic_sim": c.semantic_sim,
                        "score": c.score,
                    }
                    for c in candidates
                ],
            }
        )
    return tokens


def ask_payload(session: EngineSession, question: str, top_n: int | None = None) -> dict:
    results = session.answer(question, top_n=top_n)
    return {
        "question": question,
        "dataset": session.dataset_id,
        "tokens": _tokens_payload(session, question),
        "interpretations": [
            {
                "rank": ranked.rank,
                "score": ranked.score_sum,
                "sparql": ranked.sparql,
                "explanation": ranked.explanation,
                "empty": ranked.empty,
                "columns": [[var, cls] for var, cls in table.columns],
                "rows": table.display_rows(),
            }
            for ranked, table in results
        ],
    }


def create_app(session: EngineSession | None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="soda", docs_url=None, redoc_url=None)
    # The API is read-only and the UI's base path is build-configurable,
    # so a UI served from another origin is a supported deployment.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET", "POST"], allow_headers=["*"]
    )

    @app.get("/api/health")
    def health():
        if session is None:
            return JSONResponse({"status": "unavailable", "dataset": None}, status_code=503)
        return {"status": "ok", "dataset": session.dataset_id}

    @app.post("/api/ask")
    async def ask(request: Request):
        if session is None:
            return JSONResponse({"error": "engine not initialized"}, status_code=503)
        try:
            body = await request.json()
        except Exception:
            body = None
        question = (body or {}).get("question") if isinstance(body, dict) else None
        if not question or not str(question).strip():
            return JSONResponse({"error": "question must be a non-empty string"}, status_code=400)
        top_n = (body or {}).get("top_n")
        if top_n is not None and (not isinstance(top_n, int) or top_n < 1):
            return JSONResponse({"error": "top_n must be a positive integer"}, status_code=400)
        try:
            return ask_payload(session, str(question), top_n)
        except UnmatchedQuestionError as exc:
            return JSONResponse(
                {"error": "no question word matched the dataset vocabulary", "skipped": exc.skipped},
                status_code=422,
            )
        except NoInterpretationError as exc:
            return JSONResponse({"error": str(exc), "skipped": []}, status_code=422)
        except SodaError as exc:
            error_id = uuid.uuid4().hex[:12]
            logger.exception("ask failed (error id %s)", error_id)
            return JSONResponse({"error": str(exc), "error_id": error_id}, status_code=500)

    @app.get("/api/schema")
    def schema_view():
        if session is None:
            return JSONResponse({"error": "engine not initialized"}, status_code=503)
        g = session.schema
        return {
            "dataset": session.dataset_id,
            "classes": sorted(g.classes),
            "edges": sorted([e.domain, e.property, e.range] for e in g.edges),
            "datatype_properties": sorted([c, p] for c, p in g.datatype_properties),
        }

    @app.get("/api/config")
    def config_view():
        if session is None:
            return JSONResponse({"error": "engine not initialized"}, status_code=503)
        return {"config": session.config.snapshot()}

    @app.exception_handler(Exception)
    async def on_error(request: Request, exc: Exception):
        error_id = uuid.uuid4().hex[:12]
        logger.exception("internal error (error id %s)", error_id)
        return JSONResponse({"error": "internal error", "error_id": error_id}, status_code=500)

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
