"""Read-only HTTP JSON API for search, analytics and thread retrieval.

Every error is an envelope {"error": {"code", "message"}}; internals are
never leaked. The server holds one immutable index plus a query cache; no
request mutates anything else, so restarting never changes a response body.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .analytics import broad_categorization, frequent_findings
from .config import ApiConfig
from .index import IndexShard, Query, QueryCache, QueryError, cached_search, load_index
from .payloads import (
    categories_payload,
    frequent_payload,
    query_result_payload,
    thread_payload,
)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def parse_filters(raw_filters: list[str]) -> tuple[tuple[str, str], ...]:
    """Parse `field:value` strings; the value may itself contain colons."""
    filters = []
    for raw in raw_filters:
        fld, sep, value = raw.partition(":")
        if not sep or not fld or not value:
            raise ApiError(400, "bad_filter", f"malformed filter {raw!r}, expected field:value")
        filters.append((fld, value))
    return tuple(filters)


def create_app(config: ApiConfig, index: IndexShard | None = None) -> FastAPI:
    if index is None:
        index = load_index(config.index_path)
    cache = QueryCache(capacity=config.cache_capacity)
    app = FastAPI(title="experience meta-base API", docs_url=None, redoc_url=None)

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"error": {"code": exc.code, "message": exc.message}},
        )

    @app.exception_handler(Exception)
    async def _unexpected(_: Request, exc: Exception):
        return JSONResponse(
            status_code=500,
            content={"error": {"code": "internal", "message": "internal server error"}},
        )

    def _query(q: str, raw_filters: list[str], page: int, page_size: int | None) -> Query:
        return Query(
            text=q,
            filters=parse_filters(raw_filters),
            page=page,
            page_size=page_size if page_size is not None else config.page_size,
        )

    @app.get("/api/search")
    async def api_search(request: Request, q: str = "", page: int = 0, page_size: int | None = None):
        raw_filters = request.query_params.getlist("filter")
        query = _query(q, raw_filters, page, page_size)
        try:
            result = cached_search(index, query, cache, config.boosts)
        except QueryError as exc:
            raise ApiError(400, "bad_query", str(exc)) from exc
        return query_result_payload(result)

    @app.get("/api/analytics/frequent")
    async def api_frequent(anchor: str = "", field: str = "", k: int = 10):
        anchor_field, sep, anchor_value = anchor.partition(":")
        if not sep or not anchor_field or not anchor_value:
            raise ApiError(400, "bad_anchor", f"malformed anchor {anchor!r}, expected field:value")
        try:
            findings = frequent_findings(index, (anchor_field, anchor_value), field, k)
        except QueryError as exc:
            raise ApiError(400, "bad_query", str(exc)) from exc
        return frequent_payload(findings)

    @app.get("/api/analytics/categories")
    async def api_categories(request: Request, q: str = "", page: int = 0):
        raw_filters = request.query_params.getlist("filter")
        query = _query(q, raw_filters, page, None)
        try:
            breakdown = broad_categorization(index, query)
        except QueryError as exc:
            raise ApiError(400, "bad_query", str(exc)) from exc
        return categories_payload(breakdown)

    @app.get("/api/thread/{thread_id}")
    async def api_thread(thread_id: str):
        record = index.threads.get(thread_id)
        if record is None:
            raise ApiError(404, "not_found", f"unknown thread {thread_id!r}")
        return thread_payload(index, record)

    return app
