"""JSON payload shapes shared by the CLI (--json) and the HTTP API.

Keeping these in one place is what makes the CLI/API equivalence guarantee
hold: both surfaces serialize the same dicts. cache_hit is transport
metadata and is excluded from canonical comparisons.
"""

from __future__ import annotations

from .analytics import CategoryBreakdown, FrequentFindings
from .index import IndexShard, QueryResult
from .metabase import ThreadRecord, thread_record_to_dict


def query_result_payload(result: QueryResult) -> dict:
    return {
        "total_hits": result.total_hits,
        "page": result.page,
        "page_size": result.page_size,
        "hits": [
            {
                "record_id": hit.record_id,
                "score": round(hit.score, 9),
                "title": hit.title,
                "url": hit.url,
                "snippet": hit.snippet,
            }
            for hit in result.hits
        ],
        "cache_hit": result.cache_hit,
    }


def categories_payload(breakdown: CategoryBreakdown) -> dict:
    return {
        "query": breakdown.query_text,
        "filters": [f"{fld}:{value}" for fld, value in breakdown.filters],
        "rows": [
            {
                "source_forum": row.source_forum,
                "top_level_category": row.top_level_category,
                "thread_count": row.thread_count,
                "post_count": row.post_count,
            }
            for row in breakdown.rows
        ],
    }


def frequent_payload(findings: FrequentFindings) -> dict:
    return {
        "anchor": f"{findings.anchor_field}:{findings.anchor_value}",
        "field": findings.finding_field,
        "rows": [
            {
                "value": row.value,
                "post_count": row.post_count,
                "thread_count": row.thread_count,
            }
            for row in findings.rows
        ],
    }


def thread_payload(index: IndexShard, record: ThreadRecord) -> dict:
    posts = []
    for record_id in index.thread_posts.get(record.thread_id, []):
        doc = index.docs[record_id]
        posts.append(
            {
                "post_id": record_id,
                "position": doc.position,
                "author": doc.record.user_name,
                "expert_authored": doc.record.expert_authored,
                "body": doc.body,
            }
        )
    return {"thread": thread_record_to_dict(record), "posts": posts}


def canonical_payload(payload: dict) -> dict:
    """Payload with transport metadata stripped, for equivalence checks."""
    trimmed = dict(payload)
    trimmed.pop("cache_hit", None)
    return trimmed
