"""Dashboard aggregates over the index: category breakdowns and co-mentions.

Both operations are exact group-by/count scans over the query's candidate
set; nothing here is approximate, so they can be checked against brute-force
counting on the raw records.
"""

from __future__ import annotations

from dataclasses import dataclass

from .index import IndexShard, Query, QueryError, candidate_ids
from .metabase import ENTITY_FIELDS


@dataclass(frozen=True)
class CategoryRow:
    source_forum: str
    top_level_category: str
    thread_count: int
    post_count: int


@dataclass(frozen=True)
class CategoryBreakdown:
    query_text: str
    filters: tuple[tuple[str, str], ...]
    rows: tuple[CategoryRow, ...]


@dataclass(frozen=True)
class FindingRow:
    value: str
    post_count: int
    thread_count: int


@dataclass(frozen=True)
class FrequentFindings:
    anchor_field: str
    anchor_value: str
    finding_field: str
    rows: tuple[FindingRow, ...]


def broad_categorization(index: IndexShard, query: Query) -> CategoryBreakdown:
    """Group the query's matching posts by (source_forum, top_level_category)."""
    matches = candidate_ids(index, query)
    posts: dict[tuple[str, str], int] = {}
    threads: dict[tuple[str, str], set[str]] = {}
    for record_id in matches:
        record = index.docs[record_id].record
        thread = index.threads.get(record.thread_id)
        forum = thread.source_forum if thread else ""
        key = (forum, record.top_level_category)
        posts[key] = posts.get(key, 0) + 1
        threads.setdefault(key, set()).add(record.thread_id)

    rows = [
        CategoryRow(
            source_forum=forum,
            top_level_category=category,
            thread_count=len(threads[(forum, category)]),
            post_count=count,
        )
        for (forum, category), count in posts.items()
    ]
    rows.sort(key=lambda r: (-r.thread_count, -r.post_count, r.source_forum, r.top_level_category))
    return CategoryBreakdown(query_text=query.text, filters=query.filters, rows=tuple(rows))


def frequent_findings(
    index: IndexShard, anchor: tuple[str, str], finding_field: str, k: int
) -> FrequentFindings:
    """Top-k finding values co-mentioned with the anchor, by post count.

    Ties break alphabetically so dashboard panels are reproducible.
    """
    anchor_field, anchor_value = anchor
    if anchor_field not in ENTITY_FIELDS:
        raise QueryError(f"unknown anchor field {anchor_field!r}")
    if finding_field not in ENTITY_FIELDS:
        raise QueryError(f"unknown finding field {finding_field!r}")
    if k < 1:
        raise QueryError("k must be >= 1")

    posts: dict[str, int] = {}
    threads: dict[str, set[str]] = {}
    for record_id in index.facets.get((anchor_field, anchor_value), frozenset()):
        record = index.docs[record_id].record
        for value in record.entities[finding_field]:
            posts[value] = posts.get(value, 0) + 1
            threads.setdefault(value, set()).add(record.thread_id)

    ranked = sorted(posts.items(), key=lambda item: (-item[1], item[0]))[:k]
    rows = tuple(
        FindingRow(value=value, post_count=count, thread_count=len(threads[value]))
        for value, count in ranked
    )
    return FrequentFindings(
        anchor_field=anchor_field,
        anchor_value=anchor_value,
        finding_field=finding_field,
        rows=rows,
    )
