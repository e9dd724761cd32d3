"""Inverted-index search over the meta-base: facets, boosts, LRU cache.

Scoring is conjunctive tf-idf over unique query terms,

    base(d)  = sum_t (1 + ln tf(t, d)) * ln(1 + N / df(t))
    final(d) = base(d) * (1 + Wr * recency_norm(d))
                       * (1 + Wa * ln(1 + responses(d)) / ln(1 + max_responses))

with recency_norm min-max normalized over the corpus. The boosts reorder
results but never change the candidate set. The ranking function is a
stand-in: the system this reimplements names no scoring formula, so tf-idf
with the two documented boosts is our choice and both weights are config.

On disk an index is a directory of canonical-JSON segments plus a versioned
header carrying per-file checksums and an overall index checksum that the
query cache uses for wholesale invalidation.
"""

from __future__ import annotations

import json
import math
from collections import OrderedDict
from dataclasses import dataclass, replace
from pathlib import Path

from . import canonjson
from .metabase import (
    ENTITY_FIELDS,
    EXPRESSION_FIELDS,
    DistilledRecord,
    ThreadRecord,
    record_from_dict,
    record_to_dict,
    read_metabase,
    read_metabase_corpus,
    thread_record_from_dict,
    thread_record_to_dict,
)
from .textutil import tokenize

INDEX_VERSION = 1
HEADER_FILE = "header.json"
SEGMENT_FILES = ("docs.jsonl", "threads.jsonl", "postings.jsonl", "facets.jsonl")

# Thread-level metadata facets beyond the record fields; the dashboard's
# category panel filters on these.
METADATA_FIELDS = ("source_forum", "top_level_category")

FILTERABLE_FIELDS = tuple(EXPRESSION_FIELDS) + tuple(ENTITY_FIELDS) + METADATA_FIELDS

SNIPPET_WIDTH = 160


class IndexError_(Exception):
    pass


class QueryError(Exception):
    """Malformed query: empty, unknown field or bad filter value."""


@dataclass(frozen=True)
class StoredDoc:
    record: DistilledRecord
    title: str
    body: str
    position: int


@dataclass(frozen=True)
class Query:
    text: str = ""
    filters: tuple[tuple[str, str], ...] = ()
    page: int = 0
    page_size: int = 10


@dataclass(frozen=True)
class Hit:
    record_id: str
    score: float
    title: str
    url: str
    snippet: str


@dataclass(frozen=True)
class QueryResult:
    total_hits: int
    page: int
    page_size: int
    hits: tuple[Hit, ...]
    cache_hit: bool = False


@dataclass(frozen=True)
class BoostConfig:
    recency_weight: float = 0.2
    response_weight: float = 0.1


@dataclass
class IndexShard:
    postings: dict[str, dict[str, int]]          # term -> record_id -> tf
    docs: dict[str, StoredDoc]                   # record_id -> stored document
    doc_lengths: dict[str, int]
    facets: dict[tuple[str, str], frozenset[str]]
    threads: dict[str, ThreadRecord]
    thread_posts: dict[str, list[str]]           # thread_id -> record_ids by position
    min_updated: float
    max_updated: float
    max_responses: int
    checksum: str = ""

    @property
    def doc_count(self) -> int:
        return len(self.docs)


def _doc_tokens(doc: StoredDoc) -> list[str]:
    return tokenize(doc.body) + tokenize(doc.title)


def build_index(metabase_dir: str | Path) -> IndexShard:
    """Index every post record: body and title terms plus all facet fields."""
    records, thread_records, _ = read_metabase(metabase_dir)
    corpus_rows = read_metabase_corpus(metabase_dir)

    bodies: dict[str, tuple[str, str, int]] = {}
    for row in corpus_rows:
        for position, post in enumerate(row.get("posts", [])):
            bodies[post["post_id"]] = (row.get("title", ""), post.get("body", ""), position)

    docs: dict[str, StoredDoc] = {}
    for record in records:
        if record.post_id not in bodies:
            raise IndexError_(f"record {record.post_id!r} has no stored post body")
        title, body, position = bodies[record.post_id]
        docs[record.post_id] = StoredDoc(record=record, title=title, body=body, position=position)

    return _assemble(docs, {t.thread_id: t for t in thread_records})


def _assemble(docs: dict[str, StoredDoc], threads: dict[str, ThreadRecord]) -> IndexShard:
    postings: dict[str, dict[str, int]] = {}
    doc_lengths: dict[str, int] = {}
    facet_sets: dict[tuple[str, str], set[str]] = {}
    thread_posts: dict[str, list[str]] = {}

    for record_id in sorted(docs):
        doc = docs[record_id]
        tokens = _doc_tokens(doc)
        doc_lengths[record_id] = len(tokens)
        for token in tokens:
            postings.setdefault(token, {}).setdefault(record_id, 0)
            postings[token][record_id] += 1
        record = doc.record
        for name in EXPRESSION_FIELDS:
            facet_sets.setdefault((name, record.expressions[name]), set()).add(record_id)
        for name in ENTITY_FIELDS:
            for value in record.entities[name]:
                facet_sets.setdefault((name, value), set()).add(record_id)
        thread = threads.get(record.thread_id)
        if thread is not None and thread.source_forum:
            facet_sets.setdefault(("source_forum", thread.source_forum), set()).add(record_id)
        if record.top_level_category:
            facet_sets.setdefault(
                ("top_level_category", record.top_level_category), set()
            ).add(record_id)
        thread_posts.setdefault(record.thread_id, []).append(record_id)

    for record_ids in thread_posts.values():
        record_ids.sort(key=lambda rid: docs[rid].position)

    updated = [doc.record.last_updated.timestamp() for doc in docs.values()]
    shard = IndexShard(
        postings=postings,
        docs=docs,
        doc_lengths=doc_lengths,
        facets={k: frozenset(v) for k, v in facet_sets.items()},
        threads=threads,
        thread_posts=thread_posts,
        min_updated=min(updated) if updated else 0.0,
        max_updated=max(updated) if updated else 0.0,
        max_responses=max((d.record.num_responses for d in docs.values()), default=0),
    )
    shard.checksum = _index_checksum(shard)
    return shard


def _index_checksum(index: IndexShard) -> str:
    return canonjson.sha256_of(
        {
            "version": INDEX_VERSION,
            "docs": [_doc_to_dict(index.docs[rid]) for rid in sorted(index.docs)],
            "threads": [thread_record_to_dict(index.threads[t]) for t in sorted(index.threads)],
        }
    )


def validate_query(query: Query) -> list[str]:
    """Returns canonical unique terms; raises QueryError on a bad query."""
    terms = sorted(set(tokenize(query.text)))
    if not terms and not query.filters:
        raise QueryError("query needs at least one term or one filter")
    if query.page < 0:
        raise QueryError("page must be >= 0")
    if query.page_size < 1:
        raise QueryError("page_size must be >= 1")
    for fld, value in query.filters:
        if fld not in FILTERABLE_FIELDS:
            raise QueryError(f"unknown filter field {fld!r}")
        if fld in EXPRESSION_FIELDS and value not in ("Y", "N"):
            raise QueryError(f"filter {fld!r} takes Y or N, got {value!r}")
    return terms


def candidate_ids(index: IndexShard, query: Query) -> set[str]:
    """Records containing every query term and matching every filter."""
    terms = validate_query(query)
    result: set[str] | None = None
    for term in terms:
        ids = set(index.postings.get(term, {}))
        result = ids if result is None else result & ids
        if not result:
            return set()
    for fld, value in query.filters:
        ids = set(index.facets.get((fld, value), frozenset()))
        result = ids if result is None else result & ids
        if not result:
            return set()
    return result if result is not None else set()


def _base_score(index: IndexShard, record_id: str, terms: list[str]) -> float:
    score = 0.0
    n = index.doc_count
    for term in terms:
        tf = index.postings[term][record_id]
        df = len(index.postings[term])
        score += (1 + math.log(tf)) * math.log(1 + n / df)
    return score


def _boost(index: IndexShard, record_id: str, boosts: BoostConfig) -> float:
    record = index.docs[record_id].record
    spread = index.max_updated - index.min_updated
    recency_norm = (
        (record.last_updated.timestamp() - index.min_updated) / spread if spread > 0 else 0.0
    )
    factor = 1 + boosts.recency_weight * recency_norm
    if index.max_responses > 0:
        activity = math.log(1 + record.num_responses) / math.log(1 + index.max_responses)
        factor *= 1 + boosts.response_weight * activity
    return factor


def _snippet(body: str, terms: list[str]) -> str:
    low = body.lower()
    start = None
    for term in terms:
        i = low.find(term)
        if i >= 0 and (start is None or i < start):
            start = i
    if start is None:
        start = 0
    begin = max(0, start - SNIPPET_WIDTH // 4)
    end = min(len(body), begin + SNIPPET_WIDTH)
    prefix = "..." if begin > 0 else ""
    suffix = "..." if end < len(body) else ""
    return prefix + " ".join(body[begin:end].split()) + suffix


def search(index: IndexShard, query: Query, boosts: BoostConfig | None = None) -> QueryResult:
    """Ranked conjunctive search; deterministic tie-break by record_id."""
    boosts = boosts or BoostConfig()
    terms = validate_query(query)
    candidates = candidate_ids(index, query)

    scored = []
    for record_id in candidates:
        base = _base_score(index, record_id, terms) if terms else 0.0
        scored.append((base * _boost(index, record_id, boosts), record_id))
    scored.sort(key=lambda pair: (-pair[0], pair[1]))

    start = query.page * query.page_size
    hits = []
    for score, record_id in scored[start : start + query.page_size]:
        doc = index.docs[record_id]
        hits.append(
            Hit(
                record_id=record_id,
                score=score,
                title=doc.title,
                url=doc.record.url,
                snippet=_snippet(doc.body, terms),
            )
        )
    return QueryResult(
        total_hits=len(scored),
        page=query.page,
        page_size=query.page_size,
        hits=tuple(hits),
    )


def cache_key(query: Query) -> str:
    return canonjson.dumps(
        {
            "terms": sorted(set(tokenize(query.text))),
            "filters": sorted(query.filters),
            "page": query.page,
            "page_size": query.page_size,
        }
    )


class QueryCache:
    """LRU cache over canonical query keys, bound to one index checksum."""

    def __init__(self, capacity: int = 1024):
        if capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        self.capacity = capacity
        self._entries: OrderedDict[str, QueryResult] = OrderedDict()
        self._index_checksum: str | None = None
        self.hits = 0
        self.misses = 0

    def _sync(self, checksum: str) -> None:
        if self._index_checksum != checksum:
            self._entries.clear()
            self._index_checksum = checksum

    def lookup(self, checksum: str, key: str) -> QueryResult | None:
        self._sync(checksum)
        result = self._entries.get(key)
        if result is not None:
            self._entries.move_to_end(key)
            self.hits += 1
            return result
        self.misses += 1
        return None

    def store(self, checksum: str, key: str, result: QueryResult) -> None:
        self._sync(checksum)
        if key in self._entries:
            self._entries.pop(key)
        elif len(self._entries) >= self.capacity:
            self._entries.popitem(last=False)
        self._entries[key] = result

    def __len__(self) -> int:
        return len(self._entries)


def cached_search(
    index: IndexShard,
    query: Query,
    cache: QueryCache,
    boosts: BoostConfig | None = None,
) -> QueryResult:
    validate_query(query)
    key = cache_key(query)
    cached = cache.lookup(index.checksum, key)
    if cached is not None:
        return replace(cached, cache_hit=True)
    result = search(index, query, boosts)
    cache.store(index.checksum, key, result)
    return result


def _doc_to_dict(doc: StoredDoc) -> dict:
    return {
        "record": record_to_dict(doc.record),
        "title": doc.title,
        "body": doc.body,
        "position": doc.position,
    }


def save_index(index: IndexShard, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    segments = {
        "docs.jsonl": [_doc_to_dict(index.docs[rid]) for rid in sorted(index.docs)],
        "threads.jsonl": [thread_record_to_dict(index.threads[t]) for t in sorted(index.threads)],
        "postings.jsonl": [
            {"term": term, "postings": dict(sorted(index.postings[term].items()))}
            for term in sorted(index.postings)
        ],
        "facets.jsonl": [
            {"field": fld, "value": value, "records": sorted(ids)}
            for (fld, value), ids in sorted(index.facets.items())
        ],
    }
    checksums = {}
    for name, rows in segments.items():
        data = "".join(canonjson.dumps(row) + "\n" for row in rows).encode("utf-8")
        (out / name).write_bytes(data)
        checksums[name] = canonjson.sha256_of_bytes(data)

    header = {
        "version": INDEX_VERSION,
        "checksum": index.checksum,
        "doc_count": index.doc_count,
        "files": checksums,
    }
    (out / HEADER_FILE).write_bytes((canonjson.dumps(header) + "\n").encode("utf-8"))


def load_index(index_dir: str | Path) -> IndexShard:
    base = Path(index_dir)
    header_path = base / HEADER_FILE
    if not header_path.exists():
        raise IndexError_(f"{base}: not an index directory (missing {HEADER_FILE})")
    header = json.loads(header_path.read_text(encoding="utf-8"))
    if header.get("version") != INDEX_VERSION:
        raise IndexError_(f"{base}: unsupported index version {header.get('version')!r}")
    for name, expected in header["files"].items():
        actual = canonjson.sha256_of_bytes((base / name).read_bytes())
        if actual != expected:
            raise IndexError_(f"{base / name}: checksum mismatch")

    def rows(name: str) -> list[dict]:
        return [json.loads(line) for line in (base / name).read_text(encoding="utf-8").splitlines()]

    docs = {}
    for obj in rows("docs.jsonl"):
        record = record_from_dict(obj["record"])
        docs[record.post_id] = StoredDoc(
            record=record, title=obj["title"], body=obj["body"], position=obj["position"]
        )
    threads = {obj["thread_id"]: thread_record_from_dict(obj) for obj in rows("threads.jsonl")}
    postings = {obj["term"]: dict(obj["postings"]) for obj in rows("postings.jsonl")}
    facets = {
        (obj["field"], obj["value"]): frozenset(obj["records"]) for obj in rows("facets.jsonl")
    }

    thread_posts: dict[str, list[str]] = {}
    for record_id, doc in docs.items():
        thread_posts.setdefault(doc.record.thread_id, []).append(record_id)
    for record_ids in thread_posts.values():
        record_ids.sort(key=lambda rid: docs[rid].position)

    updated = [doc.record.last_updated.timestamp() for doc in docs.values()]
    shard = IndexShard(
        postings=postings,
        docs=docs,
        doc_lengths={rid: len(_doc_tokens(doc)) for rid, doc in docs.items()},
        facets=facets,
        threads=threads,
        thread_posts=thread_posts,
        min_updated=min(updated) if updated else 0.0,
        max_updated=max(updated) if updated else 0.0,
        max_responses=max((d.record.num_responses for d in docs.values()), default=0),
        checksum=header["checksum"],
    )
    if _index_checksum(shard) != header["checksum"]:
        raise IndexError_(f"{base}: index checksum mismatch")
    return shard
