"""Assembling and persisting the experiences meta-base.

A meta-base directory holds:

    posts.meta.jsonl    one distilled post record per line, canonical JSON
    threads.meta.jsonl  one aggregated thread record per line
    corpus.jsonl        the normalized source threads (bodies and titles,
                        needed downstream by indexing and the reading view)
    manifest.json       counts, fact tally, build stamp and file checksums

All files are written in canonical form (sorted keys, NFC, compact), so the
same inputs produce byte-identical output.

fact_count tallies emitted field-values over post records: each of the nine
elementary fields, each value inside each entity set, and each of the five
expression labels counts as one fact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import canonjson
from .corpus import (
    MISSING_TIMESTAMP_FALLBACK,
    Post,
    Thread,
    elementary_facts,
    format_timestamp,
    parse_timestamp,
    thread_to_row,
)
from .entities import Lexicon, extract_entities, extract_pattern_facts
from .features import EXPRESSIONS, FeatureSpec, featurize
from .tree import DecisionTree, classify

ENTITY_FIELDS = (
    "age",
    "gender",
    "condition",
    "cancer_stage",
    "location",
    "cancer_condition",
    "treatment",
    "general_drug",
    "chemo_drug",
    "pain_killer",
    "side_effect",
    "date_diagnosed",
    "hospital",
)

EXPRESSION_FIELDS = ("personal_experience", "advice", "information", "support", "outcome")

EXPRESSION_BY_LETTER = dict(zip(EXPRESSIONS, EXPRESSION_FIELDS))

ELEMENTARY_FIELDS = (
    "post_id",
    "thread_id",
    "last_updated",
    "num_responses",
    "top_level_category",
    "post_length",
    "url",
    "expert_authored",
    "user_name",
)

POSTS_FILE = "posts.meta.jsonl"
THREADS_FILE = "threads.meta.jsonl"
CORPUS_FILE = "corpus.jsonl"
MANIFEST_FILE = "manifest.json"


class MetabaseError(Exception):
    pass


def _check_fields(entities: dict, expressions: dict) -> None:
    if set(entities) != set(ENTITY_FIELDS):
        raise ValueError(f"entity fields must be exactly {ENTITY_FIELDS}")
    if set(expressions) != set(EXPRESSION_FIELDS):
        raise ValueError(f"expression fields must be exactly {EXPRESSION_FIELDS}")
    bad = [v for v in expressions.values() if v not in ("Y", "N")]
    if bad:
        raise ValueError(f"expression values must be Y or N, got {bad}")


@dataclass(frozen=True)
class DistilledRecord:
    post_id: str
    thread_id: str
    last_updated: datetime
    num_responses: int
    top_level_category: str
    post_length: int
    url: str
    expert_authored: bool
    user_name: str
    entities: dict[str, frozenset[str]]
    expressions: dict[str, str]

    def __post_init__(self):
        _check_fields(self.entities, self.expressions)

    def fact_count(self) -> int:
        return (
            len(ELEMENTARY_FIELDS)
            + sum(len(values) for values in self.entities.values())
            + len(EXPRESSION_FIELDS)
        )


@dataclass(frozen=True)
class ThreadRecord:
    thread_id: str
    source_forum: str
    top_level_category: str
    url: str
    title: str
    num_posts: int
    last_updated: datetime
    entities: dict[str, frozenset[str]]
    expressions: dict[str, str]

    def __post_init__(self):
        _check_fields(self.entities, self.expressions)


@dataclass(frozen=True)
class MetabaseManifest:
    corpus_name: str
    threads: int
    posts: int
    fact_count: int
    build_timestamp: str
    checksums: dict[str, str]
    artifact_checksums: dict[str, str]
    missing_timestamp_fallback: str


def distill_post(
    thread: Thread,
    post: Post,
    lexicons: list[Lexicon],
    specs: dict[str, FeatureSpec],
    models: dict[str, DecisionTree],
) -> DistilledRecord:
    """Compose elementary facts, entity mentions, pattern facts and the five
    expression labels into one record. Pure given loaded artifacts."""
    facts = elementary_facts(thread, post)

    entities: dict[str, set[str]] = {name: set() for name in ENTITY_FIELDS}
    for mention in extract_entities(post.body, lexicons):
        entities[mention.entity_type].add(mention.canonical)
    pattern = extract_pattern_facts(post.body)
    if pattern.age is not None:
        entities["age"].add(str(pattern.age))
    if pattern.gender is not None:
        entities["gender"].add(pattern.gender)
    if pattern.cancer_stage is not None:
        entities["cancer_stage"].add(pattern.cancer_stage)
    if pattern.date_diagnosed is not None:
        entities["date_diagnosed"].add(pattern.date_diagnosed)

    expressions = {}
    for letter in EXPRESSIONS:
        vector = featurize(post.body, specs[letter])
        expressions[EXPRESSION_BY_LETTER[letter]] = classify(models[letter], vector)

    return DistilledRecord(
        post_id=facts.post_id,
        thread_id=facts.thread_id,
        last_updated=facts.last_updated,
        num_responses=facts.num_responses,
        top_level_category=facts.top_level_category,
        post_length=facts.post_length,
        url=facts.url,
        expert_authored=facts.expert_authored,
        user_name=facts.user_name,
        entities={k: frozenset(v) for k, v in entities.items()},
        expressions=expressions,
    )


def aggregate_thread(
    records: list[DistilledRecord], source_forum: str = "", title: str = ""
) -> ThreadRecord:
    """Union entity sets and OR the expressions across a thread's posts."""
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    thread_ids = {r.thread_id for r in records}
    if len(thread_ids) != 1:
        raise ValueError(f"records span multiple threads: {sorted(thread_ids)}")

    entities = {
        name: frozenset().union(*(r.entities[name] for r in records)) for name in ENTITY_FIELDS
    }
    expressions = {
        name: "Y" if any(r.expressions[name] == "Y" for r in records) else "N"
        for name in EXPRESSION_FIELDS
    }
    first = records[0]
    return ThreadRecord(
        thread_id=first.thread_id,
        source_forum=source_forum,
        top_level_category=first.top_level_category,
        url=first.url,
        title=title,
        num_posts=len(records),
        last_updated=max(r.last_updated for r in records),
        entities=entities,
        expressions=expressions,
    )


def distill_corpus(
    threads: list[Thread],
    lexicons: list[Lexicon],
    specs: dict[str, FeatureSpec],
    models: dict[str, DecisionTree],
) -> tuple[list[DistilledRecord], list[ThreadRecord]]:
    records = []
    thread_records = []
    for thread in sorted(threads, key=lambda t: t.thread_id):
        per_thread = [distill_post(thread, post, lexicons, specs, models) for post in thread.posts]
        records.extend(per_thread)
        thread_records.append(
            aggregate_thread(per_thread, source_forum=thread.source_forum, title=thread.title)
        )
    return records, thread_records


def record_to_dict(record: DistilledRecord) -> dict:
    return {
        "post_id": record.post_id,
        "thread_id": record.thread_id,
        "last_updated": format_timestamp(record.last_updated),
        "num_responses": record.num_responses,
        "top_level_category": record.top_level_category,
        "post_length": record.post_length,
        "url": record.url,
        "expert_authored": record.expert_authored,
        "user_name": record.user_name,
        "entities": {k: sorted(v) for k, v in record.entities.items()},
        "expressions": dict(record.expressions),
    }


def record_from_dict(obj: dict) -> DistilledRecord:
    return DistilledRecord(
        post_id=obj["post_id"],
        thread_id=obj["thread_id"],
        last_updated=parse_timestamp(obj["last_updated"]),
        num_responses=obj["num_responses"],
        top_level_category=obj["top_level_category"],
        post_length=obj["post_length"],
        url=obj["url"],
        expert_authored=obj["expert_authored"],
        user_name=obj["user_name"],
        entities={k: frozenset(v) for k, v in obj["entities"].items()},
        expressions=dict(obj["expressions"]),
    )


def thread_record_to_dict(record: ThreadRecord) -> dict:
    return {
        "thread_id": record.thread_id,
        "source_forum": record.source_forum,
        "top_level_category": record.top_level_category,
        "url": record.url,
        "title": record.title,
        "num_posts": record.num_posts,
        "last_updated": format_timestamp(record.last_updated),
        "entities": {k: sorted(v) for k, v in record.entities.items()},
        "expressions": dict(record.expressions),
    }


def thread_record_from_dict(obj: dict) -> ThreadRecord:
    return ThreadRecord(
        thread_id=obj["thread_id"],
        source_forum=obj["source_forum"],
        top_level_category=obj["top_level_category"],
        url=obj["url"],
        title=obj["title"],
        num_posts=obj["num_posts"],
        last_updated=parse_timestamp(obj["last_updated"]),
        entities={k: frozenset(v) for k, v in obj["entities"].items()},
        expressions=dict(obj["expressions"]),
    )


def _write_canonical_lines(path: Path, rows: list[dict]) -> str:
    text = "".join(canonjson.dumps(row) + "\n" for row in rows)
    data = text.encode("utf-8")
    path.write_bytes(data)
    return canonjson.sha256_of_bytes(data)


def write_metabase(
    records: list[DistilledRecord],
    thread_records: list[ThreadRecord],
    out_dir: str | Path,
    threads: list[Thread] | None = None,
    corpus_name: str = "corpus",
    artifact_checksums: dict[str, str] | None = None,
    build_time: datetime | None = None,
) -> MetabaseManifest:
    """Write the meta-base directory; returns its manifest.

    Pass an explicit build_time for byte-reproducible manifests; the default
    uses the current UTC time.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    records = sorted(records, key=lambda r: (r.thread_id, r.post_id))
    thread_records = sorted(thread_records, key=lambda t: t.thread_id)
    seen: set[str] = set()
    for record in records:
        if record.post_id in seen:
            raise MetabaseError(f"duplicate post_id {record.post_id!r}")
        seen.add(record.post_id)

    checksums = {
        POSTS_FILE: _write_canonical_lines(out / POSTS_FILE, [record_to_dict(r) for r in records]),
        THREADS_FILE: _write_canonical_lines(
            out / THREADS_FILE, [thread_record_to_dict(t) for t in thread_records]
        ),
    }
    if threads is not None:
        checksums[CORPUS_FILE] = _write_canonical_lines(
            out / CORPUS_FILE, [thread_to_row(t) for t in sorted(threads, key=lambda t: t.thread_id)]
        )

    stamp = build_time if build_time is not None else datetime.now(timezone.utc)
    manifest = MetabaseManifest(
        corpus_name=corpus_name,
        threads=len(thread_records),
        posts=len(records),
        fact_count=sum(r.fact_count() for r in records),
        build_timestamp=format_timestamp(stamp),
        checksums=checksums,
        artifact_checksums=dict(artifact_checksums or {}),
        missing_timestamp_fallback=format_timestamp(MISSING_TIMESTAMP_FALLBACK),
    )
    manifest_obj = {
        "corpus_name": manifest.corpus_name,
        "counts": {
            "threads": manifest.threads,
            "posts": manifest.posts,
            "fact_count": manifest.fact_count,
        },
        "build_timestamp": manifest.build_timestamp,
        "checksums": manifest.checksums,
        "artifact_checksums": manifest.artifact_checksums,
        "missing_timestamp_fallback": manifest.missing_timestamp_fallback,
    }
    (out / MANIFEST_FILE).write_bytes((canonjson.dumps(manifest_obj) + "\n").encode("utf-8"))
    return manifest


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise MetabaseError(f"{path}:{line_no}: malformed line: {exc.msg}") from exc
    return rows


def read_manifest(metabase_dir: str | Path) -> MetabaseManifest:
    path = Path(metabase_dir) / MANIFEST_FILE
    if not path.exists():
        raise MetabaseError(f"{path}: missing manifest")
    obj = json.loads(path.read_text(encoding="utf-8"))
    return MetabaseManifest(
        corpus_name=obj["corpus_name"],
        threads=obj["counts"]["threads"],
        posts=obj["counts"]["posts"],
        fact_count=obj["counts"]["fact_count"],
        build_timestamp=obj["build_timestamp"],
        checksums=obj["checksums"],
        artifact_checksums=obj["artifact_checksums"],
        missing_timestamp_fallback=obj["missing_timestamp_fallback"],
    )


def read_metabase(
    metabase_dir: str | Path,
) -> tuple[list[DistilledRecord], list[ThreadRecord], MetabaseManifest]:
    """Inverse of write_metabase; verifies checksums and post_id uniqueness."""
    base = Path(metabase_dir)
    manifest = read_manifest(base)
    for name, expected in manifest.checksums.items():
        actual = canonjson.sha256_of_bytes((base / name).read_bytes())
        if actual != expected:
            raise MetabaseError(f"{base / name}: checksum mismatch")

    records = [record_from_dict(obj) for obj in _read_jsonl(base / POSTS_FILE)]
    seen: set[str] = set()
    for record in records:
        if record.post_id in seen:
            raise MetabaseError(f"duplicate post_id {record.post_id!r}")
        seen.add(record.post_id)
    thread_records = [thread_record_from_dict(obj) for obj in _read_jsonl(base / THREADS_FILE)]
    return records, thread_records, manifest


def read_metabase_corpus(metabase_dir: str | Path) -> list[dict]:
    """The normalized source threads stored alongside the records."""
    path = Path(metabase_dir) / CORPUS_FILE
    if not path.exists():
        raise MetabaseError(f"{path}: meta-base has no stored corpus")
    return _read_jsonl(path)
