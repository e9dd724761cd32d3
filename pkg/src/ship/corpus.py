"""Corpus ingestion: normalized forum threads, posts and elementary facts.

Input is either the normalized thread JSONL (one thread object per line) or a
generic HTML export with configurable CSS class names. JSONL schema:

    {
        "thread_id": "...",             # optional, synthesized when absent
        "source_forum": "...",
        "top_level_category": "...",
        "url": "...",
        "title": "...",
        "last_updated": "2011-03-04T00:00:00+00:00",   # optional
        "posts": [
            {
                "post_id": "...",       # optional, synthesized when absent
                "author": "...",
                "expert": false,        # optional
                "posted_at": "...",     # optional ISO timestamp
                "body": "..."
            }
        ]
    }

Timestamps are stored as aware UTC datetimes. When no timestamp is available
anywhere in a thread, last_updated falls back to a fixed constant so repeated
runs stay byte-identical.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from html.parser import HTMLParser
from pathlib import Path

logger = logging.getLogger(__name__)

# Deterministic stand-in for missing timestamps, recorded in the manifest.
MISSING_TIMESTAMP_FALLBACK = datetime(1970, 1, 1, tzinfo=timezone.utc)


class CorpusError(Exception):
    """Unrecoverable ingestion failure (e.g. zero valid threads)."""


@dataclass(frozen=True)
class Post:
    post_id: str
    thread_id: str
    author: str
    expert_authored: bool
    body: str
    posted_at: datetime | None
    position: int


@dataclass(frozen=True)
class Thread:
    thread_id: str
    source_forum: str
    top_level_category: str
    url: str
    title: str
    last_updated: datetime
    num_responses: int
    posts: tuple[Post, ...]


@dataclass(frozen=True)
class ElementaryFacts:
    """Post-level fields derivable without any text analysis."""

    post_id: str
    thread_id: str
    last_updated: datetime
    num_responses: int
    top_level_category: str
    post_length: int
    url: str
    expert_authored: bool
    user_name: str


@dataclass(frozen=True)
class RowError:
    line: int
    message: str


@dataclass(frozen=True)
class HtmlConfig:
    """CSS class names used by the generic HTML adapter."""

    post_class: str = "post"
    author_class: str = "author"
    time_class: str = "date"
    body_class: str = "body"
    title_class: str = "title"


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO 8601 timestamp; naive values are taken as UTC."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat()


def load_roster(path: str | Path) -> frozenset[str]:
    """Author roster: one name per line, '#' comments, blanks ignored."""
    names = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        names.add(line)
    return frozenset(names)


def _thread_from_row(
    row: dict,
    ordinal: int,
    source: str,
    roster: frozenset[str],
) -> Thread:
    if not isinstance(row, dict):
        raise ValueError("row is not an object")
    raw_posts = row.get("posts")
    if not isinstance(raw_posts, list) or not raw_posts:
        raise ValueError("missing or empty 'posts' array")

    source_forum = str(row.get("source_forum") or source)
    thread_id = str(row.get("thread_id") or f"{source_forum}:{ordinal}")

    posts = []
    for pos, raw in enumerate(raw_posts):
        if not isinstance(raw, dict):
            raise ValueError(f"post {pos} is not an object")
        body = raw.get("body")
        if not isinstance(body, str):
            raise ValueError(f"post {pos} has no text body")
        author = str(raw.get("author") or "")
        posted_at = None
        if raw.get("posted_at"):
            posted_at = parse_timestamp(str(raw["posted_at"]))
        posts.append(
            Post(
                post_id=str(raw.get("post_id") or f"{thread_id}:{pos}"),
                thread_id=thread_id,
                author=author,
                expert_authored=bool(raw.get("expert")) or author in roster,
                body=body,
                posted_at=posted_at,
                position=pos,
            )
        )

    stamped = [p.posted_at for p in posts if p.posted_at is not None]
    if stamped:
        last_updated = max(stamped)
    elif row.get("last_updated"):
        last_updated = parse_timestamp(str(row["last_updated"]))
    else:
        last_updated = MISSING_TIMESTAMP_FALLBACK

    return Thread(
        thread_id=thread_id,
        source_forum=source_forum,
        top_level_category=str(row.get("top_level_category") or ""),
        url=str(row.get("url") or ""),
        title=str(row.get("title") or ""),
        last_updated=last_updated,
        num_responses=len(posts) - 1,
        posts=tuple(posts),
    )


def ingest_corpus(
    path: str | Path,
    fmt: str = "jsonl",
    roster: frozenset[str] | None = None,
    source: str | None = None,
    errors: list[RowError] | None = None,
    html_config: HtmlConfig | None = None,
) -> list[Thread]:
    """Parse a corpus file into normalized threads.

    Malformed rows are skipped, logged with their line number and appended to
    `errors` when a list is supplied. Raises CorpusError when no valid thread
    survives.
    """
    path = Path(path)
    if fmt not in ("jsonl", "html"):
        raise ValueError(f"unknown corpus format: {fmt!r}")
    roster = roster or frozenset()
    source = source or path.stem
    collected = errors if errors is not None else []

    threads: list[Thread] = []
    seen_threads: set[str] = set()
    seen_posts: set[str] = set()

    if fmt == "jsonl":
        rows = _iter_jsonl_rows(path, collected)
    else:
        rows = _iter_html_rows(path, collected, html_config)

    for line_no, row in rows:
        try:
            thread = _thread_from_row(row, len(threads), source, roster)
            if thread.thread_id in seen_threads:
                raise ValueError(f"duplicate thread_id {thread.thread_id!r}")
            dup = [p.post_id for p in thread.posts if p.post_id in seen_posts]
            if dup:
                raise ValueError(f"duplicate post_id {dup[0]!r}")
            ids = {p.post_id for p in thread.posts}
            if len(ids) != len(thread.posts):
                raise ValueError("repeated post_id within thread")
        except ValueError as exc:
            collected.append(RowError(line_no, str(exc)))
            logger.warning("%s:%d: skipped row: %s", path, line_no, exc)
            continue
        seen_threads.add(thread.thread_id)
        seen_posts.update(p.post_id for p in thread.posts)
        threads.append(thread)

    if not threads:
        raise CorpusError(f"{path}: zero valid threads")
    return threads


def _iter_jsonl_rows(path: Path, errors: list[RowError]):
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                errors.append(RowError(line_no, f"invalid JSON: {exc.msg}"))
                logger.warning("%s:%d: invalid JSON", path, line_no)


def _iter_html_rows(path: Path, errors: list[RowError], config: HtmlConfig | None = None):
    config = config or HtmlConfig()
    parser = _ForumHtmlParser(config)
    parser.feed(path.read_text(encoding="utf-8"))
    row = parser.to_row()
    if row["posts"]:
        yield 1, row
    else:
        errors.append(RowError(1, "no post blocks found"))


class _ForumHtmlParser(HTMLParser):
    """Extracts a single thread from generic forum HTML.

    Every element carrying `post_class` starts a post; inside it, elements
    with the author/time/body classes supply those fields. Without a body
    element the post body is the block's text minus author and time text.
    """

    def __init__(self, config: HtmlConfig):
        super().__init__(convert_charrefs=True)
        self.config = config
        self.page_title: list[str] = []
        self.posts: list[dict] = []
        self._stack: list[set[str]] = []

    def _roles(self) -> set[str]:
        merged: set[str] = set()
        for roles in self._stack:
            merged |= roles
        return merged

    def handle_starttag(self, tag, attrs):
        classes = (dict(attrs).get("class") or "").split()
        roles = set()
        if tag == "title":
            roles.add("page_title")
        if self.config.post_class in classes:
            roles.add("post")
            self.posts.append({"author": [], "time": [], "body": [], "plain": []})
        active = self._roles()
        if "post" in active or "post" in roles:
            if self.config.author_class in classes:
                roles.add("author")
            if self.config.time_class in classes:
                roles.add("time")
            if self.config.body_class in classes:
                roles.add("body")
        if self.config.title_class in classes and "post" not in active and "post" not in roles:
            roles.add("page_title")
        self._stack.append(roles)

    def handle_endtag(self, tag):
        if self._stack:
            self._stack.pop()

    def handle_data(self, data):
        active = self._roles()
        if "page_title" in active:
            self.page_title.append(data)
        if "post" not in active or not self.posts:
            return
        post = self.posts[-1]
        if "author" in active:
            post["author"].append(data)
        elif "time" in active:
            post["time"].append(data)
        elif "body" in active:
            post["body"].append(data)
        else:
            post["plain"].append(data)

    def to_row(self) -> dict:
        posts = []
        for post in self.posts:
            text = "".join(post["body"]) if post["body"] else "".join(post["plain"])
            entry = {
                "author": " ".join("".join(post["author"]).split()),
                "body": " ".join(text.split()),
            }
            stamp = " ".join("".join(post["time"]).split())
            if stamp:
                try:
                    entry["posted_at"] = format_timestamp(parse_timestamp(stamp))
                except ValueError:
                    pass
            posts.append(entry)
        return {
            "title": " ".join("".join(self.page_title).split()),
            "posts": posts,
        }


def elementary_facts(thread: Thread, post: Post) -> ElementaryFacts:
    """Copy thread-level fields onto the post record; no text analysis.

    post_length counts unicode scalar values, not bytes.
    """
    if post.thread_id != thread.thread_id:
        raise ValueError(f"post {post.post_id!r} does not belong to thread {thread.thread_id!r}")
    return ElementaryFacts(
        post_id=post.post_id,
        thread_id=thread.thread_id,
        last_updated=thread.last_updated,
        num_responses=thread.num_responses,
        top_level_category=thread.top_level_category,
        post_length=len(post.body),
        url=thread.url,
        expert_authored=post.expert_authored,
        user_name=post.author,
    )


def thread_to_row(thread: Thread) -> dict:
    """Normalized JSONL representation; inverse of ingest for round-trips."""
    posts = []
    for post in thread.posts:
        entry = {
            "post_id": post.post_id,
            "author": post.author,
            "expert": post.expert_authored,
            "body": post.body,
        }
        if post.posted_at is not None:
            entry["posted_at"] = format_timestamp(post.posted_at)
        posts.append(entry)
    return {
        "thread_id": thread.thread_id,
        "source_forum": thread.source_forum,
        "top_level_category": thread.top_level_category,
        "url": thread.url,
        "title": thread.title,
        "last_updated": format_timestamp(thread.last_updated),
        "posts": posts,
    }


def write_threads_jsonl(threads: list[Thread], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for thread in threads:
            fh.write(json.dumps(thread_to_row(thread), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
