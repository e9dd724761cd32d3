from __future__ import annotations

import json
from datetime import datetime, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ship.corpus import (
    MISSING_TIMESTAMP_FALLBACK,
    CorpusError,
    RowError,
    elementary_facts,
    ingest_corpus,
    load_roster,
    write_threads_jsonl,
)


def write_jsonl(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


def thread_row(thread_id="t1", n_posts=3, **over):
    row = {
        "thread_id": thread_id,
        "source_forum": "forum-a",
        "top_level_category": "lung-cancer",
        "url": f"http://forum-a.example.org/{thread_id}",
        "title": "a thread",
        "posts": [
            {
                "post_id": f"{thread_id}:{i}",
                "author": f"user{i}",
                "body": f"post body {i}",
                "posted_at": f"2011-03-0{i + 1}T10:00:00+00:00",
            }
            for i in range(n_posts)
        ],
    }
    row.update(over)
    return row


def test_three_post_thread_counts_two_responses(tmp_path):
    path = tmp_path / "in.jsonl"
    write_jsonl(path, [thread_row(n_posts=3)])
    (thread,) = ingest_corpus(path)
    assert thread.num_responses == 2
    assert [p.position for p in thread.posts] == [0, 1, 2]


def test_empty_file_is_a_hard_error(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    with pytest.raises(CorpusError, match="zero valid threads"):
        ingest_corpus(path)


def test_malformed_rows_are_skipped_and_counted(tmp_path):
    path = tmp_path / "in.jsonl"
    path.write_text(
        json.dumps(thread_row("t1")) + "\n" + "{broken\n" + json.dumps(thread_row("t2")) + "\n",
        encoding="utf-8",
    )
    errors: list[RowError] = []
    threads = ingest_corpus(path, errors=errors)
    assert [t.thread_id for t in threads] == ["t1", "t2"]
    assert len(errors) == 1 and errors[0].line == 2


def test_duplicate_post_id_row_is_skipped(tmp_path):
    path = tmp_path / "in.jsonl"
    rows = [thread_row("t1"), thread_row("t2")]
    rows[1]["posts"][0]["post_id"] = "t1:0"
    write_jsonl(path, rows)
    errors: list[RowError] = []
    threads = ingest_corpus(path, errors=errors)
    assert [t.thread_id for t in threads] == ["t1"]
    assert "duplicate post_id" in errors[0].message


def test_synthetic_ids_when_absent(tmp_path):
    path = tmp_path / "raw.jsonl"
    write_jsonl(path, [{"posts": [{"body": "hello"}, {"body": "again"}]}])
    (thread,) = ingest_corpus(path, source="siteA")
    assert thread.thread_id == "siteA:0"
    assert [p.post_id for p in thread.posts] == ["siteA:0:0", "siteA:0:1"]


def test_last_updated_is_max_post_timestamp(tmp_path):
    path = tmp_path / "in.jsonl"
    write_jsonl(path, [thread_row(n_posts=3, last_updated="2010-01-01T00:00:00+00:00")])
    (thread,) = ingest_corpus(path)
    assert thread.last_updated == datetime(2011, 3, 3, 10, tzinfo=timezone.utc)


def test_missing_timestamps_fall_back_to_constant(tmp_path):
    path = tmp_path / "in.jsonl"
    row = thread_row(n_posts=2)
    for post in row["posts"]:
        del post["posted_at"]
    write_jsonl(path, [row])
    (thread,) = ingest_corpus(path)
    assert thread.last_updated == MISSING_TIMESTAMP_FALLBACK


def test_ingest_is_deterministic(tmp_path):
    path = tmp_path / "in.jsonl"
    write_jsonl(path, [thread_row("t1"), thread_row("t2", n_posts=5)])
    assert ingest_corpus(path) == ingest_corpus(path)


HTML_FIXTURE = """
<html><head><title>Tarceva questions - forum</title></head><body>
<div class="post">
  <span class="author">maplewalker</span>
  <span class="date">2011-05-02T09:30:00Z</span>
  <div class="body">Starting tarceva on Monday, any tips?</div>
</div>
<div class="post">
  <span class="author">dr_reyes</span>
  <span class="date">2011-05-02T11:00:00Z</span>
  <div class="body">Take it on an empty stomach.</div>
</div>
</body></html>
"""


def test_generic_html_adapter(tmp_path):
    path = tmp_path / "thread.html"
    path.write_text(HTML_FIXTURE, encoding="utf-8")
    (thread,) = ingest_corpus(path, fmt="html", roster=frozenset({"dr_reyes"}))
    assert thread.title == "Tarceva questions - forum"
    assert len(thread.posts) == 2
    assert [p.position for p in thread.posts] == [0, 1]
    assert thread.posts[0].body == "Starting tarceva on Monday, any tips?"
    assert thread.posts[0].author == "maplewalker"
    assert thread.posts[1].expert_authored is True
    assert thread.posts[0].posted_at == datetime(2011, 5, 2, 9, 30, tzinfo=timezone.utc)


def test_html_adapter_with_custom_classes(tmp_path):
    from ship.corpus import HtmlConfig

    path = tmp_path / "thread.html"
    path.write_text(
        '<html><body><div class="msg"><b class="who">ann</b>'
        '<p class="text">First message.</p></div>'
        '<div class="msg"><b class="who">bob</b>'
        '<p class="text">Second message.</p></div></body></html>',
        encoding="utf-8",
    )
    config = HtmlConfig(post_class="msg", author_class="who", body_class="text")
    (thread,) = ingest_corpus(path, fmt="html", html_config=config)
    assert [p.author for p in thread.posts] == ["ann", "bob"]
    assert thread.posts[1].body == "Second message."


def test_html_body_falls_back_to_block_text(tmp_path):
    path = tmp_path / "thread.html"
    path.write_text(
        '<div class="post"><span class="author">cara</span>'
        " Just the plain text, no body element. </div>",
        encoding="utf-8",
    )
    (thread,) = ingest_corpus(path, fmt="html")
    assert thread.posts[0].body == "Just the plain text, no body element."
    assert thread.posts[0].author == "cara"


def test_elementary_facts_copies_thread_fields(tmp_path):
    path = tmp_path / "in.jsonl"
    write_jsonl(path, [thread_row(n_posts=5)])
    (thread,) = ingest_corpus(path)
    for post in thread.posts:
        facts = elementary_facts(thread, post)
        assert facts.num_responses == 4
        assert facts.url == thread.url
        assert facts.user_name == post.author


def test_post_length_counts_unicode_scalars(tmp_path):
    path = tmp_path / "in.jsonl"
    row = thread_row(n_posts=1)
    row["posts"][0]["body"] = "hello"
    write_jsonl(path, [row])
    (thread,) = ingest_corpus(path)
    assert elementary_facts(thread, thread.posts[0]).post_length == 5

    row["posts"][0]["body"] = "naïve ❤"
    write_jsonl(path, [row])
    (thread,) = ingest_corpus(path)
    assert elementary_facts(thread, thread.posts[0]).post_length == 7


def test_elementary_facts_rejects_foreign_post(tmp_path):
    path = tmp_path / "in.jsonl"
    write_jsonl(path, [thread_row("t1"), thread_row("t2")])
    t1, t2 = ingest_corpus(path)
    with pytest.raises(ValueError, match="does not belong"):
        elementary_facts(t1, t2.posts[0])


def test_expert_flag_from_roster(tmp_path):
    roster_path = tmp_path / "experts.txt"
    roster_path.write_text("# staff\ndr_reyes\n\nnurse_coleman\n", encoding="utf-8")
    roster = load_roster(roster_path)
    assert roster == frozenset({"dr_reyes", "nurse_coleman"})

    path = tmp_path / "in.jsonl"
    row = thread_row(n_posts=2)
    row["posts"][0]["author"] = "dr_reyes"
    write_jsonl(path, [row])
    (thread,) = ingest_corpus(path, roster=roster)
    assert thread.posts[0].expert_authored is True
    assert thread.posts[1].expert_authored is False


# --- properties ---------------------------------------------------------------

_name = st.text(alphabet="abcdefghij-_", min_size=1, max_size=8)
_body = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=0, max_size=80
)
_stamp = st.datetimes(
    min_value=datetime(2005, 1, 1),
    max_value=datetime(2014, 12, 31),
).map(lambda d: d.replace(tzinfo=timezone.utc, microsecond=0))


@st.composite
def thread_rows(draw, ordinal=0):
    n_posts = draw(st.integers(min_value=1, max_value=5))
    with_stamps = draw(st.booleans())
    posts = []
    for i in range(n_posts):
        post = {"post_id": f"g{ordinal}:{i}", "author": draw(_name), "body": draw(_body)}
        if with_stamps:
            post["posted_at"] = draw(_stamp).isoformat()
        posts.append(post)
    return {
        "thread_id": f"g{ordinal}",
        "source_forum": draw(_name),
        "top_level_category": draw(_name),
        "url": "http://x.example.org/" + draw(_name),
        "title": draw(_body),
        "posts": posts,
    }


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_roundtrip_and_response_count(tmp_path_factory, data):
    rows = [data.draw(thread_rows(ordinal=i)) for i in range(data.draw(st.integers(1, 4)))]
    base = tmp_path_factory.mktemp("rt")
    path = base / "in.jsonl"
    write_jsonl(path, rows)
    threads = ingest_corpus(path)

    for thread in threads:
        assert len(thread.posts) == thread.num_responses + 1

    out = base / "out.jsonl"
    write_threads_jsonl(threads, out)
    assert ingest_corpus(out) == threads
