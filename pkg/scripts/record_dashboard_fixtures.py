#!/usr/bin/env python3
"""Record API payloads from the synthetic demo corpus into
frontend/fixtures/, so the dashboard's contract tests run without the
backend.

Usage: python scripts/record_dashboard_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ship import demo
from ship.analytics import broad_categorization, frequent_findings
from ship.data import shipped_lexicons, shipped_specs
from ship.index import Query, build_index, search
from ship.metabase import distill_corpus, write_metabase
from ship.corpus import parse_timestamp
from ship.payloads import (
    categories_payload,
    frequent_payload,
    query_result_payload,
    thread_payload,
)

OUT = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"


def main() -> None:
    import tempfile

    labeled_threads, labels = demo.make_labeled_corpus()
    train_rows, _ = demo.split_labels(labels)
    specs = shipped_specs()
    models = demo.train_models(labeled_threads, train_rows, specs)
    threads = demo.make_demo_corpus()
    lexicons = shipped_lexicons()
    records, thread_records = distill_corpus(threads, lexicons, specs, models)
    with tempfile.TemporaryDirectory() as td:
        write_metabase(records, thread_records, td, threads=threads,
                       build_time=parse_timestamp("2012-01-01T00:00:00+00:00"))
        index = build_index(td)

    fixtures = {
        "search_tarceva.json": query_result_payload(search(index, Query(text="tarceva"))),
        "search_tarceva_advice.json": query_result_payload(
            search(index, Query(text="tarceva", filters=(("advice", "Y"),)))
        ),
        "search_empty.json": query_result_payload(search(index, Query(text="zzznothing"))),
        "frequent_tarceva_side_effect.json": frequent_payload(
            frequent_findings(index, ("chemo_drug", "tarceva"), "side_effect", 10)
        ),
        "categories_tarceva.json": categories_payload(
            broad_categorization(index, Query(text="tarceva"))
        ),
        "error_bad_filter.json": {
            "error": {"code": "bad_query", "message": "unknown filter field 'diet'"}
        },
    }
    # a thread with at least three posts for the reading view
    thread_id = next(
        tid for tid, ids in sorted(index.thread_posts.items()) if len(ids) >= 3
    )
    fixtures["thread.json"] = thread_payload(index, index.threads[thread_id])

    OUT.mkdir(parents=True, exist_ok=True)
    for name, payload in fixtures.items():
        (OUT / name).write_text(
            json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
