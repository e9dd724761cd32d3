#!/usr/bin/env python3
"""Run the whole pipeline on the synthetic demo corpus and print the
walkthrough numbers. Equivalent to `ship demo build` plus a few queries.

Usage: python scripts/build_demo.py [out_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ship import demo
from ship.analytics import broad_categorization, frequent_findings
from ship.corpus import parse_timestamp, write_threads_jsonl
from ship.data import shipped_lexicons, shipped_specs
from ship.index import Query, build_index, save_index, search
from ship.metabase import distill_corpus, write_metabase
from ship.tree import evaluate, save_model


def main() -> None:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
    out.mkdir(parents=True, exist_ok=True)

    print("== training the five expression classifiers ==")
    labeled_threads, labels = demo.make_labeled_corpus()
    train_rows, test_rows = demo.split_labels(labels)
    specs = shipped_specs()
    models = demo.train_models(labeled_threads, train_rows, specs)
    (out / "models").mkdir(exist_ok=True)
    for letter, tree in models.items():
        save_model(out / "models" / f"{letter}.json", specs[letter], tree)
        vectors = demo.featurize_labels(labeled_threads, test_rows, specs[letter], letter)
        report = evaluate(tree, vectors)
        print(f"  {letter}: precision={report.precision:.2f} recall={report.recall:.2f} "
              f"({tree.node_count()} nodes)")

    print("== distilling the demo corpus ==")
    threads = demo.make_demo_corpus()
    write_threads_jsonl(threads, out / "posts.jsonl")
    lexicons = shipped_lexicons()
    records, thread_records = distill_corpus(threads, lexicons, specs, models)
    manifest = write_metabase(
        records, thread_records, out / "meta", threads=threads, corpus_name="demo",
        build_time=parse_timestamp("2012-01-01T00:00:00+00:00"),
    )
    print(f"  {manifest.posts} posts, {manifest.threads} threads, {manifest.fact_count} facts")

    print("== building the index ==")
    shard = build_index(out / "meta")
    save_index(shard, out / "idx")
    print(f"  {shard.doc_count} documents, {len(shard.postings)} terms")

    print("== walkthrough ==")
    findings = frequent_findings(shard, ("chemo_drug", "tarceva"), "side_effect", 5)
    for rank, row in enumerate(findings.rows, 1):
        print(f"  {rank}. {row.value:<12} posts={row.post_count:<4} threads={row.thread_count}")
    plain = search(shard, Query(text="tarceva"))
    narrowed = search(shard, Query(text="tarceva", filters=(("advice", "Y"),)))
    print(f"  search 'tarceva': {plain.total_hits} hits; with advice=Y: {narrowed.total_hits}")
    panel = broad_categorization(shard, Query(text="tarceva"))
    for row in panel.rows[:4]:
        print(f"  {row.source_forum:<16} {row.top_level_category:<16} "
              f"threads={row.thread_count} posts={row.post_count}")
    print(f"done; artifacts under {out}/")


if __name__ == "__main__":
    main()
