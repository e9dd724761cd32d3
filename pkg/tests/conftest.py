from __future__ import annotations

import pytest

from ship import data, demo
from ship.corpus import parse_timestamp
from ship.index import build_index
from ship.metabase import distill_corpus, write_metabase

BUILD_TIME = parse_timestamp("2012-01-01T00:00:00+00:00")


@pytest.fixture(scope="session")
def lexicons():
    return data.shipped_lexicons()


@pytest.fixture(scope="session")
def specs():
    return data.shipped_specs()


@pytest.fixture(scope="session")
def labeled_corpus():
    threads, labels = demo.make_labeled_corpus()
    train_rows, test_rows = demo.split_labels(labels)
    return threads, train_rows, test_rows


@pytest.fixture(scope="session")
def models(labeled_corpus, specs):
    threads, train_rows, _ = labeled_corpus
    return demo.train_models(threads, train_rows, specs)


@pytest.fixture(scope="session")
def demo_threads():
    return demo.make_demo_corpus()


@pytest.fixture(scope="session")
def demo_metabase(tmp_path_factory, demo_threads, lexicons, specs, models):
    """Demo corpus distilled and persisted; returns (dir, records, thread_records)."""
    out = tmp_path_factory.mktemp("demo-meta")
    records, thread_records = distill_corpus(demo_threads, lexicons, specs, models)
    write_metabase(
        records, thread_records, out, threads=demo_threads, corpus_name="demo", build_time=BUILD_TIME
    )
    return out, records, thread_records


@pytest.fixture(scope="session")
def demo_index(demo_metabase):
    metabase_dir, _, _ = demo_metabase
    return build_index(metabase_dir)
