"""Acceptance suite: one test per acceptance criterion, each printing a
pass/fail line with its runtime budget. Run with `pytest tests/test_acceptance.py -s`.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import pytest
from click.testing import CliRunner

from helpers import oracle_best_split, oracle_entropy, oracle_mentions, random_dataset, scan_candidates
from ship import demo
from ship.cli import main as cli_main
from ship.entities import Lexicon, extract_entities
from ship.index import (
    BoostConfig,
    Query,
    QueryCache,
    cached_search,
    candidate_ids,
    save_index,
    search,
)
from ship.metabase import (
    ENTITY_FIELDS,
    EXPRESSION_FIELDS,
    aggregate_thread,
    distill_corpus,
    read_metabase,
    write_metabase,
)
from ship.payloads import canonical_payload
from ship.tree import TrainParams, best_split, classify, entropy, evaluate, train_c45

from conftest import BUILD_TIME
from test_metabase import make_record
from test_index import FILTER_CHOICES, random_query, records_with_text

FIXTURES = Path(__file__).parent / "fixtures"


@contextmanager
def criterion(name: str, limit_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    elapsed = time.perf_counter() - start
    assert elapsed < limit_s, f"{name} took {elapsed:.1f}s, budget {limit_s}s"
    print(f"[acceptance] {name}: PASS ({elapsed:.2f}s < {limit_s:.0f}s)")


def test_c45_oracle_equivalence():
    """200 random datasets: best_split matches brute force within 1e-9;
    unpruned trees reproduce consistent data exactly."""
    with criterion("C4.5 oracle equivalence", 30):
        rng = random.Random(20240)
        consistent_seen = 0
        for i in range(200):
            consistent = i % 2 == 0
            spec, data = random_dataset(rng, max_rows=64, max_features=6, consistent=consistent)

            n_y = sum(1 for v in data if v.label == "Y")
            assert entropy(n_y, len(data) - n_y) == pytest.approx(
                oracle_entropy(n_y, len(data) - n_y), abs=1e-9
            )

            got = best_split(data, spec, min_leaf=2)
            want = oracle_best_split(data, spec, min_leaf=2)
            if want is None:
                assert got is None
            else:
                assert got is not None
                assert (got.feature_index, got.threshold) == (want[0], want[1])
                assert got.gain == pytest.approx(want[2], abs=1e-9)
                assert got.gain_ratio == pytest.approx(want[3], abs=1e-9)

            if consistent:
                consistent_seen += 1
                tree = train_c45(data, spec, TrainParams(min_leaf=1, cf=None))
                assert all(classify(tree, v) == v.label for v in data)
        assert consistent_seen == 100


def test_expression_pipeline_accuracy(labeled_corpus, specs, models):
    """All five classifiers reach precision >= 0.90 and recall >= 0.85 on the
    held-out 20% of the shipped synthetic labeled corpus."""
    with criterion("expression pipeline accuracy", 60):
        threads, _, test_rows = labeled_corpus
        per_expression = {}
        for letter in "PAISO":
            vectors = demo.featurize_labels(threads, test_rows, specs[letter], letter)
            assert len(vectors) >= 100
            report = evaluate(models[letter], vectors)

            # hand-computed confusion matrix, then exact arithmetic
            tp = fp = fn = tn = 0
            for vec in vectors:
                predicted = classify(models[letter], vec)
                if predicted == "Y" and vec.label == "Y":
                    tp += 1
                elif predicted == "Y":
                    fp += 1
                elif vec.label == "Y":
                    fn += 1
                else:
                    tn += 1
            assert (report.tp, report.fp, report.fn, report.tn) == (tp, fp, fn, tn)
            assert report.precision == tp / (tp + fp)
            assert report.recall == tp / (tp + fn)

            assert report.precision >= 0.90, f"{letter}: precision {report.precision:.3f}"
            assert report.recall >= 0.85, f"{letter}: recall {report.recall:.3f}"
            per_expression[letter] = (report.precision, report.recall)
        summary = " ".join(f"{k}={p:.2f}/{r:.2f}" for k, (p, r) in per_expression.items())
        print(f"  precision/recall: {summary}")


def test_entity_extraction_accuracy(lexicons):
    """Fixture precision/recall >= 0.90 plus oracle equality on 1,000 random texts."""
    with criterion("entity extraction accuracy", 30):
        rows = [
            json.loads(line)
            for line in (FIXTURES / "entity_gold.jsonl").read_text(encoding="utf-8").splitlines()
        ]
        assert len(rows) >= 200
        tp = fp = fn = 0
        for row in rows:
            gold = {
                (m["entity_type"], m["start"], m["end"], m["canonical"])
                for m in row["mentions"]
            }
            found = {
                (m.entity_type, m.start, m.end, m.canonical)
                for m in extract_entities(row["text"], lexicons)
            }
            tp += len(gold & found)
            fp += len(found - gold)
            fn += len(gold - found)
        precision = tp / (tp + fp)
        recall = tp / (tp + fn)
        assert precision >= 0.90, f"fixture precision {precision:.3f}"
        assert recall >= 0.90, f"fixture recall {recall:.3f}"
        print(f"  fixture: precision={precision:.3f} recall={recall:.3f} "
              f"(tp={tp} fp={fp} fn={fn})")

        rng = random.Random(909)
        small = [
            Lexicon("chemo_drug", {"tarceva": "tarceva", "erlotinib": "tarceva",
                                   "cisplatin": "cisplatin", "5 fu": "fluorouracil"}),
            Lexicon("side_effect", {"cough": "cough", "coughing": "cough",
                                    "joint pain": "joint pain", "pain": "pain",
                                    "nausea": "nausea", "dry cough": "cough"}),
        ]
        pieces = ("tarceva", "cough", "coughing", "joint", "pain", "joint pain", "crash",
                  "the", "and", "5", "fu", "5 fu", "a", ",", ".", "-", "  ", "nausea")
        for _ in range(1000):
            body = ""
            for _ in range(rng.randint(0, 40)):
                body += rng.choice(pieces) + rng.choice((" ", "", ", "))
            body = body[:200]
            got = {
                (m.entity_type, m.start, m.end, m.canonical)
                for m in extract_entities(body, small)
            }
            want = set()
            for lex in small:
                for start, end, canonical in oracle_mentions(body, lex):
                    want.add((lex.entity_type, start, end, canonical))
            assert got == want, f"divergence on {body!r}"


def test_aggregation_laws():
    """Permutation invariance, idempotence, monotonicity and single-post
    identity over 1,000 randomized threads."""
    with criterion("aggregation laws", 10):
        rng = random.Random(515)
        values = ("cough", "nausea", "tarceva", "boston", "iv", "2010-01-01")

        def random_records(thread_ordinal, n):
            records = []
            for i in range(n):
                entities = {
                    name: {rng.choice(values) for _ in range(rng.randint(0, 3))}
                    for name in ENTITY_FIELDS
                }
                expressions = {name: rng.choice("YN") for name in EXPRESSION_FIELDS}
                records.append(
                    make_record(
                        post_id=f"a{thread_ordinal}:{i}",
                        thread_id=f"a{thread_ordinal}",
                        minute=rng.randint(0, 50_000),
                        entities=entities,
                        expressions=expressions,
                    )
                )
            return records

        for t in range(1000):
            records = random_records(t, rng.randint(1, 8))
            agg = aggregate_thread(records)

            shuffled = list(records)
            rng.shuffle(shuffled)
            assert aggregate_thread(shuffled) == agg  # permutation invariance

            doubled = aggregate_thread(records + records)
            assert doubled.expressions == agg.expressions  # idempotence
            assert doubled.entities == agg.entities

            extra = random_records(t, 1)[0]
            grown = aggregate_thread(records + [extra])  # monotonicity
            for name in ENTITY_FIELDS:
                assert agg.entities[name] <= grown.entities[name]
            for name in EXPRESSION_FIELDS:
                assert not (agg.expressions[name] == "Y" and grown.expressions[name] == "N")

            single = aggregate_thread(records[:1])  # single-post identity
            assert single.entities == records[0].entities
            assert single.expressions == records[0].expressions
            assert single.num_posts == 1


def test_metabase_audit(tmp_path, lexicons, specs, models):
    """1,000-post corpus: manifest fact_count equals an independent tally;
    the write -> read -> write cycle is byte-identical."""
    with criterion("meta-base audit", 10):
        threads = demo.make_audit_corpus(lexicons, n_posts=1000)
        records, thread_records = distill_corpus(threads, lexicons, specs, models)
        assert len(records) == 1000

        dir_a = tmp_path / "a"
        manifest = write_metabase(
            records, thread_records, dir_a, threads=threads,
            corpus_name="audit", build_time=BUILD_TIME,
        )

        tally = 0
        with (dir_a / "posts.meta.jsonl").open(encoding="utf-8") as fh:
            for line in fh:
                obj = json.loads(line)
                tally += sum(1 for key in obj if key not in ("entities", "expressions"))
                tally += sum(len(vals) for vals in obj["entities"].values())
                tally += len(obj["expressions"])
        assert manifest.fact_count == tally
        print(f"  fact_count={manifest.fact_count} "
              f"(~{manifest.fact_count / manifest.posts:.1f} facts per post)")

        got_records, got_thread_records, _ = read_metabase(dir_a)
        dir_b = tmp_path / "b"
        write_metabase(
            got_records, got_thread_records, dir_b, threads=threads,
            corpus_name="audit", build_time=BUILD_TIME,
        )
        for name in ("posts.meta.jsonl", "threads.meta.jsonl", "corpus.jsonl", "manifest.json"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes(), name


def test_search_correctness(demo_index):
    """Candidate sets equal the linear scan for 500 random queries; filters
    are monotone; boosts never change membership; cache equals fresh."""
    with criterion("search correctness", 60):
        rng = random.Random(616)
        rows = records_with_text(demo_index)
        cache = QueryCache(capacity=64)
        no_boost = BoostConfig(0.0, 0.0)
        for _ in range(500):
            query = random_query(rng)
            terms = sorted(set(query.text.split()))

            got = candidate_ids(demo_index, query)
            assert got == scan_candidates(rows, terms, query.filters)

            narrowed = replace(query, filters=query.filters + (rng.choice(FILTER_CHOICES),))
            assert len(candidate_ids(demo_index, narrowed)) <= len(got)

            wide = replace(query, page_size=10_000)
            boosted = search(demo_index, wide)
            plain = search(demo_index, wide, boosts=no_boost)
            assert {h.record_id for h in boosted.hits} == {h.record_id for h in plain.hits}

            cached = cached_search(demo_index, query, cache)
            assert replace(cached, cache_hit=False) == search(demo_index, query)


@pytest.fixture(scope="module")
def saved_index_dir(tmp_path_factory, demo_index):
    out = tmp_path_factory.mktemp("accept-idx")
    save_index(demo_index, out)
    return out


def test_use_case_replay(saved_index_dir):
    """The walkthrough: cough ranks third among tarceva side effects, and the
    advice filter strictly narrows the matching search."""
    with criterion("use-case replay", 5):
        runner = CliRunner()
        result = runner.invoke(
            cli_main,
            ["analytics", "frequent", "--idx", str(saved_index_dir),
             "--anchor", "chemo_drug=tarceva", "--field", "side_effect", "--k", "3", "--json"],
        )
        assert result.exit_code == 0, result.output
        rows = json.loads(result.output)["rows"]
        assert len(rows) == 3
        assert rows[2]["value"] == "cough"

        unfiltered = runner.invoke(
            cli_main,
            ["search", "--idx", str(saved_index_dir), "--q", "tarceva", "--json"],
        )
        filtered = runner.invoke(
            cli_main,
            ["search", "--idx", str(saved_index_dir), "--q", "tarceva",
             "--filter", "advice=Y", "--json"],
        )
        total = json.loads(unfiltered.output)["total_hits"]
        narrowed = json.loads(filtered.output)["total_hits"]
        assert 0 < narrowed < total
        print(f"  tarceva hits {total} -> advice=Y {narrowed}")


def test_api_cli_equivalence(saved_index_dir, demo_index):
    """100 random query/filter combinations produce canonically equal
    payloads through the CLI and the HTTP API."""
    with criterion("API/CLI equivalence", 30):
        from fastapi.testclient import TestClient

        from ship.api import create_app
        from ship.config import ApiConfig

        config = ApiConfig(index_path=str(saved_index_dir))
        client = TestClient(create_app(config, index=demo_index))
        runner = CliRunner()
        rng = random.Random(717)

        for _ in range(100):
            query = random_query(rng)
            cli_args = ["search", "--idx", str(saved_index_dir), "--q", query.text,
                        "--page", str(query.page), "--page-size", str(query.page_size), "--json"]
            params = [("q", query.text), ("page", str(query.page)),
                      ("page_size", str(query.page_size))]
            for fld, value in query.filters:
                cli_args.extend(["--filter", f"{fld}={value}"])
                params.append(("filter", f"{fld}:{value}"))

            cli_result = runner.invoke(cli_main, cli_args)
            assert cli_result.exit_code == 0, cli_result.output
            api_result = client.get("/api/search", params=params)
            assert api_result.status_code == 200

            cli_payload = canonical_payload(json.loads(cli_result.output))
            api_payload = canonical_payload(api_result.json())
            assert cli_payload == api_payload
