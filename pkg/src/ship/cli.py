"""The `ship` command line: batch pipeline plus query tools.

Typical flow:

    ship ingest --in raw.jsonl --format jsonl --roster experts.txt --out posts.jsonl
    ship train --posts posts.jsonl --labels train.csv --expression S \
               --spec specs/S.tsv --out models/S.json
    ship distill --posts posts.jsonl --lexicons lexicons/ --models models/ --out meta/
    ship index --metabase meta/ --out idx/
    ship search --idx idx/ --q tarceva --filter advice=Y
    ship analytics frequent --idx idx/ --anchor chemo_drug=tarceva --field side_effect --k 10
    ship serve --idx idx/ --port 8080

`ship demo build` generates the synthetic demo corpus, trains the five
classifiers and runs the whole pipeline into one directory.
"""

from __future__ import annotations

import json
import sys
from datetime import timezone
from pathlib import Path

import click

from . import canonjson, demo
from .analytics import broad_categorization, frequent_findings
from .config import load_config
from .corpus import (
    CorpusError,
    HtmlConfig,
    RowError,
    ingest_corpus,
    load_roster,
    parse_timestamp,
    write_threads_jsonl,
)
from .data import load_lexicon_dir, shipped_specs
from .entities import LexiconError, load_lexicon
from .features import EXPRESSIONS, load_feature_spec
from .index import (
    IndexError_,
    Query,
    QueryError,
    build_index,
    load_index,
    save_index,
    search as run_search,
)
from .metabase import MetabaseError, distill_corpus, write_metabase
from .payloads import categories_payload, frequent_payload, query_result_payload
from .tree import TrainParams, evaluate, load_model, save_model, train_c45


def _fail(message: str) -> None:
    raise click.ClickException(message)


def _parse_filter_args(raw_filters: tuple[str, ...]) -> tuple[tuple[str, str], ...]:
    filters = []
    for raw in raw_filters:
        fld, sep, value = raw.partition("=")
        if not sep or not fld or not value:
            _fail(f"malformed filter {raw!r}, expected field=value")
        filters.append((fld, value))
    return tuple(filters)


@click.group()
def main():
    """Distill forum threads into a meta-base, then search and analyze it."""


@main.command()
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["jsonl", "html"]), default="jsonl")
@click.option("--roster", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--source", default=None, help="source forum tag for synthesized IDs")
@click.option("--html-post-class", default="post", show_default=True)
@click.option("--html-author-class", default="author", show_default=True)
@click.option("--html-time-class", default="date", show_default=True)
@click.option("--html-body-class", default="body", show_default=True)
def ingest(input_path, fmt, roster, out_path, source,
           html_post_class, html_author_class, html_time_class, html_body_class):
    """Parse raw input into normalized thread JSONL."""
    roster_names = load_roster(roster) if roster else frozenset()
    html_config = HtmlConfig(
        post_class=html_post_class,
        author_class=html_author_class,
        time_class=html_time_class,
        body_class=html_body_class,
    )
    errors: list[RowError] = []
    try:
        threads = ingest_corpus(
            input_path, fmt, roster=roster_names, source=source,
            errors=errors, html_config=html_config,
        )
    except CorpusError as exc:
        _fail(str(exc))
    write_threads_jsonl(threads, out_path)
    posts = sum(len(t.posts) for t in threads)
    click.echo(f"ingested {len(threads)} threads / {posts} posts -> {out_path}")
    for err in errors:
        click.echo(f"  skipped line {err.line}: {err.message}", err=True)
    if errors:
        click.echo(f"  {len(errors)} rows skipped", err=True)


@main.group()
def lexicon():
    """Lexicon utilities."""


@lexicon.command("check")
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--type", "entity_type", default=None, help="entity type; default: file stem")
def lexicon_check(path, entity_type):
    """Validate a lexicon TSV file."""
    entity_type = entity_type or Path(path).stem
    try:
        lex = load_lexicon(path, entity_type)
    except LexiconError as exc:
        _fail(str(exc))
    canonicals = len(set(lex.entries.values()))
    click.echo(f"{path}: ok ({len(lex.entries)} surface forms, {canonicals} canonical values)")


@main.command()
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--expression", required=True, type=click.Choice(list(EXPRESSIONS)))
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--posts", "posts_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="normalized thread JSONL with the labeled post bodies")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--min-leaf", default=2, show_default=True)
@click.option("--cf", default=0.25, show_default=True, help="pruning confidence factor")
@click.option("--unpruned", is_flag=True, help="disable pessimistic pruning")
def train(labels_path, expression, spec_path, posts_path, out_path, min_leaf, cf, unpruned):
    """Train one expression classifier and write the model JSON."""
    spec = load_feature_spec(spec_path)
    if spec.expression != expression:
        _fail(f"spec file is for expression {spec.expression!r}, not {expression!r}")
    threads = ingest_corpus(posts_path, "jsonl")
    labels = demo.read_labels_csv(labels_path)
    vectors = demo.featurize_labels(threads, labels, spec, expression)
    if not vectors:
        _fail(f"no rows for expression {expression!r} in {labels_path}")
    params = TrainParams(min_leaf=min_leaf, cf=None if unpruned else cf)
    tree = train_c45(vectors, spec, params)
    save_model(out_path, spec, tree)
    click.echo(f"trained {expression} on {len(vectors)} posts -> {out_path} "
               f"({tree.node_count()} nodes)")


@main.command("eval")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--posts", "posts_path", required=True, type=click.Path(exists=True, dir_okay=False))
def eval_cmd(model_path, labels_path, posts_path):
    """Evaluate a model on held-out labels; prints a classifier-accuracy row."""
    spec, tree = load_model(model_path)
    threads = ingest_corpus(posts_path, "jsonl")
    labels = demo.read_labels_csv(labels_path)
    vectors = demo.featurize_labels(threads, labels, spec, spec.expression)
    if not vectors:
        _fail(f"no rows for expression {spec.expression!r} in {labels_path}")
    report = evaluate(tree, vectors)
    click.echo(f"Classifier   {spec.expression}")
    click.echo(f"Precision    {report.precision:.2f}" + ("" if report.precision_defined else " (no Y predictions)"))
    click.echo(f"Recall       {report.recall:.2f}" + ("" if report.recall_defined else " (no Y labels)"))
    click.echo(f"F1           {report.f1:.2f}")
    click.echo(f"Confusion    tp={report.tp} fp={report.fp} fn={report.fn} tn={report.tn}")


@main.command()
@click.option("--posts", "posts_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--lexicons", "lexicon_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--models", "model_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--corpus-name", default="corpus", show_default=True)
@click.option("--build-time", default=None, help="ISO timestamp for reproducible manifests")
def distill(posts_path, lexicon_dir, model_dir, out_dir, corpus_name, build_time):
    """Distill posts into the meta-base directory."""
    threads = ingest_corpus(posts_path, "jsonl")
    lexicons = load_lexicon_dir(lexicon_dir)
    specs = {}
    models = {}
    artifact_checksums = {}
    for letter in EXPRESSIONS:
        path = Path(model_dir) / f"{letter}.json"
        if not path.exists():
            _fail(f"missing model {path}")
        specs[letter], models[letter] = load_model(path)
        artifact_checksums[f"model:{letter}"] = canonjson.sha256_of_bytes(path.read_bytes())
    for path in sorted(Path(lexicon_dir).glob("*.tsv")):
        artifact_checksums[f"lexicon:{path.stem}"] = canonjson.sha256_of_bytes(path.read_bytes())

    records, thread_records = distill_corpus(threads, lexicons, specs, models)
    stamp = parse_timestamp(build_time).astimezone(timezone.utc) if build_time else None
    manifest = write_metabase(
        records,
        thread_records,
        out_dir,
        threads=threads,
        corpus_name=corpus_name,
        artifact_checksums=artifact_checksums,
        build_time=stamp,
    )
    click.echo(
        f"distilled {manifest.posts} posts / {manifest.threads} threads, "
        f"{manifest.fact_count} facts -> {out_dir}"
    )


@main.command("index")
@click.option("--metabase", "metabase_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def index_cmd(metabase_dir, out_dir):
    """Build the inverted index from a meta-base."""
    try:
        shard = build_index(metabase_dir)
    except (MetabaseError, IndexError_) as exc:
        _fail(str(exc))
    save_index(shard, out_dir)
    click.echo(f"indexed {shard.doc_count} posts, {len(shard.postings)} terms -> {out_dir}")


@main.command()
@click.option("--idx", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--q", "query_text", default="")
@click.option("--filter", "filters", multiple=True, help="field=value, repeatable")
@click.option("--page", default=0, show_default=True)
@click.option("--page-size", default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="print the API-equivalent JSON payload")
def search(index_dir, query_text, filters, page, page_size, as_json):
    """Search the index with conjunctive terms and facet filters."""
    shard = load_index(index_dir)
    query = Query(text=query_text, filters=_parse_filter_args(filters), page=page, page_size=page_size)
    try:
        result = run_search(shard, query)
    except QueryError as exc:
        _fail(str(exc))
    payload = query_result_payload(result)
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True, ensure_ascii=False))
        return
    click.echo(f"{result.total_hits} hits (page {result.page})")
    for hit in payload["hits"]:
        click.echo(f"  {hit['score']:>8.4f}  {hit['record_id']}  {hit['title']}")
        click.echo(f"            {hit['snippet']}")


@main.group()
def analytics():
    """Dashboard-style aggregates."""


@analytics.command()
@click.option("--idx", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--anchor", required=True, help="field=value, e.g. chemo_drug=tarceva")
@click.option("--field", "finding_field", required=True)
@click.option("--k", default=10, show_default=True)
@click.option("--json", "as_json", is_flag=True)
def frequent(index_dir, anchor, finding_field, k, as_json):
    """Top-k entity values co-mentioned with an anchor entity."""
    shard = load_index(index_dir)
    fld, sep, value = anchor.partition("=")
    if not sep or not fld or not value:
        _fail(f"malformed anchor {anchor!r}, expected field=value")
    try:
        findings = frequent_findings(shard, (fld, value), finding_field, k)
    except QueryError as exc:
        _fail(str(exc))
    payload = frequent_payload(findings)
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True, ensure_ascii=False))
        return
    click.echo(f"{finding_field} co-mentioned with {fld}={value}")
    for rank, row in enumerate(payload["rows"], 1):
        click.echo(f"  {rank:>2}. {row['value']:<24} posts={row['post_count']:<5} threads={row['thread_count']}")


@analytics.command()
@click.option("--idx", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--q", "query_text", default="")
@click.option("--filter", "filters", multiple=True)
@click.option("--json", "as_json", is_flag=True)
def categories(index_dir, query_text, filters, as_json):
    """Where matching discussion happens, by forum and category."""
    shard = load_index(index_dir)
    query = Query(text=query_text, filters=_parse_filter_args(filters))
    try:
        breakdown = broad_categorization(shard, query)
    except QueryError as exc:
        _fail(str(exc))
    payload = categories_payload(breakdown)
    if as_json:
        click.echo(json.dumps(payload, sort_keys=True, ensure_ascii=False))
        return
    for row in payload["rows"]:
        click.echo(
            f"  {row['source_forum']:<16} {row['top_level_category']:<24} "
            f"threads={row['thread_count']:<5} posts={row['post_count']}"
        )


@main.command()
@click.option("--idx", "index_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--port", default=None, type=int)
@click.option("--host", default=None)
@click.option("--config", "config_path", default=None, type=click.Path(exists=True, dir_okay=False))
def serve(index_dir, port, host, config_path):
    """Serve the read-only JSON API over a built index."""
    import dataclasses

    import uvicorn

    from .api import create_app

    config = load_config(index_dir, config_file=config_path, port=port)
    if host is not None:
        config = dataclasses.replace(config, host=host)
    app = create_app(config)
    click.echo(f"serving {index_dir} on http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


@main.group("demo")
def demo_group():
    """Synthetic-corpus helpers."""


@demo_group.command("build")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=7, show_default=True)
def demo_build(out_dir, seed):
    """Generate the demo corpus, train the classifiers, distill and index."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    labeled_threads, labels = demo.make_labeled_corpus()
    train_rows, test_rows = demo.split_labels(labels)
    write_threads_jsonl(labeled_threads, out / "labeled.jsonl")
    demo.write_labels_csv(train_rows, out / "labels.train.csv")
    demo.write_labels_csv(test_rows, out / "labels.test.csv")

    specs = shipped_specs()
    models_dir = out / "models"
    models_dir.mkdir(exist_ok=True)
    models = demo.train_models(labeled_threads, train_rows, specs)
    for letter, tree in models.items():
        save_model(models_dir / f"{letter}.json", specs[letter], tree)

    threads = demo.make_demo_corpus(seed=seed)
    write_threads_jsonl(threads, out / "posts.jsonl")
    (out / "experts.txt").write_text(
        "# expert authors\n" + "\n".join(demo.EXPERT_AUTHORS) + "\n", encoding="utf-8"
    )

    from .data import shipped_lexicons

    lexicons = shipped_lexicons()
    records, thread_records = distill_corpus(threads, lexicons, specs, models)
    write_metabase(
        records,
        thread_records,
        out / "meta",
        threads=threads,
        corpus_name=f"demo-{seed}",
        build_time=parse_timestamp("2012-01-01T00:00:00+00:00"),
    )
    shard = build_index(out / "meta")
    save_index(shard, out / "idx")
    click.echo(f"demo pipeline complete: {shard.doc_count} posts indexed under {out}")
    click.echo("try: ship analytics frequent --idx "
               f"{out / 'idx'} --anchor chemo_drug=tarceva --field side_effect --k 3")


if __name__ == "__main__":
    sys.exit(main())
