from __future__ import annotations

import pytest

from ship.features import (
    Feature,
    FeatureSpecError,
    featurize,
    load_feature_spec,
    make_spec,
)


def spec_with(*features):
    return make_spec("S", list(features))


def test_support_phrase_from_featured_example():
    spec = spec_with(Feature("s_thoughts_and_prayers", "phrase", "thoughts and prayers"))
    vec = featurize("good luck, my thoughts and prayers are with you!", spec)
    assert vec.values == (1,)


def test_empty_body_is_all_zero(specs):
    for spec in specs.values():
        assert featurize("", spec).values == tuple(0 for _ in spec.features)


def test_url_count_feature():
    spec = spec_with(Feature("url_count", "count", r"https?://[^\s]+"))
    body = "see http://a.example.org and also https://b.example.net/page"
    assert featurize(body, spec).values == (2,)


def test_phrase_needs_token_boundaries():
    spec = spec_with(Feature("hug", "phrase", "hugs"))
    assert featurize("sending hugs tonight", spec).values == (1,)
    assert featurize("the thugs in that movie", spec).values == (0,)


def test_phrase_is_case_insensitive():
    spec = spec_with(Feature("gl", "phrase", "good luck"))
    assert featurize("GOOD LUCK!", spec).values == (1,)


def test_regex_presence_is_binary():
    spec = spec_with(Feature("exclaims", "regex", "!!+"))
    assert featurize("wow!!!", spec).values == (1,)
    assert featurize("wow!", spec).values == (0,)


def test_spec_file_round_trip(tmp_path):
    path = tmp_path / "spec.tsv"
    path.write_text(
        "# comment\nexpression: A\nf1\tphrase\tyou should\nf2\tcount\t!\n", encoding="utf-8"
    )
    spec = load_feature_spec(path)
    assert spec.expression == "A"
    assert spec.feature_ids() == ("f1", "f2")
    assert featurize("you should rest!", spec).values == (1, 1)


def test_spec_file_errors(tmp_path):
    path = tmp_path / "spec.tsv"
    path.write_text("f1\tphrase\tx\n", encoding="utf-8")
    with pytest.raises(FeatureSpecError, match="expression"):
        load_feature_spec(path)

    path.write_text("expression: A\nf1\tphrase\tx\nf1\tphrase\ty\n", encoding="utf-8")
    with pytest.raises(FeatureSpecError, match="duplicate feature_id"):
        load_feature_spec(path)

    path.write_text("expression: A\nf1\tsomething\tx\n", encoding="utf-8")
    with pytest.raises(FeatureSpecError, match="unknown kind"):
        load_feature_spec(path)

    path.write_text("expression: Q\nf1\tphrase\tx\n", encoding="utf-8")
    with pytest.raises(FeatureSpecError, match="unknown expression"):
        load_feature_spec(path)


def test_shipped_specs_cover_all_expressions(specs):
    assert set(specs) == {"P", "A", "I", "S", "O"}
    for letter, spec in specs.items():
        assert spec.expression == letter
        assert len(spec.features) >= 10
