"""Expression feature specs and post featurization.

A feature spec file is one `expression: X` directive followed by TSV rows
`feature_id<TAB>kind<TAB>definition`:

    expression: S
    well_wish_good_luck	phrase	good luck
    exclaim_count	count	!
    has_emoji_heart	regex	<3|❤

Kinds: `phrase` is case-insensitive token-boundary presence of the literal
phrase (0/1), `regex` is case-insensitive presence of the pattern (0/1),
`count` is the number of non-overlapping case-insensitive matches.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .textutil import contains_phrase

EXPRESSIONS = ("P", "A", "I", "S", "O")
FEATURE_KINDS = ("phrase", "regex", "count")


class FeatureSpecError(Exception):
    pass


@dataclass(frozen=True)
class Feature:
    feature_id: str
    kind: str
    definition: str


@dataclass(frozen=True)
class FeatureSpec:
    expression: str
    features: tuple[Feature, ...]

    def feature_ids(self) -> tuple[str, ...]:
        return tuple(f.feature_id for f in self.features)


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[int, ...]
    label: str | None = None


@lru_cache(maxsize=1024)
def _compiled(definition: str) -> re.Pattern:
    return re.compile(definition, re.IGNORECASE)


def make_spec(expression: str, features: list[Feature]) -> FeatureSpec:
    if expression not in EXPRESSIONS:
        raise FeatureSpecError(f"unknown expression {expression!r}, want one of {EXPRESSIONS}")
    seen = set()
    for feat in features:
        if feat.kind not in FEATURE_KINDS:
            raise FeatureSpecError(f"feature {feat.feature_id!r}: unknown kind {feat.kind!r}")
        if feat.feature_id in seen:
            raise FeatureSpecError(f"duplicate feature_id {feat.feature_id!r}")
        if not feat.definition:
            raise FeatureSpecError(f"feature {feat.feature_id!r}: empty definition")
        seen.add(feat.feature_id)
    if not features:
        raise FeatureSpecError("spec has no features")
    return FeatureSpec(expression=expression, features=tuple(features))


def load_feature_spec(path: str | Path) -> FeatureSpec:
    path = Path(path)
    expression = None
    features: list[Feature] = []
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if expression is None:
            if not line.startswith("expression:"):
                raise FeatureSpecError(f"{path}:{line_no}: first line must be 'expression: X'")
            expression = line.split(":", 1)[1].strip()
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise FeatureSpecError(f"{path}:{line_no}: expected 'feature_id<TAB>kind<TAB>definition'")
        features.append(Feature(parts[0].strip(), parts[1].strip(), parts[2].strip()))
    if expression is None:
        raise FeatureSpecError(f"{path}: missing 'expression:' directive")
    try:
        return make_spec(expression, features)
    except FeatureSpecError as exc:
        raise FeatureSpecError(f"{path}: {exc}") from exc


def featurize(body: str, spec: FeatureSpec) -> FeatureVector:
    """Pure featurization of a post body against an expression spec."""
    values = []
    for feat in spec.features:
        if feat.kind == "phrase":
            values.append(1 if contains_phrase(body, feat.definition.lower()) else 0)
        elif feat.kind == "regex":
            values.append(1 if _compiled(feat.definition).search(body) else 0)
        else:
            values.append(len(_compiled(feat.definition).findall(body)))
    return FeatureVector(values=tuple(values))
