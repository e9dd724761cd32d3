"""Brute-force oracles kept independent of the implementations they check."""

from __future__ import annotations

import math
import random

from ship.features import Feature, FeatureSpec, FeatureVector
from ship.metabase import ENTITY_FIELDS, EXPRESSION_FIELDS


# --- entity extraction oracle ------------------------------------------------

def _alnum(ch: str) -> bool:
    return ch.isalnum()


def oracle_mentions(body: str, lexicon) -> list[tuple[int, int, str]]:
    """Try every lexicon entry at every position, then greedy resolution
    (leftmost start, longest span on ties)."""
    low = body.lower()
    n = len(low)
    candidates = []
    for surface, canonical in lexicon.entries.items():
        span = len(surface)
        for start in range(0, n - span + 1):
            if not low.startswith(surface, start):
                continue
            end = start + span
            left_ok = start == 0 or not (_alnum(low[start - 1]) and _alnum(low[start]))
            right_ok = end == n or not (_alnum(low[end - 1]) and _alnum(low[end]))
            if left_ok and right_ok:
                candidates.append((start, end, canonical))
    candidates.sort(key=lambda c: (c[0], -(c[1] - c[0])))
    chosen = []
    last_end = -1
    for start, end, canonical in candidates:
        if start >= last_end:
            chosen.append((start, end, canonical))
            last_end = end
    return chosen


# --- C4.5 split oracle ---------------------------------------------------------

def oracle_entropy(n_y: int, n_n: int) -> float:
    total = n_y + n_n
    h = 0.0
    for c in (n_y, n_n):
        if c:
            h -= (c / total) * math.log2(c / total)
    return h


def oracle_candidates(data: list[FeatureVector], spec: FeatureSpec, min_leaf: int):
    """Every (feature, threshold) split with positive gain and large-enough
    children, as (index, threshold, gain, gain_ratio) tuples."""
    n = len(data)
    n_y = sum(1 for v in data if v.label == "Y")
    parent = oracle_entropy(n_y, n - n_y)
    out = []
    for i, feature in enumerate(spec.features):
        values = sorted({v.values[i] for v in data})
        if feature.kind in ("phrase", "regex"):
            thresholds = [0.5] if len(values) > 1 else []
        else:
            thresholds = [(a + b) / 2 for a, b in zip(values, values[1:])]
        for t in thresholds:
            low = [v for v in data if v.values[i] <= t]
            high = [v for v in data if v.values[i] > t]
            if len(low) < min_leaf or len(high) < min_leaf:
                continue
            low_y = sum(1 for v in low if v.label == "Y")
            high_y = sum(1 for v in high if v.label == "Y")
            children = (len(low) / n) * oracle_entropy(low_y, len(low) - low_y) + (
                len(high) / n
            ) * oracle_entropy(high_y, len(high) - high_y)
            gain = parent - children
            if gain <= 1e-12:
                continue
            wl, wh = len(low) / n, len(high) / n
            split_info = -(wl * math.log2(wl) + wh * math.log2(wh))
            out.append((i, t, gain, gain / split_info))
    return out


def oracle_best_split(data, spec, min_leaf):
    """Same selection convention, recomputed from scratch: max gain ratio among
    candidates with gain >= mean candidate gain; first (lowest feature,
    lowest threshold) wins ties."""
    cands = oracle_candidates(data, spec, min_leaf)
    if not cands:
        return None
    mean_gain = sum(c[2] for c in cands) / len(cands)
    best = None
    for cand in cands:
        if cand[2] + 1e-12 < mean_gain:
            continue
        if best is None or cand[3] > best[3]:
            best = cand
    return best


def random_dataset(rng: random.Random, max_rows=64, max_features=6, consistent=False):
    """Random labeled vectors over mixed binary/count features."""
    n_features = rng.randint(1, max_features)
    features = []
    for i in range(n_features):
        kind = rng.choice(("phrase", "count"))
        features.append(Feature(f"f{i}", kind, f"def{i}"))
    spec = FeatureSpec(expression="P", features=tuple(features))
    n_rows = rng.randint(2, max_rows)
    rows = []
    labels_by_vec: dict[tuple, str] = {}
    for _ in range(n_rows):
        values = tuple(
            rng.randint(0, 1) if f.kind == "phrase" else rng.randint(0, 4) for f in features
        )
        label = rng.choice(("Y", "N"))
        if consistent:
            label = labels_by_vec.setdefault(values, label)
        rows.append(FeatureVector(values=values, label=label))
    return spec, rows


# --- search oracle ------------------------------------------------------------

def scan_candidates(records_with_text, terms: list[str], filters) -> set[str]:
    """Linear scan: record ids whose tokenized body+title contain all terms
    and whose facets match all filters."""
    from ship.textutil import tokenize

    out = set()
    for record, title, body in records_with_text:
        tokens = set(tokenize(body)) | set(tokenize(title))
        if any(term not in tokens for term in terms):
            continue
        ok = True
        for fld, value in filters:
            if fld in EXPRESSION_FIELDS:
                if record.expressions[fld] != value:
                    ok = False
                    break
            elif fld in ENTITY_FIELDS:
                if value not in record.entities[fld]:
                    ok = False
                    break
            else:
                ok = False
                break
        if ok:
            out.add(record.post_id)
    return out
