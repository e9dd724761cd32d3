"""C4.5-style decision tree induction over expression feature vectors.

Induction follows the classic recipe: candidate splits are presence tests on
binary features and midpoint thresholds on count features; the chosen split
maximizes gain ratio among candidates whose information gain is at least the
mean gain of all candidates; leaves take the majority class with ties going
to N; an optional post-pass applies pessimistic-error pruning with the usual
confidence-factor upper bound on the binomial error rate.

Determinism contract: candidate splits are enumerated in (feature order,
threshold) order and a later candidate replaces the incumbent only when its
gain ratio is strictly larger, so split ties break to the lowest feature_id
and the lowest threshold. Together with the N tie-break at leaves this makes
training invariant to permutations of the training set.

One deliberate extension: when every candidate split has zero gain but the
node is still impure (mutually dependent features, e.g. XOR-shaped data),
induction falls back to the first feature that partitions the node instead
of emitting an impure leaf. This keeps the guarantee that an unpruned tree
with min_leaf=1 reproduces any consistent training set exactly; pruning will
collapse such subtrees when they do not pay for themselves.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from .features import Feature, FeatureSpec, FeatureVector, make_spec

GAIN_EPS = 1e-12

CLASSES = ("Y", "N")


class TreeError(Exception):
    pass


def entropy(n_y: int, n_n: int) -> float:
    """Class entropy in bits of a (Y, N) count pair."""
    total = n_y + n_n
    if total <= 0:
        raise ValueError("entropy of an empty class distribution")
    result = 0.0
    for count in (n_y, n_n):
        if count > 0:
            p = count / total
            result -= p * math.log2(p)
    return result


@dataclass(frozen=True)
class Split:
    feature_index: int
    feature_id: str
    kind: str  # "binary" or "count"
    threshold: float  # 0.5 for binary presence tests
    gain: float
    gain_ratio: float
    split_info: float


@dataclass(frozen=True)
class Leaf:
    label: str
    counts: tuple[int, int]  # (n_y, n_n) of training instances reaching the leaf


@dataclass(frozen=True)
class Node:
    feature_index: int
    feature_id: str
    kind: str
    threshold: float
    low: Union["Node", Leaf]   # value <= threshold
    high: Union["Node", Leaf]  # value > threshold


@dataclass(frozen=True)
class TrainParams:
    min_leaf: int = 2
    cf: float | None = 0.25  # None disables pruning


@dataclass(frozen=True)
class DecisionTree:
    root: Union[Node, Leaf]
    feature_ids: tuple[str, ...]
    params: TrainParams = field(default_factory=TrainParams)

    def node_count(self) -> int:
        def walk(node) -> int:
            if isinstance(node, Leaf):
                return 1
            return 1 + walk(node.low) + walk(node.high)

        return walk(self.root)


def _class_counts(data: list[FeatureVector]) -> tuple[int, int]:
    n_y = 0
    n_n = 0
    for vec in data:
        if vec.label == "Y":
            n_y += 1
        elif vec.label == "N":
            n_n += 1
        else:
            raise TreeError(f"unlabeled or mislabeled instance: {vec.label!r}")
    return n_y, n_n


def _majority(counts: tuple[int, int]) -> str:
    n_y, n_n = counts
    return "Y" if n_y > n_n else "N"  # ties go to N


def _candidate_thresholds(feature: Feature, values: list[int]) -> list[float]:
    if feature.kind in ("phrase", "regex"):
        return [0.5] if len(set(values)) > 1 else []
    distinct = sorted(set(values))
    return [(a + b) / 2 for a, b in zip(distinct, distinct[1:])]


def _split_counts(
    data: list[FeatureVector], index: int, threshold: float
) -> tuple[tuple[int, int], tuple[int, int]]:
    low_y = low_n = high_y = high_n = 0
    for vec in data:
        if vec.values[index] <= threshold:
            if vec.label == "Y":
                low_y += 1
            else:
                low_n += 1
        else:
            if vec.label == "Y":
                high_y += 1
            else:
                high_n += 1
    return (low_y, low_n), (high_y, high_n)


def iter_candidate_splits(
    data: list[FeatureVector], spec: FeatureSpec, min_leaf: int
) -> list[Split]:
    """All splits with positive gain and both children >= min_leaf instances."""
    counts = _class_counts(data)
    total = len(data)
    parent_entropy = entropy(*counts)
    candidates: list[Split] = []
    for index, feature in enumerate(spec.features):
        values = [vec.values[index] for vec in data]
        for threshold in _candidate_thresholds(feature, values):
            low, high = _split_counts(data, index, threshold)
            n_low = sum(low)
            n_high = sum(high)
            if n_low < min_leaf or n_high < min_leaf:
                continue
            children_entropy = (n_low / total) * entropy(*low) + (n_high / total) * entropy(*high)
            gain = parent_entropy - children_entropy
            if gain <= GAIN_EPS:
                continue
            w_low = n_low / total
            w_high = n_high / total
            split_info = -(w_low * math.log2(w_low) + w_high * math.log2(w_high))
            candidates.append(
                Split(
                    feature_index=index,
                    feature_id=feature.feature_id,
                    kind="binary" if feature.kind in ("phrase", "regex") else "count",
                    threshold=threshold,
                    gain=gain,
                    gain_ratio=gain / split_info,
                    split_info=split_info,
                )
            )
    return candidates


def best_split(data: list[FeatureVector], spec: FeatureSpec, min_leaf: int = 2) -> Split | None:
    """Best gain-ratio split among candidates with gain >= mean candidate gain."""
    if not data:
        raise TreeError("best_split on empty data")
    candidates = iter_candidate_splits(data, spec, min_leaf)
    if not candidates:
        return None
    mean_gain = sum(c.gain for c in candidates) / len(candidates)
    best = None
    for cand in candidates:  # canonical order: feature index, then threshold
        if cand.gain + GAIN_EPS < mean_gain:
            continue
        if best is None or cand.gain_ratio > best.gain_ratio:
            best = cand
    return best


def _fallback_split(
    data: list[FeatureVector], spec: FeatureSpec, min_leaf: int
) -> tuple[int, str, str, float] | None:
    """First feature/threshold that partitions the node; used when no split has gain."""
    for index, feature in enumerate(spec.features):
        values = [vec.values[index] for vec in data]
        for threshold in _candidate_thresholds(feature, values):
            low, high = _split_counts(data, index, threshold)
            if sum(low) >= min_leaf and sum(high) >= min_leaf:
                kind = "binary" if feature.kind in ("phrase", "regex") else "count"
                return index, feature.feature_id, kind, threshold
    return None


def _grow(data: list[FeatureVector], spec: FeatureSpec, min_leaf: int) -> Union[Node, Leaf]:
    counts = _class_counts(data)
    if counts[0] == 0 or counts[1] == 0:
        return Leaf(label=_majority(counts), counts=counts)

    chosen = best_split(data, spec, min_leaf)
    if chosen is not None:
        index, feature_id, kind, threshold = (
            chosen.feature_index,
            chosen.feature_id,
            chosen.kind,
            chosen.threshold,
        )
    else:
        fallback = _fallback_split(data, spec, min_leaf)
        if fallback is None:
            return Leaf(label=_majority(counts), counts=counts)
        index, feature_id, kind, threshold = fallback

    low_data = [vec for vec in data if vec.values[index] <= threshold]
    high_data = [vec for vec in data if vec.values[index] > threshold]
    return Node(
        feature_index=index,
        feature_id=feature_id,
        kind=kind,
        threshold=threshold,
        low=_grow(low_data, spec, min_leaf),
        high=_grow(high_data, spec, min_leaf),
    )


# Confidence-factor table for the pessimistic error estimate (normal deviate
# squared, interpolated at the requested CF), as used by classic C4.5.
_CF_VALUES = (0.0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00)
_CF_DEVIATIONS = (4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00)


def _z_squared(cf: float) -> float:
    i = 0
    while cf > _CF_VALUES[i]:
        i += 1
    lo_v, hi_v = _CF_VALUES[i - 1], _CF_VALUES[i]
    lo_d, hi_d = _CF_DEVIATIONS[i - 1], _CF_DEVIATIONS[i]
    z = lo_d + (hi_d - lo_d) * (cf - lo_v) / (hi_v - lo_v)
    return z * z


def added_errors(total: float, errors: float, cf: float) -> float:
    """Extra errors charged to a leaf by the CF upper bound on its error rate."""
    if total == 0:
        return 0.0
    if errors < 1e-6:
        return total * (1 - math.exp(math.log(cf) / total))
    if errors < 0.9999:
        base = total * (1 - math.exp(math.log(cf) / total))
        return base + errors * (added_errors(total, 1.0, cf) - base)
    if errors + 0.5 >= total:
        return 0.67 * (total - errors)
    z2 = _z_squared(cf)
    rate = (
        errors
        + 0.5
        + z2 / 2
        + math.sqrt(z2 * ((errors + 0.5) * (1 - (errors + 0.5) / total) + z2 / 4))
    ) / (total + z2)
    return total * rate - errors


def _pessimistic_error(node: Union[Node, Leaf], cf: float) -> float:
    if isinstance(node, Leaf):
        total = sum(node.counts)
        errors = total - node.counts[0 if node.label == "Y" else 1]
        return errors + added_errors(total, errors, cf)
    return _pessimistic_error(node.low, cf) + _pessimistic_error(node.high, cf)


def _subtree_counts(node: Union[Node, Leaf]) -> tuple[int, int]:
    if isinstance(node, Leaf):
        return node.counts
    low = _subtree_counts(node.low)
    high = _subtree_counts(node.high)
    return (low[0] + high[0], low[1] + high[1])


def _prune(node: Union[Node, Leaf], cf: float) -> Union[Node, Leaf]:
    if isinstance(node, Leaf):
        return node
    pruned = Node(
        feature_index=node.feature_index,
        feature_id=node.feature_id,
        kind=node.kind,
        threshold=node.threshold,
        low=_prune(node.low, cf),
        high=_prune(node.high, cf),
    )
    counts = _subtree_counts(pruned)
    label = _majority(counts)
    total = sum(counts)
    leaf_errors = total - counts[0 if label == "Y" else 1]
    leaf_pessimistic = leaf_errors + added_errors(total, leaf_errors, cf)
    if _pessimistic_error(pruned, cf) >= leaf_pessimistic:
        return Leaf(label=label, counts=counts)
    return pruned


def train_c45(
    data: list[FeatureVector], spec: FeatureSpec, params: TrainParams = TrainParams()
) -> DecisionTree:
    """Induce a tree, then prune pessimistically unless params.cf is None."""
    if not data:
        raise TreeError("cannot train on empty data")
    for vec in data:
        if len(vec.values) != len(spec.features):
            raise TreeError(
                f"vector length {len(vec.values)} does not match spec ({len(spec.features)})"
            )
    root = _grow(list(data), spec, max(1, params.min_leaf))
    if params.cf is not None:
        root = _prune(root, params.cf)
    return DecisionTree(root=root, feature_ids=spec.feature_ids(), params=params)


def classify(tree: DecisionTree, vector: FeatureVector) -> str:
    if len(vector.values) != len(tree.feature_ids):
        raise TreeError(
            f"vector length {len(vector.values)} does not match tree ({len(tree.feature_ids)})"
        )
    node = tree.root
    while isinstance(node, Node):
        node = node.low if vector.values[node.feature_index] <= node.threshold else node.high
    return node.label


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    precision_defined: bool = True
    recall_defined: bool = True


def evaluate(tree: DecisionTree, test: list[FeatureVector]) -> EvalReport:
    """Confusion counts and metrics with Y as the positive class.

    Degenerate denominators report 0.0 with the matching *_defined flag
    cleared rather than raising.
    """
    if not test:
        raise TreeError("cannot evaluate on an empty test set")
    tp = fp = fn = tn = 0
    for vec in test:
        if vec.label not in CLASSES:
            raise TreeError(f"unlabeled test instance: {vec.label!r}")
        predicted = classify(tree, vec)
        if predicted == "Y" and vec.label == "Y":
            tp += 1
        elif predicted == "Y":
            fp += 1
        elif vec.label == "Y":
            fn += 1
        else:
            tn += 1
    precision_defined = (tp + fp) > 0
    recall_defined = (tp + fn) > 0
    precision = tp / (tp + fp) if precision_defined else 0.0
    recall = tp / (tp + fn) if recall_defined else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvalReport(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        f1=f1,
        precision_defined=precision_defined,
        recall_defined=recall_defined,
    )


def _node_to_dict(node: Union[Node, Leaf]) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.label, "counts": {"Y": node.counts[0], "N": node.counts[1]}}
    return {
        "feature_index": node.feature_index,
        "feature_id": node.feature_id,
        "kind": node.kind,
        "threshold": node.threshold,
        "low": _node_to_dict(node.low),
        "high": _node_to_dict(node.high),
    }


def _node_from_dict(obj: dict) -> Union[Node, Leaf]:
    if "leaf" in obj:
        return Leaf(label=obj["leaf"], counts=(obj["counts"]["Y"], obj["counts"]["N"]))
    return Node(
        feature_index=obj["feature_index"],
        feature_id=obj["feature_id"],
        kind=obj["kind"],
        threshold=obj["threshold"],
        low=_node_from_dict(obj["low"]),
        high=_node_from_dict(obj["high"]),
    )


def save_model(path: str | Path, spec: FeatureSpec, tree: DecisionTree) -> None:
    """Persist a trained classifier together with its feature spec."""
    payload = {
        "format_version": 1,
        "expression": spec.expression,
        "params": {"min_leaf": tree.params.min_leaf, "cf": tree.params.cf},
        "features": [
            {"feature_id": f.feature_id, "kind": f.kind, "definition": f.definition}
            for f in spec.features
        ],
        "tree": _node_to_dict(tree.root),
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def load_model(path: str | Path) -> tuple[FeatureSpec, DecisionTree]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != 1:
        raise TreeError(f"{path}: unsupported model format")
    spec = make_spec(
        payload["expression"],
        [Feature(f["feature_id"], f["kind"], f["definition"]) for f in payload["features"]],
    )
    params = TrainParams(min_leaf=payload["params"]["min_leaf"], cf=payload["params"]["cf"])
    tree = DecisionTree(
        root=_node_from_dict(payload["tree"]),
        feature_ids=spec.feature_ids(),
        params=params,
    )
    return spec, tree
