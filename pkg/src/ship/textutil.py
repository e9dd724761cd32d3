"""Shared text primitives: tokenization and token-boundary substring search.

A token boundary is a transition between alphanumeric and non-alphanumeric
characters (underscore counts as non-alphanumeric). Gazetteer matching,
phrase features and index tokenization all share these definitions so that
"rash" never matches inside "crash" anywhere in the pipeline.
"""

from __future__ import annotations

import re

# Runs of unicode alphanumerics; \w minus underscore.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# Index tokens shorter than this are dropped.
MIN_TOKEN_LEN = 2


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than 2 chars."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= MIN_TOKEN_LEN]


def is_boundary(text: str, start: int, end: int) -> bool:
    """True if text[start:end] sits on token boundaries on both sides."""
    left_ok = start == 0 or not (text[start - 1].isalnum() and text[start].isalnum())
    right_ok = end == len(text) or not (text[end - 1].isalnum() and text[end].isalnum())
    return left_ok and right_ok


def find_spans(text_lower: str, needle_lower: str) -> list[tuple[int, int]]:
    """All token-boundary occurrences of needle in text, both lowercased by caller."""
    if not needle_lower:
        return []
    spans = []
    pos = 0
    while True:
        i = text_lower.find(needle_lower, pos)
        if i < 0:
            break
        j = i + len(needle_lower)
        if is_boundary(text_lower, i, j):
            spans.append((i, j))
        pos = i + 1
    return spans


def contains_phrase(body: str, phrase_lower: str) -> bool:
    """Case-insensitive token-boundary presence of a literal phrase."""
    return bool(find_spans(body.lower(), phrase_lower))
