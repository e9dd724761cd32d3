"""Gazetteer entity extraction and regex pattern facts.

Matching is case-insensitive, token-boundary constrained, and resolved
leftmost-first then longest-first within each entity type, so "joint pain"
always beats "pain" and "rash" never fires inside "crash".

Pattern rules (first in-range match per field wins, scanning left to right):

    age     "I am 45", "I'm 45", "age 45", "45 yo", "45 y/o", "45 years old";
            accepted range 1..119, out-of-range matches skipped silently
    gender  "I am (a) woman|man|female|male", also with "I'm"
    stage   "stage 0|1|2|3|4|i|ii|iii|iv", normalized to 0/I/II/III/IV
    date    "diagnosed [in|on] <date>" with <date> one of MM/DD/YYYY,
            "Mon YYYY" (month name or abbreviation) or YYYY; stored as an
            ISO date, missing parts defaulting to the first day/month
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date
from pathlib import Path

from .textutil import find_spans

ENTITY_TYPES = (
    "condition",
    "cancer_condition",
    "treatment",
    "general_drug",
    "chemo_drug",
    "pain_killer",
    "side_effect",
    "hospital",
    "location",
)


class LexiconError(Exception):
    pass


@dataclass(frozen=True)
class Lexicon:
    entity_type: str
    entries: dict[str, str]  # lowercased surface form -> canonical value


@dataclass(frozen=True)
class EntityMention:
    entity_type: str
    canonical: str
    surface: str
    start: int
    end: int


@dataclass(frozen=True)
class PatternFacts:
    age: int | None = None
    gender: str | None = None
    cancer_stage: str | None = None
    date_diagnosed: str | None = None


def _normalize_surface(text: str) -> str:
    return " ".join(text.split()).lower()


def load_lexicon(path: str | Path, entity_type: str) -> Lexicon:
    """Load a `surface<TAB>canonical` TSV, '#' comments allowed.

    Surfaces and canonicals are lowercased and whitespace-collapsed; exact
    duplicates are deduplicated, conflicting duplicates are an error naming
    both lines.
    """
    if entity_type not in ENTITY_TYPES:
        raise LexiconError(f"unknown entity type: {entity_type!r}")
    path = Path(path)
    entries: dict[str, str] = {}
    first_line: dict[str, int] = {}
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LexiconError(f"{path}:{line_no}: expected 'surface<TAB>canonical'")
        surface = _normalize_surface(parts[0])
        canonical = _normalize_surface(parts[1])
        if not surface or not canonical:
            raise LexiconError(f"{path}:{line_no}: empty surface or canonical value")
        if surface in entries:
            if entries[surface] != canonical:
                raise LexiconError(
                    f"{path}: surface {surface!r} maps to {entries[surface]!r} "
                    f"(line {first_line[surface]}) and {canonical!r} (line {line_no})"
                )
            continue
        entries[surface] = canonical
        first_line[surface] = line_no
    if not entries:
        raise LexiconError(f"{path}: lexicon is empty")
    return Lexicon(entity_type=entity_type, entries=entries)


def resolve_candidates(candidates: list[tuple[int, int, str]]) -> list[tuple[int, int, str]]:
    """Greedy non-overlap resolution: leftmost start first, longest span on ties."""
    chosen: list[tuple[int, int, str]] = []
    last_end = -1
    for start, end, canonical in sorted(candidates, key=lambda c: (c[0], -(c[1] - c[0]))):
        if start >= last_end:
            chosen.append((start, end, canonical))
            last_end = end
    return chosen


def extract_entities(body: str, lexicons: list[Lexicon]) -> list[EntityMention]:
    """All gazetteer mentions, non-overlapping within each entity type."""
    if not body:
        return []
    low = body.lower()
    mentions: list[EntityMention] = []
    for lexicon in lexicons:
        candidates = []
        for surface, canonical in lexicon.entries.items():
            for start, end in find_spans(low, surface):
                candidates.append((start, end, canonical))
        for start, end, canonical in resolve_candidates(candidates):
            mentions.append(
                EntityMention(
                    entity_type=lexicon.entity_type,
                    canonical=canonical,
                    surface=body[start:end],
                    start=start,
                    end=end,
                )
            )
    mentions.sort(key=lambda m: (m.start, m.end, m.entity_type))
    return mentions


_STAGE_CANONICAL = {
    "0": "0",
    "1": "I",
    "2": "II",
    "3": "III",
    "4": "IV",
    "i": "I",
    "ii": "II",
    "iii": "III",
    "iv": "IV",
}

_AGE_RES = (
    re.compile(r"\b(?:i am|i'm|age)\s+(\d{1,3})\b", re.IGNORECASE),
    re.compile(r"\b(\d{1,3})\s*(?:yo|y/o|years old)\b", re.IGNORECASE),
)
_GENDER_RE = re.compile(r"\b(?:i am|i'm)\s+(?:a\s+)?(woman|man|female|male)\b", re.IGNORECASE)
_GENDER_CANONICAL = {"woman": "female", "female": "female", "man": "male", "male": "male"}
_STAGE_RE = re.compile(r"\bstage\s+(0|1|2|3|4|iv|i{1,3})\b", re.IGNORECASE)

_MONTHS = {
    name: i % 12 + 1
    for i, name in enumerate(
        "january february march april may june july august september october november december".split()
    )
}
_MONTHS.update({name[:3]: num for name, num in list(_MONTHS.items())})
_DATE_RE = re.compile(
    r"\bdiagnosed\s+(?:in\s+|on\s+)?"
    r"(?:(?P<month>\d{1,2})/(?P<day>\d{1,2})/(?P<dyear>\d{4})"
    r"|(?P<mon>[a-z]{3,9})\.?\s+(?P<myear>\d{4})"
    r"|(?P<year>\d{4}))\b",
    re.IGNORECASE,
)


def normalize_stage(token: str) -> str:
    """Canonical Roman form; idempotent over {0..4, i..iv} in any case."""
    return _STAGE_CANONICAL[token.strip().lower()]


def _first_age(body: str) -> int | None:
    hits = []
    for pattern in _AGE_RES:
        for m in pattern.finditer(body):
            hits.append((m.start(), int(m.group(1))))
    for _, value in sorted(hits):
        if 1 <= value <= 119:
            return value
    return None


def _first_date(body: str) -> str | None:
    for m in _DATE_RE.finditer(body):
        try:
            if m.group("dyear"):
                parsed = date(int(m.group("dyear")), int(m.group("month")), int(m.group("day")))
            elif m.group("myear"):
                month = _MONTHS.get(m.group("mon").lower())
                if month is None:
                    continue
                parsed = date(int(m.group("myear")), month, 1)
            else:
                parsed = date(int(m.group("year")), 1, 1)
        except ValueError:
            continue
        if 1900 <= parsed.year <= 2099:
            return parsed.isoformat()
    return None


def extract_pattern_facts(body: str) -> PatternFacts:
    gender = None
    m = _GENDER_RE.search(body)
    if m:
        gender = _GENDER_CANONICAL[m.group(1).lower()]
    stage = None
    m = _STAGE_RE.search(body)
    if m:
        stage = normalize_stage(m.group(1))
    return PatternFacts(
        age=_first_age(body),
        gender=gender,
        cancer_stage=stage,
        date_diagnosed=_first_date(body),
    )
