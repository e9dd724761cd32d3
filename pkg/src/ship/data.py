"""Shipped stand-in lexicons and expression feature specs.

The lexicon files replace licensed medical ontologies; they cover the
vocabulary used by the synthetic corpora and are swappable by pointing the
CLI at another directory in the same TSV format.
"""

from __future__ import annotations

from pathlib import Path

from .entities import ENTITY_TYPES, Lexicon, load_lexicon
from .features import EXPRESSIONS, FeatureSpec, load_feature_spec

DATA_DIR = Path(__file__).parent / "data"
LEXICON_DIR = DATA_DIR / "lexicons"
SPEC_DIR = DATA_DIR / "specs"

# Only these entity types are gazetteer-backed; the other four Table-style
# fields (age, gender, cancer_stage, date_diagnosed) come from pattern rules.
LEXICON_TYPES = tuple(t for t in ENTITY_TYPES)


def load_lexicon_dir(directory: str | Path) -> list[Lexicon]:
    """Load every `<entity_type>.tsv` in a directory."""
    directory = Path(directory)
    lexicons = []
    for entity_type in LEXICON_TYPES:
        path = directory / f"{entity_type}.tsv"
        if path.exists():
            lexicons.append(load_lexicon(path, entity_type))
    if not lexicons:
        raise FileNotFoundError(f"{directory}: no <entity_type>.tsv lexicon files found")
    return lexicons


def shipped_lexicons() -> list[Lexicon]:
    return load_lexicon_dir(LEXICON_DIR)


def shipped_specs() -> dict[str, FeatureSpec]:
    return {letter: load_feature_spec(SPEC_DIR / f"{letter}.tsv") for letter in EXPRESSIONS}
