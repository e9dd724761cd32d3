#!/usr/bin/env python3
"""Regenerate tests/fixtures/entity_gold.jsonl, the hand-labeled desk-scale
entity fixture.

Sentences are built by slotting gazetteer surfaces into templates, so the
gold spans are known arithmetically. The file also carries two kinds of
deliberately hard rows:

  * variant rows: the gold mention uses a surface form the shipped lexicons
    do not contain (plurals, inflections), so a correct matcher misses it;
  * trap rows: no gold mention at all; the text contains near-miss words
    ("crash", "painter", "Spain") that must not fire.

After composing each clean row the script cross-checks that the extractor
finds exactly the slotted mentions; a failure means the filler vocabulary
collided with a lexicon and the template must be fixed, not the test.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from ship.data import shipped_lexicons
from ship.entities import extract_entities

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "entity_gold.jsonl"

SINGLE_TEMPLATES = {
    "side_effect": (
        "After the second cycle the {X} was impossible to ignore.",
        "Week three brought {X} that lasted for days.",
        "Nothing prepared the family for the {X}.",
        "Everyone warned about {X} but it stayed mild.",
        "{X} showed up around day ten.",
        "The chart flagged {X} twice last month.",
        "Managing the {X} became the whole routine.",
    ),
    "chemo_drug": (
        "They switched the schedule to {X} after the review.",
        "{X} arrived from the specialty pharmacy on Monday.",
        "The plan now pairs {X} with rest weeks.",
        "The second opinion favored {X} over the old regimen.",
    ),
    "general_drug": (
        "The nurse added {X} to the evening list.",
        "A standing order covers {X} before each visit.",
    ),
    "pain_killer": (
        "The discharge notes allowed {X} twice daily.",
        "Nights went easier once {X} entered the picture.",
    ),
    "treatment": (
        "The board suggested {X} before anything else.",
        "Scheduling {X} took three phone calls.",
    ),
    "condition": (
        "The file also listed {X} from years back.",
        "An aunt managed {X} for a decade.",
    ),
    "cancer_condition": (
        "The diagnosis came back as {X} in the end.",
        "Support groups for {X} meet on Thursdays.",
    ),
    "hospital": (
        "The records were transferred to {X} last week.",
        "A friend recommended {X} for the consult.",
    ),
    "location": (
        "Her cousin flew in from {X} to help.",
        "The trial site nearest to {X} had a waitlist.",
    ),
}

PAIR_TEMPLATE = "The combination of {A} and {B} kept everyone guessing."

# (text fragment using a variant surface, entity_type, canonical)
VARIANT_ROWS = (
    ("The rashes spread along both arms overnight.", 4, 10, "side_effect", "rash"),
    ("He felt feverish within an hour of the first dose.", 8, 16, "side_effect", "fever"),
    ("She vomited twice before the clinic opened.", 4, 11, "side_effect", "vomiting"),
    ("The swollen hands made buttons impossible.", 4, 17, "side_effect", "swelling"),
    ("He coughed through most of the appointment.", 3, 10, "side_effect", "cough"),
    ("Each flight left her dizzier than the last.", 21, 28, "side_effect", "dizziness"),
    ("The commute alone was exhausting that autumn.", 22, 32, "side_effect", "fatigue"),
    ("One nosebleed was enough to call the line.", 4, 13, "side_effect", "nosebleeds"),
)

TRAP_SENTENCES = (
    "The crash on the highway delayed everything.",
    "Mr. Coughlin signed the consent forms.",
    "The painter finished the hallway by noon.",
    "Spain made the shortlist for the conference.",
    "The couch needed replacing before winter.",
    "A brash decision cost them the account.",
    "The itch to travel returned in spring.",
    "The ratios looked fine on paper.",
    "The marathon training resumed on Monday.",
    "Stage directions confused the new actors.",
)


def slot(template: str, fills: dict[str, tuple[str, str, str]]):
    """Fill {A}/{B}/{X} slots; returns (text, mentions) with computed spans."""
    text = ""
    mentions = []
    rest = template
    while True:
        starts = {k: rest.find("{%s}" % k) for k in fills if rest.find("{%s}" % k) >= 0}
        if not starts:
            text += rest
            break
        key = min(starts, key=starts.get)
        i = starts[key]
        surface, entity_type, canonical = fills[key]
        text += rest[:i]
        mentions.append(
            {
                "entity_type": entity_type,
                "canonical": canonical,
                "start": len(text),
                "end": len(text) + len(surface),
            }
        )
        text += surface
        rest = rest[i + len(key) + 2 :]
    return text, mentions


def main() -> None:
    rng = random.Random(2024)
    lexicons = {lex.entity_type: lex for lex in shipped_lexicons()}
    surfaces = {
        etype: sorted(lex.entries.items()) for etype, lex in lexicons.items()
    }

    rows = []
    lex_list = list(lexicons.values())

    def clean_row(template: str, fills: dict) -> dict | None:
        """Slot and accept only if the extractor sees exactly the slots;
        collisions (a slotted surface containing another lexicon's surface,
        or filler overlapping a gazetteer) force a re-pick."""
        text, mentions = slot(template, fills)
        found = {
            (m.entity_type, m.start, m.end, m.canonical)
            for m in extract_entities(text, lex_list)
        }
        expected = {
            (m["entity_type"], m["start"], m["end"], m["canonical"]) for m in mentions
        }
        if found != expected:
            return None
        return {"text": text, "mentions": mentions}

    # ~150 single-mention rows, cycling types with side effects weighted
    plan = (
        ["side_effect"] * 60
        + ["chemo_drug"] * 24
        + ["general_drug"] * 10
        + ["pain_killer"] * 10
        + ["treatment"] * 12
        + ["condition"] * 10
        + ["cancer_condition"] * 10
        + ["hospital"] * 7
        + ["location"] * 9
    )
    for n, etype in enumerate(plan):
        template = SINGLE_TEMPLATES[etype][n % len(SINGLE_TEMPLATES[etype])]
        for _ in range(40):
            surface, canonical = rng.choice(surfaces[etype])
            row = clean_row(template, {"X": (surface, etype, canonical)})
            if row is not None:
                rows.append(row)
                break
        else:
            raise SystemExit(f"could not fill template {template!r} for {etype}")

    # ~30 two-mention rows mixing types
    types = list(SINGLE_TEMPLATES)
    for n in range(36):
        ta = types[n % len(types)]
        tb = types[(n * 5 + 3) % len(types)]
        if ta == tb:
            continue
        for _ in range(40):
            sa, ca = rng.choice(surfaces[ta])
            sb, cb = rng.choice(surfaces[tb])
            row = clean_row(PAIR_TEMPLATE, {"A": (sa, ta, ca), "B": (sb, tb, cb)})
            if row is not None:
                rows.append(row)
                break
        else:
            raise SystemExit(f"could not fill pair template for {ta}/{tb}")

    for text, start, end, etype, canonical in VARIANT_ROWS:
        assert text[start:end], text
        rows.append(
            {
                "text": text,
                "mentions": [
                    {"entity_type": etype, "canonical": canonical, "start": start, "end": end}
                ],
            }
        )
    for text in TRAP_SENTENCES:
        rows.append({"text": text, "mentions": []})

    rng.shuffle(rows)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
    total = sum(len(r["mentions"]) for r in rows)
    print(f"wrote {len(rows)} sentences, {total} gold mentions -> {OUT}")


if __name__ == "__main__":
    main()
