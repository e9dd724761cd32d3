"""Deterministic synthetic corpora: labeled training data, the demo corpus
behind the walkthrough, and an entity-rich corpus for the meta-base audit.

Everything here is template-generated from a seeded RNG, so the shipped
corpora are reproducible byte for byte. The demo corpus is engineered so
that, among posts co-mentioning the chemo drug tarceva, side-effect counts
rank nausea first, joint pain second and cough third.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .corpus import Post, Thread
from .features import EXPRESSIONS, FeatureSpec, FeatureVector, featurize
from .tree import DecisionTree, TrainParams, train_c45

EXPERT_AUTHORS = ("dr_reyes", "nurse_coleman", "dr_okafor")

_AUTHORS = (
    "maplewalker",
    "quietharbor",
    "sunroomreader",
    "gardengale",
    "northshore52",
    "paperkite",
    "bluedoor",
    "winterwren",
    "oldcedar",
    "brightline",
) + EXPERT_AUTHORS

_BASE_TIME = datetime(2011, 1, 1, tzinfo=timezone.utc)

# Neutral filler: no expression-spec phrase, no first/second person tokens.
FILLER = (
    "The weather finally turned this week.",
    "The waiting room was crowded again on Tuesday.",
    "Parking near the clinic remains difficult.",
    "The new nurse remembered everyone by name.",
    "Paperwork took most of the morning.",
    "The cafeteria added a soup station downstairs.",
    "Traffic made the drive longer than usual.",
    "The garden kept the family busy most of the spring.",
    "The neighbors brought over dinner twice.",
    "The insurance letters keep piling up.",
    "The appointment moved to Thursday afternoon.",
    "The pharmacy called about the refill.",
)

# One pool of label-positive sentences per expression; each sentence
# contains at least one feature phrase from the matching spec file.
Y_SENTENCES = {
    "P": (
        "I was diagnosed last spring and it turned everything upside down.",
        "I took the pills every morning with toast.",
        "My doctor put me on a new schedule after the first scan.",
        "I started the infusions last month.",
        "I went through six rounds before the break.",
        "I experienced far fewer problems the second time.",
        "In my case the first week was the hardest.",
        "I have been on the medication for two months now.",
        "I've been on it since the summer.",
        "My oncologist wants another scan next week.",
        "My treatment schedule changed twice already.",
        "For me the mornings were the worst part.",
        "I am taking it with breakfast as instructed.",
        "I had a rough stretch around the holidays.",
    ),
    "A": (
        "You should ask your doctor before changing the dose.",
        "You might want to keep a symptom diary.",
        "I recommend taking it at night instead.",
        "I suggest bringing someone along to appointments.",
        "My advice is to drink plenty of water.",
        "Make sure the team knows about every supplement.",
        "Be sure to report any new symptom right away.",
        "Try to eat small meals through the day.",
        "Ask your oncologist about adjusting the schedule.",
        "Talk to your doctor about the latest numbers.",
        "Get a second opinion if anything feels off.",
        "Don't hesitate to call the nurse line.",
        "It helps to set reminders for every dose.",
    ),
    "I": (
        "Check out http://guides.example.org/start for an overview.",
        "There is a book called Waiting Rooms worth reading.",
        "More information is available at www.trials.example.net.",
        "According to a study from last year the response rates vary.",
        "I read that hydration makes a difference.",
        "Studies show the timing matters.",
        "The pubmed abstract explains the mechanism.",
        "This website has a searchable archive: http://archive.example.org.",
        "This site lists common interactions.",
        "This book helped the whole family understand the process.",
        "More info here: www.handbook.example.com.",
        "A study presented at the spring meeting covered this.",
    ),
    "S": (
        "Good luck, my thoughts and prayers are with you!",
        "Stay strong, you can do this!",
        "Hang in there, it does get easier.",
        "Best wishes for the scan tomorrow!",
        "Wishing you a smooth week ahead.",
        "Sending hugs your way!",
        "Praying for you and your family tonight.",
        "You are not alone in this.",
        "We are here for you whenever you need to vent.",
        "God bless you and your caregivers.",
        "Good luck with the new schedule!",
        "Our prayers are with you this week.",
    ),
    "O": (
        "After taking tarceva for two months the tumor shrank noticeably.",
        "The scan was clean this time.",
        "No evidence of disease since June.",
        "Officially in remission as of last week.",
        "Feeling much better since they adjusted the dose.",
        "It worked when nothing else did.",
        "The gemcitabine stopped working after a year.",
        "Things got worse before the switch.",
        "No improvement after three cycles of cisplatin.",
        "The side effects went away by week four.",
        "My numbers improved at the last draw.",
        "Tumor is shrinking on the latest scan.",
        "Markers dropped again this month.",
        "Xeloda worked for me with minimal issues.",
    ),
}


@dataclass(frozen=True)
class LabelRow:
    post_id: str
    expression: str
    label: str


def _make_thread(
    thread_id: str,
    source_forum: str,
    category: str,
    title: str,
    bodies: list[str],
    rng: random.Random,
    base_time: datetime,
    roster: frozenset[str] = frozenset(),
) -> Thread:
    posts = []
    for position, body in enumerate(bodies):
        author = rng.choice(_AUTHORS)
        posts.append(
            Post(
                post_id=f"{thread_id}:{position}",
                thread_id=thread_id,
                author=author,
                expert_authored=author in roster,
                body=body,
                posted_at=base_time + timedelta(minutes=17 * position),
                position=position,
            )
        )
    return Thread(
        thread_id=thread_id,
        source_forum=source_forum,
        top_level_category=category,
        url=f"http://{source_forum}.example.org/t/{thread_id.rsplit(':', 1)[-1]}",
        title=title,
        last_updated=max(p.posted_at for p in posts),
        num_responses=len(posts) - 1,
        posts=tuple(posts),
    )


def _labeled_body(rng: random.Random, expression: str, label: str, hard: bool) -> str:
    filler = rng.sample(FILLER, rng.randint(1, 2))
    if label == "Y" and not hard:
        strong = rng.sample(Y_SENTENCES[expression], rng.randint(1, 3))
        sentences = filler + strong
        rng.shuffle(sentences)
        return " ".join(sentences)
    if label == "N" and hard:
        # decoy: a genuine cue phrase inside a post annotated N
        sentences = filler + [rng.choice(Y_SENTENCES[expression])]
        rng.shuffle(sentences)
        return " ".join(sentences)
    return " ".join(filler + rng.sample(FILLER, 1))


def make_labeled_corpus(
    seed: int = 13, per_expression: int = 600
) -> tuple[list[Thread], list[LabelRow]]:
    """Template-generated labeled posts, one pool per expression.

    4% of Y posts carry no cue phrase and 2% of N posts carry a decoy cue,
    so trained classifiers land near but not at perfect accuracy.
    """
    rng = random.Random(seed)
    threads: list[Thread] = []
    labels: list[LabelRow] = []
    for expression in EXPRESSIONS:
        bodies = []
        for i in range(per_expression):
            label = "Y" if i % 2 == 0 else "N"
            # intervals chosen so both the 80/20 train and test slices see
            # a few cue-less Y posts and a few decoy N posts
            hard = (label == "Y" and i % 48 == 4) or (
                label == "N" and (i % 101 == 1 or i % 300 == 39)
            )
            bodies.append((_labeled_body(rng, expression, label, hard), label))
        # pack into threads of five posts
        for chunk_start in range(0, len(bodies), 5):
            chunk = bodies[chunk_start : chunk_start + 5]
            ordinal = chunk_start // 5
            thread_id = f"labeled:{expression}:{ordinal}"
            thread = _make_thread(
                thread_id,
                source_forum="training-pool",
                category=f"pool-{expression}",
                title=f"training thread {expression} {ordinal}",
                bodies=[body for body, _ in chunk],
                rng=rng,
                base_time=_BASE_TIME + timedelta(hours=ordinal),
            )
            threads.append(thread)
            for post, (_, label) in zip(thread.posts, chunk):
                labels.append(LabelRow(post_id=post.post_id, expression=expression, label=label))
    return threads, labels


def split_labels(labels: list[LabelRow]) -> tuple[list[LabelRow], list[LabelRow]]:
    """Deterministic 80/20 split, stratified by position in the pool."""
    train, test = [], []
    counters: dict[str, int] = {}
    for row in labels:
        n = counters.get(row.expression, 0)
        counters[row.expression] = n + 1
        (test if n % 5 == 4 else train).append(row)
    return train, test


def featurize_labels(
    threads: list[Thread], labels: list[LabelRow], spec: FeatureSpec, expression: str
) -> list[FeatureVector]:
    bodies = {post.post_id: post.body for thread in threads for post in thread.posts}
    vectors = []
    for row in labels:
        if row.expression != expression:
            continue
        vec = featurize(bodies[row.post_id], spec)
        vectors.append(FeatureVector(values=vec.values, label=row.label))
    return vectors


def train_models(
    threads: list[Thread],
    labels: list[LabelRow],
    specs: dict[str, FeatureSpec],
    params: TrainParams = TrainParams(),
) -> dict[str, DecisionTree]:
    return {
        letter: train_c45(featurize_labels(threads, labels, specs[letter], letter), specs[letter], params)
        for letter in EXPRESSIONS
    }


# ---------------------------------------------------------------------------
# Demo corpus: the drug/side-effect exploration walkthrough
# ---------------------------------------------------------------------------

# (canonical, surfaces to rotate through) with engineered tarceva co-mention
# counts; descending, so cough ranks third.
TARCEVA_SIDE_EFFECTS = (
    ("nausea", ("nausea", "nauseous"), 24),
    ("joint pain", ("joint pain", "achy joints"), 20),
    ("cough", ("cough", "coughing", "dry cough"), 16),
    ("fatigue", ("fatigue", "tiredness"), 10),
    ("rash", ("rash", "skin rash"), 7),
    ("headache", ("headache", "headaches"), 4),
)

_SE_TEMPLATES = (
    "I started tarceva last month and the {se} has been constant since.",
    "Three weeks into tarceva and the {se} is wearing everyone down.",
    "My husband is on tarceva and his {se} began in week two.",
    "The {se} hit hard after the switch to tarceva.",
    "Tarceva is doing its job but the {se} never lets up.",
)

_SE_ADVICE_TEMPLATES = (
    "You should ask your doctor about the {se} before the next tarceva refill.",
    "Make sure the team hears about the {se}; tarceva dosing can be adjusted.",
    "Try to log when the {se} peaks after each tarceva dose.",
)

_TARCEVA_PLAIN = (
    "You should take tarceva on an empty stomach; it made a difference here.",
    "Ask your oncologist about splitting the tarceva dose.",
    "Make sure the pharmacy checks every interaction with tarceva.",
    "Check out http://lungnotes.example.org for tarceva dosing guides.",
    "According to a study last spring, tarceva response varies a lot.",
    "Good luck with the tarceva start next week!",
    "Wishing you an easy first month on tarceva.",
    "After taking tarceva for six weeks the tumor shrank.",
    "Tarceva stopped working for my aunt after a year.",
    "I started tarceva in February; in my case week one was the hardest.",
    "I have been on tarceva for two months now.",
    "Day one of tarceva is here at last.",
)

_OTHER_DRUG_POSTS = (
    "I started cisplatin and the nausea arrived by day three.",
    "Carboplatin left us with brutal fatigue for a week.",
    "My doctor moved me from taxol to docetaxel after the neuropathy.",
    "The gemcitabine schedule is two weeks on, one week off.",
    "You should ask about zofran before the first cisplatin round.",
    "No improvement after three cycles of cisplatin, so the plan changed.",
    "Xeloda worked for me with manageable dry skin.",
    "Herceptin infusions take about an hour at our center.",
)

_GENERAL_POSTS = (
    "I was diagnosed in March 2010, stage iii, and the lung cancer forum here kept us sane.",
    "I am 52 and was diagnosed stage iv last fall.",
    "I am a woman in my forties dealing with breast cancer.",
    "The mayo clinic team was wonderful during the biopsy.",
    "We traveled from boston to see the specialist.",
    "Radiation therapy starts on Monday.",
    "Good luck, my thoughts and prayers are with you!",
    "Hang in there, the first cycle is the scariest.",
    "Check out www.caregiver-handbook.example.com for practical tips.",
    "There is a book called Waiting Rooms worth reading.",
    "My doctor recommended physical therapy for the stiffness.",
    "The insurance letters keep piling up.",
    "Paperwork took most of the morning.",
    "Stay strong, you can do this!",
    "Ask your doctor about a bone scan if the back pain persists.",
    "I had a lumpectomy in 2009 and the margins were clear.",
)

_FORUMS = (
    ("cancer-connect", ("lung-cancer", "breast-cancer")),
    ("onco-talk", ("treatment", "side-effects")),
    ("health-circle", ("support", "lung-cancer")),
)

_TARCEVA_TITLES = (
    "Tarceva and the first month",
    "Tarceva side effects check-in",
    "Starting tarceva next week",
    "Tarceva dosing questions",
    "Life on tarceva",
)

_OTHER_TITLES = (
    "Cisplatin round two",
    "Newly diagnosed and overwhelmed",
    "Radiation scheduling",
    "Caregiver corner",
    "Scan day nerves",
    "Treatment logistics",
)


def make_demo_corpus(seed: int = 7) -> list[Thread]:
    """The walkthrough corpus; roughly 360 posts across three forums."""
    rng = random.Random(seed)

    tarceva_bodies: list[str] = []
    for canonical, surfaces, quota in TARCEVA_SIDE_EFFECTS:
        for i in range(quota):
            surface = surfaces[i % len(surfaces)]
            # a few cough mentions arrive wrapped in advice, per the walkthrough
            if canonical == "cough" and i % 4 == 0:
                template = _SE_ADVICE_TEMPLATES[i % len(_SE_ADVICE_TEMPLATES)]
            else:
                template = _SE_TEMPLATES[i % len(_SE_TEMPLATES)]
            tarceva_bodies.append(template.format(se=surface))
    tarceva_bodies.extend(_TARCEVA_PLAIN)
    rng.shuffle(tarceva_bodies)

    filler_bodies = list(_OTHER_DRUG_POSTS + _GENERAL_POSTS)

    threads: list[Thread] = []
    ordinal = 0

    def next_bodies(pool: list[str], count: int) -> list[str]:
        picked = []
        for _ in range(count):
            if pool:
                picked.append(pool.pop())
            else:
                picked.append(rng.choice(filler_bodies))
        return picked

    # tarceva threads first, spread across every forum
    while tarceva_bodies:
        forum, categories = _FORUMS[ordinal % len(_FORUMS)]
        bodies = next_bodies(tarceva_bodies, rng.randint(2, 5))
        bodies.append(rng.choice(filler_bodies))
        threads.append(
            _make_thread(
                thread_id=f"{forum}:t{ordinal}",
                source_forum=forum,
                category=categories[ordinal % len(categories)],
                title=_TARCEVA_TITLES[ordinal % len(_TARCEVA_TITLES)],
                bodies=bodies,
                rng=rng,
                base_time=_BASE_TIME + timedelta(days=ordinal),
                roster=frozenset(EXPERT_AUTHORS),
            )
        )
        ordinal += 1

    # background threads without tarceva
    for _ in range(40):
        forum, categories = _FORUMS[ordinal % len(_FORUMS)]
        bodies = [rng.choice(filler_bodies) for _ in range(rng.randint(2, 6))]
        threads.append(
            _make_thread(
                thread_id=f"{forum}:t{ordinal}",
                source_forum=forum,
                category=categories[ordinal % len(categories)],
                title=_OTHER_TITLES[ordinal % len(_OTHER_TITLES)],
                bodies=bodies,
                rng=rng,
                base_time=_BASE_TIME + timedelta(days=ordinal),
                roster=frozenset(EXPERT_AUTHORS),
            )
        )
        ordinal += 1
    return threads


# ---------------------------------------------------------------------------
# Audit corpus: entity-dense posts for the fact-count arithmetic
# ---------------------------------------------------------------------------

_AUDIT_FACT_SENTENCES = (
    "I am {age} and was diagnosed stage {stage}.",
    "I am a {gender}.",
    "They diagnosed on {date} and treatment began the same month.",
)


def _canonical_groups(lexicon) -> list[tuple[str, str]]:
    by_canonical: dict[str, str] = {}
    for surface, canonical in sorted(lexicon.entries.items()):
        by_canonical.setdefault(canonical, surface)
    return sorted(by_canonical.items())


def make_audit_corpus(lexicons, seed: int = 99, n_posts: int = 1000) -> list[Thread]:
    """Posts stuffed with distinct entity values; around fifty facts apiece."""
    rng = random.Random(seed)
    groups = {lex.entity_type: _canonical_groups(lex) for lex in lexicons}
    picks_per_type = {
        "side_effect": 6,
        "chemo_drug": 5,
        "general_drug": 4,
        "pain_killer": 3,
        "treatment": 4,
        "condition": 4,
        "cancer_condition": 3,
        "hospital": 2,
        "location": 4,
    }

    threads = []
    posts_done = 0
    ordinal = 0
    while posts_done < n_posts:
        size = min(rng.randint(4, 10), n_posts - posts_done)
        bodies = []
        for _ in range(size):
            sentences = [
                _AUDIT_FACT_SENTENCES[0].format(age=rng.randint(20, 90), stage=rng.choice(("i", "ii", "iii", "iv"))),
                _AUDIT_FACT_SENTENCES[1].format(gender=rng.choice(("woman", "man"))),
                _AUDIT_FACT_SENTENCES[2].format(
                    date=f"{rng.randint(1, 12):02d}/{rng.randint(1, 28):02d}/{rng.randint(2001, 2011)}"
                ),
            ]
            for entity_type, count in picks_per_type.items():
                available = groups.get(entity_type, [])
                if not available:
                    continue
                chosen = rng.sample(available, min(count + rng.randint(-1, 1), len(available)))
                listing = ", ".join(surface for _, surface in chosen)
                sentences.append(f"The notes mentioned {listing}.")
            rng.shuffle(sentences)
            bodies.append(" ".join(sentences))
        threads.append(
            _make_thread(
                thread_id=f"audit:t{ordinal}",
                source_forum="audit-forum",
                category="audit",
                title=f"audit thread {ordinal}",
                bodies=bodies,
                rng=rng,
                base_time=_BASE_TIME + timedelta(hours=ordinal),
            )
        )
        posts_done += size
        ordinal += 1
    return threads


def write_labels_csv(labels: list[LabelRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("post_id,expression,label\n")
        for row in labels:
            fh.write(f"{row.post_id},{row.expression},{row.label}\n")


def read_labels_csv(path) -> list[LabelRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "post_id,expression,label":
            raise ValueError(f"{path}: expected header 'post_id,expression,label'")
        for line_no, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3 or parts[2] not in ("Y", "N"):
                raise ValueError(f"{path}:{line_no}: malformed label row")
            rows.append(LabelRow(post_id=parts[0], expression=parts[1], label=parts[2]))
    return rows
