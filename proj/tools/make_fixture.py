#!/usr/bin/env python3
"""Generate the hotel-review fixture corpus used by the tests.

The output is a line-delimited JSON file with 574 comments whose gold
sentiment labels split 265 positive / 129 neutral / 180 negative. The
generator is seeded, so re-running it reproduces the file byte for byte.

    python3 tools/make_fixture.py > data/hotel_reviews.jsonl
"""

import json
import random
import sys

SEED = 20240611
COUNTS = {"positive": 265, "neutral": 129, "negative": 180}

ASPECTS = {
    "room": ["room", "room", "bed", "bathroom", "shower"],
    "service": ["staff", "staff", "reception", "service"],
    "location": ["location", "station", "beach", "neighborhood"],
    "dining": ["breakfast", "restaurant", "coffee", "buffet"],
    "housekeeping": ["housekeeping", "towels", "sheets"],
    "value": ["price", "value", "parking"],
}

POS_ADJ = [
    "excellent", "wonderful", "great", "comfortable", "spacious", "lovely",
    "perfect", "fantastic", "superb", "pleasant", "beautiful", "amazing",
    "outstanding", "delightful", "charming", "impressive", "cozy", "bright",
    "modern", "spotless", "friendly", "helpful", "welcoming", "attentive",
    "generous", "fresh", "tasty", "delicious", "convenient", "quiet",
    "relaxing", "stylish", "elegant", "brilliant", "exceptional", "cheerful",
    "courteous", "marvelous", "splendid", "terrific",
]
NEG_ADJ = [
    "terrible", "awful", "dirty", "rude", "noisy", "cramped", "poor",
    "horrible", "disappointing", "broken", "slow", "overpriced", "smelly",
    "unhelpful", "shabby", "stained", "dated", "tiny", "uncomfortable",
    "filthy", "dreadful", "mediocre", "lousy", "grimy", "moldy", "careless",
    "chaotic", "stale", "greasy", "cold", "musty", "unfriendly", "sloppy",
    "faulty", "worn", "inadequate", "unpleasant", "bland", "disorganized",
    "annoying",
]

POS_TEMPLATES = [
    "The {n} was {a}.",
    "{A} {n}.",
    "{A} and {a2} {n}.",
    "The {n} is {a}, {a2} too.",
    "Such a {a} {n}!",
    "What a {a} {n}.",
    "The {n}: {a} and {a2}.",
]
NEG_TEMPLATES = [
    "The {n} was {a}.",
    "{A} {n}.",
    "{A} and {a2} {n}.",
    "The {n} is {a}, {a2} too.",
    "Such a {a} {n}!",
    "What a {a} {n}.",
    "The {n}: {a} and {a2}.",
]
NEU_TEMPLATES = [
    "The {n} is on the third floor.",
    "We used the {n} twice.",
    "The {n} opens at seven.",
    "There is a {n} next to the lobby.",
    "The {n} was as described in the listing.",
    "Our {n} was booked through an agency.",
    "The {n} is shared with the annex.",
    "The {n} closes at midnight.",
    "Guests reach the {n} by elevator.",
    "The {n} was renovated last year.",
    "A map shows the {n}.",
    "The {n} accepts cards.",
]


def pick_nouns(rng):
    # One primary aspect, discussed through one to three of its nouns, and
    # occasionally a short aside about a second aspect.
    primary = rng.choice(sorted(ASPECTS))
    pool = sorted(set(ASPECTS[primary]))
    nouns = rng.sample(pool, min(len(pool), rng.choice([1, 2, 2, 3])))
    if rng.random() < 0.3:
        other = rng.choice([a for a in sorted(ASPECTS) if a != primary])
        nouns.append(rng.choice(ASPECTS[other]))
    return nouns


def sentence(rng, label, noun):
    if label == "neutral":
        return rng.choice(NEU_TEMPLATES).format(n=noun)
    adjs = POS_ADJ if label == "positive" else NEG_ADJ
    tmpl = rng.choice(POS_TEMPLATES if label == "positive" else NEG_TEMPLATES)
    a, a2 = rng.sample(adjs, 2)
    return tmpl.format(n=noun, a=a, a2=a2, A=a.capitalize())


def main():
    rng = random.Random(SEED)
    labels = [lab for lab, c in COUNTS.items() for _ in range(c)]
    rng.shuffle(labels)
    out = sys.stdout
    for i, label in enumerate(labels, start=1):
        text = " ".join(sentence(rng, label, n) for n in pick_nouns(rng))
        rec = {
            "id": f"c{i}",
            "text": text,
            "lang": "en",
            "source": "fixture",
            "gold_sentiment": label,
        }
        out.write(json.dumps(rec, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
