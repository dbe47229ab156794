"""Regenerate the bundled 200-row review corpus and keyword-victim weights.

    python scripts/make_minicorpus.py
    leap lexicon --wordnet /path/to/wordnet-3.0 --dataset src/leap/data/minicorpus.csv \
        --out src/leap/data/lexicon.json
"""
import json
import random
from pathlib import Path

from leap.dataset import write_dataset

OUT = Path(__file__).resolve().parents[1] / "src" / "leap" / "data"
SEED = 20230

POSITIVE = (
    "good great excellent wonderful superb brilliant fantastic delightful charming enjoyable "
    "fine lovely splendid terrific impressive clever solid gripping funny warm touching fresh smart"
).split()
NEGATIVE = (
    "bad terrible awful boring dull poor weak horrible dreadful tedious mediocre clumsy bland "
    "painful stupid ugly disappointing lousy messy silly flat slow cheap tired"
).split()
NOUNS = (
    "film movie plot acting story cast script ending soundtrack director dialogue pacing scenery "
    "performance music camera humor character theme scene sequel lead score effects"
).split()
HEDGES = ["", "", "", "really ", "quite ", "rather ", "mostly "]
FILLERS = [
    "I saw it last weekend",
    "we watched it at home",
    "my friends picked this one",
    "it runs about two hours",
    "the trailer made promises",
    "I went in with no expectations",
]
JOINERS = [", and ", ", but ", "; ", " and ", ". "]


def clause(rng, adjective):
    return f"the {rng.choice(NOUNS)} was {rng.choice(HEDGES)}{adjective}"


def review(rng):
    label = rng.randrange(2)
    majority = POSITIVE if label == 1 else NEGATIVE
    minority = NEGATIVE if label == 1 else POSITIVE
    n_major = rng.choice([1, 1, 2, 2, 2, 3, 3])
    n_minor = rng.choice([0, 0, 1]) if n_major > 1 else 0
    adjectives = rng.sample(majority, n_major) + rng.sample(minority, n_minor)
    rng.shuffle(adjectives)
    parts = [clause(rng, a) for a in adjectives]
    if rng.random() < 0.6:
        parts.insert(rng.randrange(len(parts) + 1), rng.choice(FILLERS))
    text = parts[0]
    for p in parts[1:]:
        j = rng.choice(JOINERS)
        text += j + (p[0].upper() + p[1:] if j == ". " else p)
    return text[0].upper() + text[1:] + ".", label


def weights(rng):
    w = {}
    for word in POSITIVE:
        w[word] = [0.0, round(rng.uniform(0.8, 2.0), 3)]
    for word in NEGATIVE:
        w[word] = [round(rng.uniform(0.8, 2.0), 3), 0.0]
    for word in NOUNS:
        k = rng.randrange(2)
        vec = [0.0, 0.0]
        vec[k] = round(rng.uniform(0.0, 0.15), 3)
        w[word] = vec
    return dict(sorted(w.items()))


def main():
    rng = random.Random(SEED)
    rows = [review(rng) for _ in range(200)]
    write_dataset(OUT / "minicorpus.csv", rows)
    (OUT / "keyword_weights.json").write_text(json.dumps({"weights": weights(rng)}, indent=1) + "\n")


if __name__ == "__main__":
    main()
