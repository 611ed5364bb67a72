#!/usr/bin/env python3
"""Regenerate the committed fixtures under data/.

Two fixtures are produced, both fully deterministic:

* toy12.vec / toy12_lexicon.tsv - a 12-word space (4 emotion anchors +
  8 lexicon words) small enough to reason about by hand.
* emo2k.vec / emo2k_lexicon.tsv - a ~2,000-word space with the geometry
  of a real pre-trained embedding subset: every taxonomy word plus a
  lexicon sample, cluster structure calibrated so the before-metrics sit
  in the published ranges (in-category ~0.4, opposite pairs ~0.2),
  near-duplicate token variants so the radius-0.2 neighborhood graph is
  non-trivial, and realistic norm spread.

No network access or pre-trained data is required; run from the repo
root with ``python tools/make_fixtures.py``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from emofit.embedding_io import VectorSpace, save_embeddings
from emofit.evaluation import load_taxonomy
from emofit.lexicon import BASIC_EMOTIONS

DATA_DIR = Path(__file__).resolve().parents[1] / "data"

DIM = 50
TARGET_VOCAB = 2000
GLOBAL_W = 0.36      # shared "affect" component
PROTO_W = 0.54       # emotion prototype component
NOISE_W = 0.76       # per-word noise component
OPPOSITE_PROTO_SIM = 0.38
ANCHOR_PROTO_W = 0.80
ANCHOR_NOISE_W = 0.25
VARIANT_NOISE = 0.30
VARIANT_SHARE = 0.10
WORDS_PER_EMOTION = 75

POSITIVE_EMOTIONS = {"joy", "trust", "anticipation", "surprise"}

# Shaver primary category -> basic emotions whose cluster its members join
CATEGORY_EMOTIONS = {
    "Liking": ("trust", "joy"),
    "Joy": ("joy",),
    "Surprise": ("surprise",),
    "Anger": ("anger",),
    "Sadness": ("sadness",),
    "Fear": ("fear",),
}

_CONSONANTS = "bcdfglmnprstvz"
_VOWELS = "aeiou"


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _pseudo_word(rng: np.random.Generator, used: set[str]) -> str:
    while True:
        n_syll = int(rng.integers(2, 4))
        word = "".join(
            _CONSONANTS[rng.integers(len(_CONSONANTS))]
            + _VOWELS[rng.integers(len(_VOWELS))]
            for _ in range(n_syll)
        )
        if rng.random() < 0.4:
            word += _CONSONANTS[rng.integers(len(_CONSONANTS))]
        if word not in used:
            used.add(word)
            return word


def _prototypes(rng: np.random.Generator) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """A global affect direction plus one prototype per emotion.

    Opposite emotions share a latent pair axis so their prototypes land
    at the calibrated similarity; unrelated pairs sit near zero.
    """
    g = _unit(rng.standard_normal(DIM))
    protos: dict[str, np.ndarray] = {}
    rho = OPPOSITE_PROTO_SIM
    mix = np.sqrt(rho)
    rest = np.sqrt(1.0 - rho)
    for a, b in (("joy", "sadness"), ("anger", "fear"),
                 ("trust", "disgust"), ("anticipation", "surprise")):
        axis = _unit(rng.standard_normal(DIM))
        protos[a] = _unit(mix * axis + rest * _unit(rng.standard_normal(DIM)))
        protos[b] = _unit(mix * axis + rest * _unit(rng.standard_normal(DIM)))
    return g, protos


def _member_vector(
    rng: np.random.Generator,
    g: np.ndarray,
    protos: dict[str, np.ndarray],
    emotions: tuple[str, ...],
) -> np.ndarray:
    proto = _unit(sum(protos[e] for e in emotions))
    noise = _unit(rng.standard_normal(DIM))
    return _unit(GLOBAL_W * g + PROTO_W * proto + NOISE_W * noise)


def _write_lexicon(path: Path, flags: dict[str, set[str]]) -> None:
    """Word-level TSV with the full 10-category block per word."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for word in sorted(flags):
            emotions = flags[word]
            for emotion in sorted(BASIC_EMOTIONS):
                fh.write(f"{word}\t{emotion}\t{1 if emotion in emotions else 0}\n")
            positive = bool(emotions & POSITIVE_EMOTIONS)
            fh.write(f"{word}\tpositive\t{1 if positive else 0}\n")
            fh.write(f"{word}\tnegative\t{0 if positive else 1}\n")


def make_toy12() -> None:
    """4 anchors + 6 cluster words + 2 near-duplicate variants, 8 dims.

    Hand-placed on an orthonormal basis so the starting geometry is
    exact: anchors of an opposite pair share an axis (mutual sim 0.38),
    every word sits at sim ~0.545 from its anchor and ~0.22 from the
    opposite anchor (both hinges active), and the variants are the only
    radius-0.2 edges.
    """
    d = 8
    e = np.eye(d)
    vectors: dict[str, np.ndarray] = {
        # pair axis e0 is shared; e1/e2 and e4/e5 are the detail directions
        "joy": _unit(0.62 * e[0] + 0.78 * e[1]),
        "sadness": _unit(0.62 * e[0] + 0.78 * e[2]),
        "anger": _unit(0.62 * e[3] + 0.78 * e[4]),
        "fear": _unit(0.62 * e[3] + 0.78 * e[5]),
        # e6/e7 hold the per-word variation
        "cheer": 0.35 * e[0] + 0.42 * e[1] + 0.84 * e[6],
        "bliss": 0.35 * e[0] + 0.42 * e[1] - 0.84 * e[6],
        "gloom": 0.35 * e[0] + 0.42 * e[2] + 0.84 * e[7],
        "grief": 0.35 * e[0] + 0.42 * e[2] - 0.84 * e[7],
        "rage": 0.35 * e[3] + 0.42 * e[4] + 0.84 * e[6],
        "panic": 0.35 * e[3] + 0.42 * e[5] + 0.84 * e[7],
    }
    vectors["outrage"] = _unit(vectors["rage"] + 0.25 * e[2])
    vectors["dread"] = _unit(vectors["panic"] + 0.25 * e[1])
    tokens = list(vectors)
    matrix = np.vstack([_unit(vectors[t]) * 2.0 for t in tokens])
    save_embeddings(VectorSpace(tokens, matrix), DATA_DIR / "toy12.vec", "glove")

    flags = {
        "cheer": {"joy"}, "bliss": {"joy"},
        "gloom": {"sadness"}, "grief": {"sadness"},
        "rage": {"anger"}, "outrage": {"anger"},
        "panic": {"fear"}, "dread": {"fear"},
        "zzmissing": {"joy"},  # out-of-vocabulary on purpose
    }
    _write_lexicon(DATA_DIR / "toy12_lexicon.tsv", flags)


def make_emo2k() -> None:
    rng = np.random.default_rng(20240917)
    g, protos = _prototypes(rng)
    taxonomy = load_taxonomy()

    vectors: dict[str, np.ndarray] = {}
    flags: dict[str, set[str]] = {}
    used: set[str] = set()

    for emotion in BASIC_EMOTIONS:
        vectors[emotion] = _unit(
            ANCHOR_PROTO_W * protos[emotion]
            + GLOBAL_W * g
            + ANCHOR_NOISE_W * _unit(rng.standard_normal(DIM))
        )
        used.add(emotion)

    for category, words in taxonomy.categories.items():
        emotions = CATEGORY_EMOTIONS[category]
        for word in words:
            used.add(word)
            if word not in vectors:
                vectors[word] = _member_vector(rng, g, protos, emotions)
            flags.setdefault(word, set()).update(emotions)

    for emotion in BASIC_EMOTIONS:
        for _ in range(WORDS_PER_EMOTION):
            word = _pseudo_word(rng, used)
            emotions = (emotion,)
            if rng.random() < 0.1:  # some words carry two emotions
                other = str(rng.choice([e for e in BASIC_EMOTIONS if e != emotion]))
                emotions = (emotion, other)
            vectors[word] = _member_vector(rng, g, protos, emotions)
            flags[word] = set(emotions)

    # inflection-like variants give the radius-0.2 graph its edges
    variant_base = sorted(w for w in flags if w not in BASIC_EMOTIONS)
    n_variants = int(len(variant_base) * VARIANT_SHARE)
    picks = rng.choice(len(variant_base), size=n_variants, replace=False)
    for pick in sorted(picks):
        word = variant_base[pick]
        for suffix in ("s", "ly", "ed"):
            if word + suffix not in used:
                variant = word + suffix
                break
        else:
            continue
        used.add(variant)
        vectors[variant] = _unit(vectors[word] + VARIANT_NOISE * _unit(rng.standard_normal(DIM)))
        flags[variant] = set(flags[word])

    for _ in range(20):  # lexicon words with no vector, for the skip counters
        flags[_pseudo_word(rng, used)] = {str(rng.choice(BASIC_EMOTIONS))}

    while len(vectors) < TARGET_VOCAB:
        vectors[_pseudo_word(rng, used)] = _unit(rng.standard_normal(DIM))

    tokens = list(vectors)
    order = rng.permutation(len(tokens))
    tokens = [tokens[i] for i in order]
    norms = rng.lognormal(mean=1.0, sigma=0.35, size=len(tokens))
    matrix = np.vstack([vectors[t] * norms[i] for i, t in enumerate(tokens)])
    save_embeddings(VectorSpace(tokens, matrix), DATA_DIR / "emo2k.vec", "glove")
    _write_lexicon(DATA_DIR / "emo2k_lexicon.tsv", flags)


def main() -> None:
    DATA_DIR.mkdir(exist_ok=True)
    make_toy12()
    make_emo2k()
    print(f"fixtures written to {DATA_DIR}")


if __name__ == "__main__":
    main()
