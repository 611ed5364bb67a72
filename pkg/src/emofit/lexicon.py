"""Emotion lexicon parsing and constraint-set construction.

The lexicon format is the word-level NRC EmoLex TSV: one
``word<TAB>category<TAB>0|1`` record per line, where category is one of
the eight basic emotions or ``positive``/``negative`` sentiment.
Flagged (word, emotion) records become attract pairs; each pair also
spawns a repel pair against the wheel-opposite emotion, following the
basic-emotion wheel in which every emotion sits opposite exactly one
other (joy-sadness, anger-fear, trust-disgust, anticipation-surprise).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from emofit.embedding_io import VectorSpace

BASIC_EMOTIONS = (
    "joy",
    "sadness",
    "anger",
    "fear",
    "trust",
    "disgust",
    "anticipation",
    "surprise",
)
SENTIMENTS = ("positive", "negative")
_OPPOSITE_PAIRS = (
    ("joy", "sadness"),
    ("anger", "fear"),
    ("trust", "disgust"),
    ("anticipation", "surprise"),
)


class LexiconParseError(ValueError):
    """A lexicon file that cannot be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class EmotionWheel:
    """The basic emotions and their opposite map (an involution without fixed points)."""

    emotions: tuple[str, ...]
    opposites: dict[str, str]

    def __post_init__(self):
        if set(self.opposites) != set(self.emotions):
            raise ValueError("opposite map must cover exactly the listed emotions")
        for e, opp in self.opposites.items():
            if opp == e:
                raise ValueError(f"emotion {e!r} cannot be its own opposite")
            if self.opposites.get(opp) != e:
                raise ValueError(f"opposite map is not an involution at {e!r}")

    def opposite(self, emotion: str) -> str:
        try:
            return self.opposites[emotion]
        except KeyError:
            raise ValueError(f"unknown emotion {emotion!r}") from None

    @classmethod
    def plutchik(cls) -> "EmotionWheel":
        opposites: dict[str, str] = {}
        for a, b in _OPPOSITE_PAIRS:
            opposites[a] = b
            opposites[b] = a
        return cls(emotions=BASIC_EMOTIONS, opposites=opposites)

    @classmethod
    def from_json(cls, path) -> "EmotionWheel":
        """Load an experimental wheel from a JSON list of [emotion, opposite] pairs."""
        with open(path, encoding="utf-8") as fh:
            pairs = json.load(fh)
        if not isinstance(pairs, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in pairs
        ):
            raise ValueError(f"{path}: expected a JSON list of [emotion, opposite] pairs")
        opposites: dict[str, str] = {}
        for a, b in pairs:
            opposites[str(a)] = str(b)
            opposites[str(b)] = str(a)
        return cls(emotions=tuple(opposites), opposites=opposites)


class LexiconEntry(NamedTuple):
    word: str
    emotion: str
    flag: int


def parse_nrc_lexicon(path) -> list[LexiconEntry]:
    """Parse a word-level emotion lexicon TSV into emotion records.

    Sentiment rows (``positive``/``negative``) are dropped; flag-0 emotion
    rows are kept (they contribute no constraints but are part of the
    record stream). Unknown categories and malformed lines raise
    :class:`LexiconParseError` with the line number.
    """
    valid = set(BASIC_EMOTIONS) | set(SENTIMENTS)
    entries: list[LexiconEntry] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise LexiconParseError(
                    f"expected 'word<TAB>category<TAB>flag', got {len(parts)} fields",
                    line_no,
                )
            word, category, flag_field = parts
            if category not in valid:
                raise LexiconParseError(f"unknown category {category!r}", line_no)
            if flag_field not in ("0", "1"):
                raise LexiconParseError(f"flag must be 0 or 1, got {flag_field!r}", line_no)
            if category in SENTIMENTS:
                continue
            entries.append(LexiconEntry(word, category, int(flag_field)))
    return entries


@dataclass(frozen=True)
class ConstraintStats:
    records_seen: int
    records_flagged: int
    words_oov: int
    anchors_missing: tuple[str, ...]
    positive_pairs: int
    negative_pairs: int


@dataclass(frozen=True)
class ConstraintSet:
    """Attract pairs, repel pairs, and how they were arrived at.

    ``positive`` and ``negative`` are (k, 2) int64 arrays of
    (word_row, emotion_row) vocabulary indices, deduplicated and sorted.
    """

    positive: np.ndarray
    negative: np.ndarray
    stats: ConstraintStats

    def anchor_rows(self) -> np.ndarray:
        """Rows used as emotion anchors (second element of any pair)."""
        cols = [self.positive[:, 1]]
        if len(self.negative):
            cols.append(self.negative[:, 1])
        return np.unique(np.concatenate(cols))

    def constrained_rows(self) -> np.ndarray:
        """All rows touched by any pair, for neighborhood scoping."""
        parts = [self.positive.ravel()]
        if len(self.negative):
            parts.append(self.negative.ravel())
        return np.unique(np.concatenate(parts))


def _pair_array(pairs: set[tuple[int, int]]) -> np.ndarray:
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    return np.array(sorted(pairs), dtype=np.int64)


def build_constraints(
    entries: list[LexiconEntry],
    wheel: EmotionWheel,
    space: VectorSpace,
) -> ConstraintSet:
    """Turn flagged lexicon records into attract/repel row-index pairs.

    For each record (w, e, 1) with both w and the emotion token e in the
    vocabulary, (row(w), row(e)) joins the positive set; if the opposite
    emotion token is present too, (row(w), row(opposite(e))) joins the
    negative set. Flag-0 records and out-of-vocabulary words only feed
    the skip counts. Tokens are matched case-sensitively as stored.
    """
    if len(space) == 0:
        raise ValueError("vector space is empty")
    emotion_rows = {e: space.index.get(e) for e in wheel.emotions}
    anchors_missing = tuple(sorted(e for e, r in emotion_rows.items() if r is None))

    positive: set[tuple[int, int]] = set()
    negative: set[tuple[int, int]] = set()
    oov_words: set[str] = set()
    flagged = 0
    for word, emotion, flag in entries:
        if emotion not in emotion_rows:
            raise ValueError(f"record emotion {emotion!r} is not on the wheel")
        if flag == 0:
            continue
        flagged += 1
        word_row = space.index.get(word)
        if word_row is None:
            oov_words.add(word)
            continue
        emotion_row = emotion_rows[emotion]
        if emotion_row is None:
            continue
        positive.add((word_row, emotion_row))
        opposite_row = emotion_rows[wheel.opposite(emotion)]
        if opposite_row is not None:
            negative.add((word_row, opposite_row))

    if not positive:
        raise ValueError(
            "empty constraint set: no flagged lexicon words found in the vocabulary"
        )
    stats = ConstraintStats(
        records_seen=len(entries),
        records_flagged=flagged,
        words_oov=len(oov_words),
        anchors_missing=anchors_missing,
        positive_pairs=len(positive),
        negative_pairs=len(negative),
    )
    return ConstraintSet(
        positive=_pair_array(positive), negative=_pair_array(negative), stats=stats
    )
