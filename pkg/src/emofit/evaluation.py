"""Emotional-similarity metrics over a held-out emotion grouping.

The built-in grouping is Shaver et al.'s three-level emotion hierarchy:
six primary categories (Liking, Joy, Surprise, Anger, Sadness, Fear)
whose secondary labels and tertiary words are pooled into one member set
per primary (the union-of-levels reading; reports carry that label).
Scores are plain cosine-similarity averages: within a category over all
unordered member pairs, and across a category pair over the full cross
product. Multiword entries are dropped, never split, and listed in the
taxonomy so reports can say what was excluded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from emofit.embedding_io import VectorSpace
from emofit.geometry import unit_rows

BUILTIN_SOURCE = "shaver-three-level (union of secondary and tertiary)"

# Secondary labels and tertiary words per primary category, in table order.
# "delight" and "sorrow" appear hyphenated in some printings; "apprehension"
# carries a "(fear)" gloss; "lust" is one half of a slashed label whose other
# half ("sexual desire") is multiword and therefore dropped at normalization,
# like "mono no aware". Repeats such as "longing" at two levels are kept here
# and deduplicated at normalization.
_RAW_CATEGORIES: dict[str, tuple[str, ...]] = {
    "Liking": (
        "affection", "adoration", "fondness", "liking", "attractiveness",
        "caring", "tenderness", "compassion", "sentimentality",
        "lust", "sexual desire", "desire", "passion", "infatuation",
        "longing", "longing",
    ),
    "Joy": (
        "cheerfulness", "amusement", "bliss", "gaiety", "glee", "jolliness",
        "joviality", "joy", "delight", "enjoyment", "gladness", "happiness",
        "jubilation", "elation", "satisfaction", "ecstasy", "euphoria",
        "zest", "enthusiasm", "zeal", "excitement", "thrill", "exhilaration",
        "contentment", "pleasure",
        "pride", "triumph",
        "optimism", "eagerness", "hope",
        "enthrallment", "enthrallment", "rapture",
        "relief", "relief",
    ),
    "Surprise": (
        "surprise", "surprise", "amazement", "astonishment",
    ),
    "Anger": (
        "irritability", "aggravation", "agitation", "annoyance", "grouchy",
        "grumpy", "crosspatch",
        "exasperation", "frustration",
        "rage", "anger", "outrage", "fury", "wrath", "hostility", "ferocity",
        "bitter", "hatred", "scorn", "spite", "vengefulness", "dislike",
        "resentment",
        "disgust", "revulsion", "contempt", "loathing",
        "envy", "jealousy",
        "torment", "torment",
    ),
    "Sadness": (
        "suffering", "agony", "anguish", "hurt",
        "sadness", "depression", "despair", "gloom", "glumness", "unhappy",
        "grief", "sorrow", "woe", "misery", "melancholy",
        "disappointment", "dismay", "displeasure",
        "shame", "guilt", "regret", "remorse",
        "neglect", "alienation", "defeatism", "dejection", "embarrassment",
        "homesickness", "humiliation", "insecurity", "insult", "isolation",
        "loneliness", "rejection",
        "sympathy", "pity", "mono no aware", "sympathy",
    ),
    "Fear": (
        "horror", "alarm", "shock", "fear", "fright", "horror", "terror",
        "panic", "hysteria", "mortification",
        "nervousness", "anxiety", "suspense", "uneasiness", "apprehension",
        "worry", "distress", "dread",
    ),
}

OPPOSITE_CATEGORY_PAIRS = (("Joy", "Sadness"), ("Anger", "Fear"))


@dataclass(frozen=True)
class EmotionTaxonomy:
    """Primary-emotion categories mapped to their member words."""

    categories: dict[str, tuple[str, ...]]
    source: str
    dropped: tuple[str, ...] = ()

    def total_members(self) -> int:
        return sum(len(words) for words in self.categories.values())


def _normalize_categories(
    raw: dict, *, lowercase: bool
) -> tuple[dict[str, tuple[str, ...]], tuple[str, ...]]:
    categories: dict[str, tuple[str, ...]] = {}
    dropped: list[str] = []
    owner: dict[str, str] = {}
    for name, words in raw.items():
        kept: list[str] = []
        for word in words:
            word = str(word).strip()
            if lowercase:
                word = word.lower()
            if not word:
                continue
            if len(word.split()) > 1:
                if word not in dropped:
                    dropped.append(word)
                continue
            if word in kept:
                continue
            prior = owner.get(word)
            if prior is not None and prior != name:
                raise ValueError(
                    f"word {word!r} belongs to both {prior!r} and {name!r}"
                )
            owner[word] = name
            kept.append(word)
        categories[str(name)] = tuple(kept)
    return categories, tuple(dropped)


def load_taxonomy(path=None, *, lowercase: bool = True) -> EmotionTaxonomy:
    """The built-in taxonomy, or one from a JSON file.

    The file schema is ``{"categories": {"<Primary>": ["word", ...]},
    "source": "<label>"}``. Overlapping categories are a validation
    error; multiword entries are dropped and recorded.
    """
    if path is None:
        categories, dropped = _normalize_categories(_RAW_CATEGORIES, lowercase=lowercase)
        return EmotionTaxonomy(categories=categories, source=BUILTIN_SOURCE, dropped=dropped)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not isinstance(data.get("categories"), dict):
        raise ValueError(f"{path}: expected an object with a 'categories' mapping")
    categories, dropped = _normalize_categories(data["categories"], lowercase=lowercase)
    if not categories:
        raise ValueError(f"{path}: taxonomy has no categories")
    source = str(data.get("source", str(path)))
    return EmotionTaxonomy(categories=categories, source=source, dropped=dropped)


@dataclass(frozen=True)
class InCategoryReport:
    """Mean pairwise member similarity per category plus pooled summaries.

    Categories with fewer than two in-vocabulary members are unscored
    (None), never zero. ``pooled_mean`` weights every pair equally across
    categories; ``category_mean`` averages the per-category means.
    """

    per_category: dict[str, float | None]
    pair_counts: dict[str, int]
    pooled_mean: float
    category_mean: float
    coverage: dict[str, tuple[int, int]]


def _member_rows(space: VectorSpace, words: tuple[str, ...]) -> list[int]:
    return [space.index[w] for w in words if w in space.index]


def in_category_similarity(space: VectorSpace, taxonomy: EmotionTaxonomy) -> InCategoryReport:
    """Average cosine similarity over all unordered in-category word pairs."""
    per_category: dict[str, float | None] = {}
    pair_counts: dict[str, int] = {}
    coverage: dict[str, tuple[int, int]] = {}
    pooled_sum = 0.0
    pooled_pairs = 0
    for name, words in taxonomy.categories.items():
        rows = _member_rows(space, words)
        coverage[name] = (len(rows), len(words) - len(rows))
        if len(rows) < 2:
            per_category[name] = None
            pair_counts[name] = 0
            continue
        U = unit_rows(space.matrix[rows])
        sims = np.clip(U @ U.T, -1.0, 1.0)
        iu = np.triu_indices(len(rows), k=1)
        values = sims[iu]
        per_category[name] = float(values.mean())
        pair_counts[name] = int(values.size)
        pooled_sum += float(values.sum())
        pooled_pairs += int(values.size)
    if pooled_pairs == 0:
        raise ValueError("no category has two or more in-vocabulary words")
    scored = [v for v in per_category.values() if v is not None]
    return InCategoryReport(
        per_category=per_category,
        pair_counts=pair_counts,
        pooled_mean=pooled_sum / pooled_pairs,
        category_mean=float(np.mean(scored)),
        coverage=coverage,
    )


def opposite_similarity(
    space: VectorSpace, taxonomy: EmotionTaxonomy, a: str, b: str
) -> float:
    """Average cosine similarity over the full cross product of two categories."""
    for name in (a, b):
        if name not in taxonomy.categories:
            raise ValueError(f"unknown category {name!r}")
    rows_a = _member_rows(space, taxonomy.categories[a])
    rows_b = _member_rows(space, taxonomy.categories[b])
    if not rows_a:
        raise ValueError(f"category {a!r} has no in-vocabulary words")
    if not rows_b:
        raise ValueError(f"category {b!r} has no in-vocabulary words")
    Ua = unit_rows(space.matrix[rows_a])
    Ub = unit_rows(space.matrix[rows_b])
    sims = np.clip(Ua @ Ub.T, -1.0, 1.0)
    return float(sims.mean())


@dataclass(frozen=True)
class SpaceReport:
    """One space's metrics: in-category report plus opposite-pair similarities."""

    label: str
    in_category: InCategoryReport
    opposite: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "in_category": {
                "per_category": self.in_category.per_category,
                "pair_counts": self.in_category.pair_counts,
                "pooled_mean": self.in_category.pooled_mean,
                "category_mean": self.in_category.category_mean,
            },
            "opposite": dict(self.opposite),
            "coverage": {
                name: {"found": found, "missing": missing}
                for name, (found, missing) in self.in_category.coverage.items()
            },
        }


def _pair_label(a: str, b: str) -> str:
    return f"{a} vs. {b}"


def report_space(
    space: VectorSpace,
    taxonomy: EmotionTaxonomy,
    label: str,
    pairs=OPPOSITE_CATEGORY_PAIRS,
) -> SpaceReport:
    in_cat = in_category_similarity(space, taxonomy)
    opposite = {
        _pair_label(a, b): opposite_similarity(space, taxonomy, a, b) for a, b in pairs
    }
    return SpaceReport(label=label, in_category=in_cat, opposite=opposite)


def relative_change(before: float, after: float) -> float | None:
    """Percent change from before to after; None when before is 0."""
    if before == 0.0:
        return None
    return (after - before) / abs(before) * 100.0


@dataclass(frozen=True)
class EvaluationComparison:
    """Before/after reports with per-metric deltas and relative changes."""

    before: SpaceReport
    after: SpaceReport
    taxonomy_source: str
    dropped_words: tuple[str, ...]

    def metric_pairs(self) -> dict[str, tuple[float, float]]:
        out = {
            "in_category_pooled": (
                self.before.in_category.pooled_mean,
                self.after.in_category.pooled_mean,
            ),
            "in_category_by_category": (
                self.before.in_category.category_mean,
                self.after.in_category.category_mean,
            ),
        }
        for key in self.before.opposite:
            if key in self.after.opposite:
                out[key] = (self.before.opposite[key], self.after.opposite[key])
        return out

    def to_dict(self) -> dict:
        metrics = {}
        for key, (b, a) in self.metric_pairs().items():
            metrics[key] = {
                "before": b,
                "after": a,
                "delta": a - b,
                "relative_change_pct": relative_change(b, a),
            }
        return {
            "taxonomy": self.taxonomy_source,
            "dropped_multiword": list(self.dropped_words),
            "metrics": metrics,
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
        }


def evaluate(
    before: VectorSpace,
    after: VectorSpace,
    taxonomy: EmotionTaxonomy | None = None,
    pairs=OPPOSITE_CATEGORY_PAIRS,
) -> EvaluationComparison:
    """Score both spaces and collect deltas, Table-2 style."""
    taxonomy = taxonomy or load_taxonomy()
    return EvaluationComparison(
        before=report_space(before, taxonomy, "before", pairs),
        after=report_space(after, taxonomy, "after", pairs),
        taxonomy_source=taxonomy.source,
        dropped_words=taxonomy.dropped,
    )


def write_report_json(path, comparison: EvaluationComparison) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(comparison.to_dict(), fh, indent=2)
        fh.write("\n")


def write_report_csv(path, comparison: EvaluationComparison, model: str = "model") -> None:
    """Flat model x metric x before/after table."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("model,metric,before,after,delta,relative_change_pct\n")
        for key, (b, a) in comparison.metric_pairs().items():
            rel = relative_change(b, a)
            rel_s = "" if rel is None else f"{rel:.4f}"
            fh.write(f"{model},{key},{b:.6f},{a:.6f},{a - b:.6f},{rel_s}\n")
