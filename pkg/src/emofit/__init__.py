"""Retrofit pre-trained word embeddings with emotional constraints.

The pipeline: load a vector space, extract attract/repel constraints
from a word-level emotion lexicon via the opposite-emotion wheel, pin
down epsilon-ball neighborhoods of the original space, descend the
combined attract + repel + shape-preservation objective, and score the
result with in-category and opposite-category similarity metrics.
"""

from emofit.embedding_io import (
    EmbeddingParseError,
    LoadReport,
    VectorSpace,
    load_embeddings,
    save_embeddings,
)
from emofit.evaluation import (
    EmotionTaxonomy,
    EvaluationComparison,
    evaluate,
    in_category_similarity,
    load_taxonomy,
    opposite_similarity,
)
from emofit.geometry import (
    NeighborhoodGraph,
    compute_neighborhoods,
    cosine_distance,
    cosine_similarity,
)
from emofit.lexicon import (
    ConstraintSet,
    EmotionWheel,
    LexiconEntry,
    LexiconParseError,
    build_constraints,
    parse_nrc_lexicon,
)
from emofit.trainer import (
    NumericalInstabilityError,
    ObjectiveBreakdown,
    TrainingConfig,
    gradient,
    nr_term,
    objective,
    pr_term,
    train,
    vsp_term,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintSet",
    "EmbeddingParseError",
    "EmotionTaxonomy",
    "EmotionWheel",
    "EvaluationComparison",
    "LexiconEntry",
    "LexiconParseError",
    "LoadReport",
    "NeighborhoodGraph",
    "NumericalInstabilityError",
    "ObjectiveBreakdown",
    "TrainingConfig",
    "VectorSpace",
    "build_constraints",
    "compute_neighborhoods",
    "cosine_distance",
    "cosine_similarity",
    "evaluate",
    "gradient",
    "in_category_similarity",
    "load_embeddings",
    "load_taxonomy",
    "nr_term",
    "objective",
    "opposite_similarity",
    "parse_nrc_lexicon",
    "pr_term",
    "save_embeddings",
    "train",
    "vsp_term",
    "__version__",
]
