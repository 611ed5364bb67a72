from pathlib import Path

import numpy as np
import pytest

from emofit.embedding_io import VectorSpace

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


def make_space(vectors: dict[str, list[float]]) -> VectorSpace:
    tokens = list(vectors)
    return VectorSpace(tokens, np.array([vectors[t] for t in tokens], dtype=np.float32))
