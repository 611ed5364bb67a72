"""Load and save word-embedding spaces in the common text formats.

Two formats are supported: ``glove`` (one ``<token> <v1> ... <vd>`` record
per line) and ``word2vec`` (the same body preceded by an ``<n> <d>`` header
line). Values are written with the shortest decimal representation that
round-trips 32-bit floats, so a save/load cycle is bit-stable.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

FORMATS = ("glove", "word2vec")


class EmbeddingParseError(ValueError):
    """An embedding file that cannot be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class LoadReport:
    """What happened while loading: kept rows and skipped duplicate lines."""

    path: str
    rows_kept: int
    duplicates_skipped: int
    lowercased: bool


class VectorSpace:
    """A vocabulary-indexed dense matrix of word vectors.

    Tokens are unique, the matrix is float32 with one row per token, and
    every entry is finite. Instances are immutable after construction
    (the matrix is marked read-only); operations that change vectors
    return a new space.
    """

    def __init__(self, tokens, matrix):
        matrix = np.array(matrix, dtype=np.float32, copy=True)
        if matrix.ndim != 2:
            raise ValueError(f"matrix must be 2-dimensional, got shape {matrix.shape}")
        if matrix.shape[1] < 1:
            raise ValueError("vector dimension must be at least 1")
        tokens = [str(t) for t in tokens]
        if len(tokens) != matrix.shape[0]:
            raise ValueError(
                f"{len(tokens)} tokens but {matrix.shape[0]} matrix rows"
            )
        if matrix.size and not np.isfinite(matrix).all():
            bad = int(np.flatnonzero(~np.isfinite(matrix).all(axis=1))[0])
            raise ValueError(f"non-finite values in row {bad} ({tokens[bad]!r})")
        index: dict[str, int] = {}
        for i, tok in enumerate(tokens):
            if tok in index:
                raise ValueError(f"duplicate token {tok!r}")
            index[tok] = i
        matrix.setflags(write=False)
        self.tokens = tokens
        self.index = index
        self.matrix = matrix
        self.load_report: LoadReport | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def row(self, token: str) -> int:
        try:
            return self.index[token]
        except KeyError:
            raise KeyError(f"token {token!r} not in vocabulary") from None

    def vector(self, token: str) -> np.ndarray:
        return self.matrix[self.row(token)]

    def with_matrix(self, matrix) -> "VectorSpace":
        """New space with the same vocabulary and a replacement matrix."""
        return VectorSpace(self.tokens, matrix)

    def __repr__(self) -> str:
        return f"VectorSpace(n={len(self)}, dim={self.dim})"


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown embedding format {fmt!r}; expected one of {FORMATS}")


def _parse_row(parts: list[str], dim: int, line_no: int) -> np.ndarray:
    if len(parts) != dim + 1:
        raise EmbeddingParseError(
            f"expected 1 token and {dim} values, found {len(parts)} fields", line_no
        )
    try:
        values = np.array([float(p) for p in parts[1:]], dtype=np.float32)
    except ValueError:
        raise EmbeddingParseError("field is not a number", line_no) from None
    # float32 cast also turns out-of-range float64 values into inf
    if not np.isfinite(values).all():
        raise EmbeddingParseError("non-finite value", line_no)
    return values


def load_embeddings(path, fmt: str = "glove", *, lowercase: bool = False) -> VectorSpace:
    """Read a text embedding file into a :class:`VectorSpace`.

    Rows keep file order. Duplicate tokens (after optional lowercasing)
    keep the first occurrence; the rest are counted in the attached
    ``load_report``. Malformed lines, dimension mismatches, and
    non-finite values raise :class:`EmbeddingParseError` with the line
    number.
    """
    _check_format(fmt)
    path = Path(path)
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    duplicates = 0
    dim: int | None = None
    header_n: int | None = None
    body_lines = 0

    with open(path, encoding="utf-8") as fh:
        lines = enumerate(fh, start=1)
        if fmt == "word2vec":
            first = next(lines, None)
            if first is None:
                raise EmbeddingParseError("empty embedding file")
            line_no, line = first
            parts = line.split()
            try:
                if len(parts) != 2:
                    raise ValueError
                header_n, dim = int(parts[0]), int(parts[1])
            except ValueError:
                raise EmbeddingParseError(
                    "expected '<n> <d>' header line", line_no
                ) from None
            if header_n < 1 or dim < 1:
                raise EmbeddingParseError("header counts must be positive", line_no)
        for line_no, line in lines:
            parts = line.split()
            if dim is None:
                if len(parts) < 2:
                    raise EmbeddingParseError(
                        "expected 1 token and at least 1 value", line_no
                    )
                dim = len(parts) - 1
            body_lines += 1
            values = _parse_row(parts, dim, line_no)
            token = parts[0].lower() if lowercase else parts[0]
            if token in seen:
                duplicates += 1
                continue
            seen.add(token)
            tokens.append(token)
            rows.append(values)

    if header_n is not None and body_lines != header_n:
        raise EmbeddingParseError(
            f"header declares {header_n} rows but file has {body_lines}"
        )
    if not tokens:
        raise EmbeddingParseError("empty embedding file")

    space = VectorSpace(tokens, np.vstack(rows))
    space.load_report = LoadReport(
        path=str(path),
        rows_kept=len(tokens),
        duplicates_skipped=duplicates,
        lowercased=lowercase,
    )
    if duplicates:
        logger.info("%s: skipped %d duplicate token lines", path, duplicates)
    return space


def save_embeddings(space: VectorSpace, path, fmt: str = "glove") -> None:
    """Write ``space`` so that :func:`load_embeddings` reproduces it exactly.

    Refuses to write an empty vocabulary. Row order equals token order.
    """
    _check_format(fmt)
    if len(space) == 0:
        raise ValueError("refusing to write an empty vector space")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if fmt == "word2vec":
            fh.write(f"{len(space)} {space.dim}\n")
        for token, row in zip(space.tokens, space.matrix):
            # str() of a float32 scalar is the shortest round-tripping form
            fh.write(token + " " + " ".join(str(v) for v in row) + "\n")
