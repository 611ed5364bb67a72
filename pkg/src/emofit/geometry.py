"""Cosine kernels and epsilon-ball neighborhoods over an embedding space.

Neighborhoods are computed once, on the original space, by blocked
all-pairs similarity against row-normalized copies of the matrix. The
block partition is fixed by ``block_size`` alone, so the result is
identical for any worker count.
"""

from __future__ import annotations

import hashlib
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from emofit.embedding_io import VectorSpace

CACHE_VERSION = 1


def _warn_zero_norm() -> None:
    # the warnings module shows this once per call site by default
    warnings.warn(
        "zero-norm vector in cosine similarity; treating similarity as 0",
        RuntimeWarning,
        stacklevel=3,
    )


def cosine_similarity(a, b) -> float:
    """dot(a, b) / (|a||b|), clamped to [-1, 1]; zero-norm inputs give 0."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        _warn_zero_norm()
        return 0.0
    s = float(a @ b) / (na * nb)
    return min(1.0, max(-1.0, s))


def cosine_distance(a, b) -> float:
    """1 - cosine_similarity(a, b); ranges over [0, 2]."""
    return 1.0 - cosine_similarity(a, b)


def rowwise_cosine(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Cosine similarity of A[i] with B[i] for every i, zero-norm rows giving 0."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    denom = np.linalg.norm(A, axis=1) * np.linalg.norm(B, axis=1)
    sims = np.einsum("ij,ij->i", A, B)
    out = np.zeros(len(sims))
    nonzero = denom > 0.0
    if not nonzero.all():
        _warn_zero_norm()
    out[nonzero] = sims[nonzero] / denom[nonzero]
    np.clip(out, -1.0, 1.0, out=out)
    return out


def unit_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-normalized float64 copy; zero-norm rows stay zero."""
    M = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(M, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return M / norms


class NeighborhoodGraph:
    """Per-row neighbor lists: j is a neighbor of i iff d(v_i, v_j) <= radius, j != i.

    Symmetric, self-loop free, and built on the pre-training space; it is
    never recomputed while training runs.
    """

    def __init__(self, neighbors, radius: float, validate: bool = True):
        self.radius = float(radius)
        self.neighbors = [
            np.unique(np.asarray(list(ns), dtype=np.int64)) for ns in neighbors
        ]
        if validate:
            self._validate()

    def _validate(self) -> None:
        n = len(self.neighbors)
        pairs = set()
        for i, ns in enumerate(self.neighbors):
            if len(ns) and (ns[0] < 0 or ns[-1] >= n):
                raise ValueError(f"row {i}: neighbor index out of range")
            if np.any(ns == i):
                raise ValueError(f"row {i}: self-loop")
            pairs.update((i, int(j)) for j in ns)
        for i, j in pairs:
            if (j, i) not in pairs:
                raise ValueError(f"asymmetric neighborhood: {i} -> {j} has no mirror")

    def __len__(self) -> int:
        return len(self.neighbors)

    @property
    def incidence_count(self) -> int:
        return int(sum(len(ns) for ns in self.neighbors))

    @property
    def edge_count(self) -> int:
        return self.incidence_count // 2

    def degrees(self) -> np.ndarray:
        return np.array([len(ns) for ns in self.neighbors], dtype=np.int64)

    def incidences(self) -> tuple[np.ndarray, np.ndarray]:
        """All directed (i, j in N(i)) index pairs, in row order."""
        lens = [len(ns) for ns in self.neighbors]
        total = sum(lens)
        if total == 0:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty
        I = np.repeat(np.arange(len(self.neighbors), dtype=np.int64), lens)
        J = np.concatenate([ns for ns in self.neighbors if len(ns)])
        return I, J


def _resolve_scope(scope, n: int) -> np.ndarray:
    if scope is None:
        return np.arange(n, dtype=np.int64)
    idx = np.unique(np.asarray(list(scope), dtype=np.int64))
    if idx.size == 0:
        raise ValueError("empty neighborhood scope")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValueError("scope row index out of range")
    return idx


def compute_neighborhoods(
    space: VectorSpace,
    radius: float,
    *,
    scope=None,
    workers: int = 1,
    block_size: int = 256,
) -> NeighborhoodGraph:
    """Epsilon-ball neighbor lists at cosine-distance ``radius``.

    ``scope`` restricts the graph to a row subset (edges only between
    scope members); None means the full vocabulary. Work is split into
    row blocks of fixed size and may run on several threads; the result
    is identical for any worker count.
    """
    if not 0.0 < radius <= 2.0:
        raise ValueError(f"radius must be in (0, 2], got {radius}")
    if workers < 1:
        raise ValueError("workers must be positive")
    n = len(space)
    idx = _resolve_scope(scope, n)
    m = idx.size
    Vn = unit_rows(space.matrix[idx])
    threshold = 1.0 - radius

    def block_edges(b0: int) -> tuple[np.ndarray, np.ndarray]:
        b1 = min(b0 + block_size, m)
        sims = Vn[b0:b1] @ Vn.T
        mask = sims >= threshold
        # keep strictly-upper pairs only; symmetry comes from mirroring
        cols = np.arange(m)
        mask &= cols[None, :] > (b0 + np.arange(b1 - b0))[:, None]
        ii, jj = np.nonzero(mask)
        return ii + b0, jj

    starts = range(0, m, block_size)
    if workers == 1:
        results = [block_edges(b0) for b0 in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(block_edges, starts))

    if results:
        ei = np.concatenate([r[0] for r in results])
        ej = np.concatenate([r[1] for r in results])
    else:
        ei = ej = np.empty(0, dtype=np.int64)
    gi = idx[ei]
    gj = idx[ej]

    # mirror the undirected edges, then group into per-row sorted lists
    src = np.concatenate([gi, gj])
    dst = np.concatenate([gj, gi])
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    bounds = np.searchsorted(src, np.arange(n + 1))
    neighbors = [dst[bounds[i] : bounds[i + 1]] for i in range(n)]
    return NeighborhoodGraph(neighbors, radius, validate=False)


def space_fingerprint(space: VectorSpace, radius: float) -> str:
    """Content hash tying a neighborhood graph to its matrix, tokens, and radius."""
    h = hashlib.sha256()
    h.update(f"{len(space)} {space.dim} {radius!r}".encode())
    h.update("\x00".join(space.tokens).encode())
    h.update(np.ascontiguousarray(space.matrix).tobytes())
    return h.hexdigest()


def save_neighbor_cache(path, graph: NeighborhoodGraph, space: VectorSpace) -> None:
    """Persist a graph keyed by the space + radius fingerprint."""
    lens = [len(ns) for ns in graph.neighbors]
    indptr = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    _, indices = graph.incidences()
    with open(path, "wb") as fh:
        np.savez(
            fh,
            version=np.int64(CACHE_VERSION),
            radius=np.float64(graph.radius),
            fingerprint=np.str_(space_fingerprint(space, graph.radius)),
            indptr=indptr,
            indices=indices,
        )


def load_neighbor_cache(path, space: VectorSpace, radius: float) -> NeighborhoodGraph:
    """Load a cached graph; raises ValueError if it was built for different inputs."""
    with np.load(path) as data:
        if int(data["version"]) != CACHE_VERSION:
            raise ValueError(f"unsupported neighborhood cache version in {path}")
        stored = str(data["fingerprint"].item())
        if stored != space_fingerprint(space, radius):
            raise ValueError(
                f"neighborhood cache {path} does not match this space and radius"
            )
        indptr = data["indptr"]
        indices = data["indices"]
    neighbors = [
        indices[indptr[i] : indptr[i + 1]] for i in range(len(indptr) - 1)
    ]
    return NeighborhoodGraph(neighbors, radius, validate=False)
