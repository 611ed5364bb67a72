"""Objective terms, analytic gradients, and the descent loop.

Three terms make up the objective over the retrofitted space V':

* attract: sum over positive pairs of max(0, d(v'_u, v'_w)),
* repel:   sum over negative pairs of max(0, 1 - d(v'_u, v'_w)),
* shape:   sum over i, j in N(i) of max(0, |d(v'_i, v'_j) - d(v_i, v_j)|),

with d the cosine distance and N(i) the epsilon-ball neighborhoods of
the original space V. The total is the plain (optionally weighted) sum.

Gradients come from the cosine-distance differential
``grad_x d(x, y) = s * x / |x|^2 - y / (|x||y|)`` with s the cosine
similarity; the subgradient at every hinge kink and at |.| = 0 is 0, and
zero-norm rows get zero gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from emofit.embedding_io import VectorSpace
from emofit.geometry import NeighborhoodGraph, rowwise_cosine
from emofit.lexicon import ConstraintSet

MODES = ("sgd", "batch")
VSP_SCOPES = ("constrained", "all")


class NumericalInstabilityError(RuntimeError):
    """Training produced a non-finite value; names the epoch and row."""


@dataclass
class TrainingConfig:
    epochs: int = 20
    learning_rate: float = 0.05
    radius: float = 0.2
    seed: int = 0
    freeze_anchors: bool = False
    vsp_scope: str = "constrained"
    threads: int = 1
    mode: str = "sgd"
    pr_weight: float = 1.0
    nr_weight: float = 1.0
    vsp_weight: float = 1.0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be at least 1, got {self.epochs}")
        if not self.learning_rate > 0.0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if not 0.0 < self.radius <= 2.0:
            raise ValueError(f"radius must be in (0, 2], got {self.radius}")
        if self.threads < 1:
            raise ValueError(f"thread count must be positive, got {self.threads}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.vsp_scope not in VSP_SCOPES:
            raise ValueError(
                f"vsp scope must be one of {VSP_SCOPES}, got {self.vsp_scope!r}"
            )
        for name in ("pr_weight", "nr_weight", "vsp_weight"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Per-term objective values; total is pr + nr + vsp in that order."""

    pr: float
    nr: float
    vsp: float
    total: float

    def csv_row(self, epoch: int) -> str:
        return f"{epoch},{self.pr!r},{self.nr!r},{self.vsp!r},{self.total!r}"


def _pairs_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"pairs must be (k, 2) index pairs, got shape {arr.shape}")
    return arr


def _pair_distances(M: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    return 1.0 - rowwise_cosine(M[pairs[:, 0]], M[pairs[:, 1]])


def pr_term(space_prime: VectorSpace, pairs) -> float:
    """Attract objective: sum of max(0, d) over the positive pairs."""
    pairs = _pairs_array(pairs)
    if len(pairs) == 0:
        return 0.0
    d = _pair_distances(space_prime.matrix.astype(np.float64), pairs)
    return float(np.maximum(0.0, d).sum())


def nr_term(space_prime: VectorSpace, pairs) -> float:
    """Repel objective: sum of max(0, 1 - d) over the negative pairs."""
    pairs = _pairs_array(pairs)
    if len(pairs) == 0:
        return 0.0
    d = _pair_distances(space_prime.matrix.astype(np.float64), pairs)
    return float(np.maximum(0.0, 1.0 - d).sum())


def vsp_term(
    space: VectorSpace, space_prime: VectorSpace, graph: NeighborhoodGraph
) -> float:
    """Shape-preservation objective over the original-space neighborhoods."""
    if space.tokens != space_prime.tokens or space.dim != space_prime.dim:
        raise ValueError("original and retrofitted spaces must share the vocabulary")
    I, J = graph.incidences()
    if len(I) == 0:
        return 0.0
    V = space.matrix.astype(np.float64)
    P = space_prime.matrix.astype(np.float64)
    d_old = 1.0 - rowwise_cosine(V[I], V[J])
    d_new = 1.0 - rowwise_cosine(P[I], P[J])
    return float(np.maximum(0.0, np.abs(d_new - d_old)).sum())


def objective(
    space: VectorSpace,
    space_prime: VectorSpace,
    s_pairs,
    o_pairs,
    graph: NeighborhoodGraph,
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> ObjectiveBreakdown:
    """All three terms and their sum. With non-unit weights the fields hold
    the weighted contributions so that total stays the exact field sum."""
    pr = weights[0] * pr_term(space_prime, s_pairs)
    nr = weights[1] * nr_term(space_prime, o_pairs)
    vsp = weights[2] * vsp_term(space, space_prime, graph)
    return ObjectiveBreakdown(pr=pr, nr=nr, vsp=vsp, total=pr + nr + vsp)


def _distance_grads(
    M: np.ndarray, a: np.ndarray, b: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-pair gradient of d(M[a], M[b]) w.r.t. both endpoints.

    Returns (d, grad_a, grad_b); zero-norm endpoints yield zero gradients
    and distance 1 under the zero-similarity convention.
    """
    X = M[a]
    Y = M[b]
    nx = np.linalg.norm(X, axis=1)
    ny = np.linalg.norm(Y, axis=1)
    ok = (nx > 0.0) & (ny > 0.0)
    safe_nx = np.where(ok, nx, 1.0)
    safe_ny = np.where(ok, ny, 1.0)
    s = np.einsum("ij,ij->i", X, Y) / (safe_nx * safe_ny)
    np.clip(s, -1.0, 1.0, out=s)
    s = np.where(ok, s, 0.0)
    inv_xy = np.where(ok, 1.0 / (safe_nx * safe_ny), 0.0)
    ga = (np.where(ok, s / safe_nx**2, 0.0))[:, None] * X - inv_xy[:, None] * Y
    gb = (np.where(ok, s / safe_ny**2, 0.0))[:, None] * Y - inv_xy[:, None] * X
    return 1.0 - s, ga, gb


def _gradient_array(
    P: np.ndarray,
    s_pairs: np.ndarray,
    o_pairs: np.ndarray,
    I: np.ndarray,
    J: np.ndarray,
    d_orig: np.ndarray,
    weights: tuple[float, float, float],
) -> np.ndarray:
    G = np.zeros_like(P)
    if len(s_pairs):
        d, ga, gb = _distance_grads(P, s_pairs[:, 0], s_pairs[:, 1])
        active = (d > 0.0).astype(np.float64) * weights[0]
        np.add.at(G, s_pairs[:, 0], active[:, None] * ga)
        np.add.at(G, s_pairs[:, 1], active[:, None] * gb)
    if len(o_pairs):
        d, ga, gb = _distance_grads(P, o_pairs[:, 0], o_pairs[:, 1])
        active = (d < 1.0).astype(np.float64) * -weights[1]
        np.add.at(G, o_pairs[:, 0], active[:, None] * ga)
        np.add.at(G, o_pairs[:, 1], active[:, None] * gb)
    if len(I):
        d, ga, gb = _distance_grads(P, I, J)
        sign = np.sign(d - d_orig) * weights[2]
        np.add.at(G, I, sign[:, None] * ga)
        np.add.at(G, J, sign[:, None] * gb)
    return G


def gradient(
    space: VectorSpace,
    space_prime: VectorSpace,
    s_pairs,
    o_pairs,
    graph: NeighborhoodGraph,
    *,
    freeze_rows: Sequence[int] = (),
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> np.ndarray:
    """Analytic gradient of the total objective for every row of V'.

    Hinge kinks and exact shape matches take subgradient 0; rows in
    ``freeze_rows`` come back as zero rows.
    """
    if space.tokens != space_prime.tokens or space.dim != space_prime.dim:
        raise ValueError("original and retrofitted spaces must share the vocabulary")
    s_pairs = _pairs_array(s_pairs)
    o_pairs = _pairs_array(o_pairs)
    I, J = graph.incidences()
    V = space.matrix.astype(np.float64)
    P = space_prime.matrix.astype(np.float64)
    d_orig = 1.0 - rowwise_cosine(V[I], V[J]) if len(I) else np.empty(0)
    G = _gradient_array(P, s_pairs, o_pairs, I, J, d_orig, weights)
    freeze = list(freeze_rows)
    if freeze:
        G[freeze] = 0.0
    return G


def _breakdown(
    W: np.ndarray,
    s_pairs: np.ndarray,
    o_pairs: np.ndarray,
    I: np.ndarray,
    J: np.ndarray,
    d_orig: np.ndarray,
    weights: tuple[float, float, float],
) -> ObjectiveBreakdown:
    pr = nr = vsp = 0.0
    if len(s_pairs):
        d = _pair_distances(W, s_pairs)
        pr = weights[0] * float(np.maximum(0.0, d).sum())
    if len(o_pairs):
        d = _pair_distances(W, o_pairs)
        nr = weights[1] * float(np.maximum(0.0, 1.0 - d).sum())
    if len(I):
        d_new = 1.0 - rowwise_cosine(W[I], W[J])
        vsp = weights[2] * float(np.maximum(0.0, np.abs(d_new - d_orig)).sum())
    return ObjectiveBreakdown(pr=pr, nr=nr, vsp=vsp, total=pr + nr + vsp)


def _check_finite(W: np.ndarray, epoch: int, tokens: list[str]) -> None:
    if np.isfinite(W).all():
        return
    row = int(np.flatnonzero(~np.isfinite(W).all(axis=1))[0])
    raise NumericalInstabilityError(
        f"non-finite values at epoch {epoch} in row {row} ({tokens[row]!r}); "
        "lower the learning rate"
    )


def _sgd_epoch(
    W: np.ndarray,
    kinds: np.ndarray,
    ua: np.ndarray,
    wa: np.ndarray,
    d_ref: np.ndarray,
    order: np.ndarray,
    lr: float,
    frozen: np.ndarray,
    weights: tuple[float, float, float],
) -> None:
    w_pr, w_nr, w_vsp = weights
    for t in order:
        u = ua[t]
        w = wa[t]
        if u == w:
            continue  # both endpoints the same row: every term is constant
        x = W[u]
        y = W[w]
        nx = math.sqrt(float(x @ x))
        ny = math.sqrt(float(y @ y))
        if nx == 0.0 or ny == 0.0:
            continue
        s = float(x @ y) / (nx * ny)
        s = min(1.0, max(-1.0, s))
        kind = kinds[t]
        if kind == 0:  # attract: descend d; inactive exactly at d == 0
            if s >= 1.0:
                continue
            coef = w_pr
        elif kind == 1:  # repel: descend 1 - d; inactive once d >= 1
            if s <= 0.0:
                continue
            coef = -w_nr
        else:  # shape: descend |d - d_ref|
            delta = (1.0 - s) - d_ref[t]
            if delta == 0.0:
                continue
            coef = w_vsp if delta > 0.0 else -w_vsp
        step = lr * coef
        gx = (s / (nx * nx)) * x - y / (nx * ny)
        gy = (s / (ny * ny)) * y - x / (nx * ny)
        if not frozen[u]:
            W[u] = x - step * gx
        if not frozen[w]:
            W[w] = y - step * gy


def train(
    space: VectorSpace,
    constraints: ConstraintSet,
    graph: NeighborhoodGraph,
    config: TrainingConfig,
    *,
    epoch_callback: Callable[[int, np.ndarray, ObjectiveBreakdown], None] | None = None,
) -> tuple[VectorSpace, list[ObjectiveBreakdown]]:
    """Descend the objective and return (V', per-epoch breakdown log).

    In ``sgd`` mode every positive pair, negative pair, and neighborhood
    incidence is one update, applied in a seeded-shuffle order that
    interleaves all three streams each epoch. ``batch`` mode takes one
    full-gradient step per epoch and halves the learning rate (reverting
    the step) whenever the objective would increase, which makes the log
    non-increasing. Runs are bit-reproducible for a fixed seed with
    ``threads = 1``.
    """
    if len(graph) != len(space):
        raise ValueError("neighborhood graph was built for a different space")
    V = space.matrix.astype(np.float64)
    W = V.copy()
    s_pairs = constraints.positive
    o_pairs = constraints.negative
    I, J = graph.incidences()
    d_orig = 1.0 - rowwise_cosine(V[I], V[J]) if len(I) else np.empty(0)
    weights = (config.pr_weight, config.nr_weight, config.vsp_weight)

    frozen = np.zeros(len(space), dtype=bool)
    if config.freeze_anchors:
        frozen[constraints.anchor_rows()] = True

    rng = np.random.default_rng(config.seed)
    log: list[ObjectiveBreakdown] = []

    if config.mode == "batch":
        lr = config.learning_rate
        current = _breakdown(W, s_pairs, o_pairs, I, J, d_orig, weights)
        for epoch in range(1, config.epochs + 1):
            G = _gradient_array(W, s_pairs, o_pairs, I, J, d_orig, weights)
            G[frozen] = 0.0
            candidate = W - lr * G
            cand = _breakdown(candidate, s_pairs, o_pairs, I, J, d_orig, weights)
            if cand.total > current.total:
                lr *= 0.5  # reject the step, retry smaller next epoch
            else:
                W = candidate
                current = cand
            _check_finite(W, epoch, space.tokens)
            log.append(current)
            if epoch_callback is not None:
                epoch_callback(epoch, W, current)
    else:
        kinds = np.concatenate(
            [
                np.zeros(len(s_pairs), dtype=np.int8),
                np.ones(len(o_pairs), dtype=np.int8),
                np.full(len(I), 2, dtype=np.int8),
            ]
        )
        ua = np.concatenate([s_pairs[:, 0], o_pairs[:, 0], I])
        wa = np.concatenate([s_pairs[:, 1], o_pairs[:, 1], J])
        d_ref = np.concatenate([np.zeros(len(s_pairs) + len(o_pairs)), d_orig])
        for epoch in range(1, config.epochs + 1):
            order = rng.permutation(len(kinds))
            _sgd_epoch(
                W, kinds, ua, wa, d_ref, order, config.learning_rate, frozen, weights
            )
            _check_finite(W, epoch, space.tokens)
            entry = _breakdown(W, s_pairs, o_pairs, I, J, d_orig, weights)
            log.append(entry)
            if epoch_callback is not None:
                epoch_callback(epoch, W, entry)

    result = VectorSpace(space.tokens, W.astype(np.float32))
    return result, log


def write_epoch_log(path, log: Sequence[ObjectiveBreakdown]) -> None:
    """Line-oriented CSV of the per-epoch objective: epoch, pr, nr, vsp, total."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,pr,nr,vsp,total\n")
        for epoch, entry in enumerate(log, start=1):
            fh.write(entry.csv_row(epoch) + "\n")
