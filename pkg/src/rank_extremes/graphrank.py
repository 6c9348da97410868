"""Deterministic rank computation on explicit directed graphs.

Provides power-law random graph generation (configuration-model style on
the in-degrees), PageRank power iteration, the max-linear rank fixed
point, and random-walk first hitting times to top-ranked nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .errors import ConvergenceError, ParameterError
from .heavytail import InDegreeSpec, sample_power_law_int
from .rng import STREAMS, child_rng


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable directed graph in edge-array form.

    ``src[e] -> dst[e]`` for each edge ``e``.  Out-adjacency is stored CSR
    style (``out_indptr`` / ``out_targets``) for O(1) neighbor slices.
    """

    n: int
    src: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)
    out_degree: np.ndarray = field(repr=False)
    in_degree: np.ndarray = field(repr=False)
    out_indptr: np.ndarray = field(repr=False)
    out_targets: np.ndarray = field(repr=False)

    @classmethod
    def from_edges(cls, n: int, src, dst) -> "DirectedGraph":
        if n < 1:
            raise ParameterError(f"node count must be >= 1, got {n}")
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise ParameterError("src and dst must have equal length")
        if len(src) and (src.min() < 0 or src.max() >= n or dst.min() < 0 or dst.max() >= n):
            raise ParameterError("edge endpoints out of range")
        out_degree = np.bincount(src, minlength=n)
        in_degree = np.bincount(dst, minlength=n)
        order = np.argsort(src, kind="stable")
        out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(out_degree, out=out_indptr[1:])
        return cls(
            n=n,
            src=src,
            dst=dst,
            out_degree=out_degree,
            in_degree=in_degree,
            out_indptr=out_indptr,
            out_targets=dst[order],
        )

    @property
    def edge_count(self) -> int:
        return len(self.src)

    def out_neighbors(self, j: int) -> np.ndarray:
        return self.out_targets[self.out_indptr[j] : self.out_indptr[j + 1]]

    def write_edge_list(self, fileobj) -> None:
        """Plain text edge list, one ``src dst`` pair per line, 0-based ids."""
        for s, d in zip(self.src, self.dst):
            fileobj.write(f"{s} {d}\n")

    @classmethod
    def read_edge_list(cls, fileobj, n: int | None = None) -> "DirectedGraph":
        src, dst = [], []
        for line in fileobj:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            s, d = line.split()
            src.append(int(s))
            dst.append(int(d))
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if n is None:
            n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
        return cls.from_edges(n, src, dst)


@dataclass(frozen=True)
class RankVector:
    """Per-node scores with iteration diagnostics."""

    scores: np.ndarray
    iterations: int
    residual: float
    residuals: tuple[float, ...] = ()

    def top_nodes(self, count: int) -> np.ndarray:
        """Highest-scoring ``count`` node ids, ties broken by node index."""
        order = np.lexsort((np.arange(len(self.scores)), -self.scores))
        return order[:count]

    def write_csv(self, fileobj) -> None:
        fileobj.write("node_id,score\n")
        for i, s in enumerate(self.scores):
            fileobj.write(f"{i},{s:.17g}\n")


def _distinct_sources(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """``count`` distinct uniform node ids out of ``n`` (rejection-based)."""
    if count >= n:
        return np.arange(n, dtype=np.int64)
    picked = np.unique(rng.integers(0, n, size=count + max(4, count // 8)))
    while len(picked) < count:
        extra = rng.integers(0, n, size=count)
        picked = np.unique(np.concatenate([picked, extra]))
    rng.shuffle(picked)
    return picked[:count]


def gen_power_law_graph(n: int, alpha: float, seed: int) -> DirectedGraph:
    """Random digraph whose in-degrees follow the truncated power law.

    Target in-degrees are drawn from ``InDegreeSpec(alpha, n - 1)``; each
    node's sources are sampled uniformly without duplicate edges
    (configuration-model style).  Nodes left dangling receive one uniform
    out-edge so every out-degree is at least 1.
    """
    if n < 2:
        raise ParameterError(f"need at least 2 nodes, got {n}")
    spec = InDegreeSpec(alpha=alpha, n_max=n - 1)
    rng = child_rng(seed, STREAMS["graph"])
    degrees = sample_power_law_int(spec, n, seed, _rng=rng)
    src_parts = [_distinct_sources(rng, n, int(d)) for d in degrees]
    dst_parts = [np.full(int(d), i, dtype=np.int64) for i, d in enumerate(degrees)]
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    out_degree = np.bincount(src, minlength=n)
    dangling = np.flatnonzero(out_degree == 0)
    if len(dangling):
        repair_dst = rng.integers(0, n, size=len(dangling))
        src = np.concatenate([src, dangling])
        dst = np.concatenate([dst, repair_dst])
    return DirectedGraph.from_edges(n, src, dst)


def _validate_rank_inputs(g: DirectedGraph, c: float, q: np.ndarray, allow_c_one=False):
    c_ok = (0 < c <= 1) if allow_c_one else (0 < c < 1)
    if not c_ok:
        raise ParameterError(f"damping must be in (0, 1), got {c}")
    q = np.asarray(q, dtype=float)
    if q.shape != (g.n,):
        raise ParameterError(f"preference vector must have length {g.n}")
    if np.any(q < 0) or not np.isclose(q.sum(), 1.0, atol=1e-9):
        raise ParameterError("preference vector must be nonnegative and sum to 1")
    return q


def _transition_matrix(g: DirectedGraph) -> sparse.csr_matrix:
    """Column-stochastic matrix with entry ``1/D_src`` for each edge."""
    inv_d = np.zeros(g.n)
    nonzero = g.out_degree > 0
    inv_d[nonzero] = 1.0 / g.out_degree[nonzero]
    return sparse.csr_matrix(
        (inv_d[g.src], (g.dst, g.src)), shape=(g.n, g.n), dtype=float
    )


def pagerank(
    g: DirectedGraph,
    c: float,
    q,
    tol: float = 1e-12,
    max_iter: int = 1000,
) -> RankVector:
    """PageRank by power iteration: ``R <- c * A R + (1 - c) q``.

    ``A`` is the column-stochastic out-link matrix, so the iteration is a
    contraction with factor ``c`` and the result is a probability vector.
    Raises :class:`ConvergenceError` when ``max_iter`` is exhausted.
    """
    q = _validate_rank_inputs(g, c, q)
    a = _transition_matrix(g)
    r = q.copy()
    base = (1.0 - c) * q
    residuals = []
    for it in range(1, max_iter + 1):
        r_new = c * (a @ r) + base
        # L1 residual: the iteration is a c-contraction in this norm
        # because the transition matrix is column-substochastic.
        resid = float(np.sum(np.abs(r_new - r)))
        residuals.append(resid)
        r = r_new
        if resid < tol:
            return RankVector(scores=r, iterations=it, residual=resid,
                              residuals=tuple(residuals))
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations",
        residual=residuals[-1],
        iterations=max_iter,
    )


def max_linear_rank(
    g: DirectedGraph,
    c: float,
    q,
    tol: float = 1e-12,
    max_iter: int = 1000,
) -> RankVector:
    """Minimal fixed point of ``R_i = max_j (c/D_j) R_j  v  (1-c) q_i``.

    Starts at the preference floor ``(1 - c) q`` and iterates the monotone
    max-linear map; the sequence is componentwise non-decreasing and
    bounded, hence convergent.
    """
    q = _validate_rank_inputs(g, c, q)
    inv_d = np.zeros(g.n)
    nonzero = g.out_degree > 0
    inv_d[nonzero] = 1.0 / g.out_degree[nonzero]
    edge_w = c * inv_d[g.src]
    floor = (1.0 - c) * q
    r = floor.copy()
    residuals = []
    for it in range(1, max_iter + 1):
        r_new = floor.copy()
        np.maximum.at(r_new, g.dst, edge_w * r[g.src])
        np.maximum(r_new, r, out=r_new)  # monotone by construction; cheap guard
        resid = float(np.max(np.abs(r_new - r)))
        residuals.append(resid)
        r = r_new
        if resid < tol:
            return RankVector(scores=r, iterations=it, residual=resid,
                              residuals=tuple(residuals))
    raise ConvergenceError(
        f"max-linear iteration did not reach tol={tol} in {max_iter} iterations",
        residual=residuals[-1],
        iterations=max_iter,
    )


@dataclass(frozen=True)
class HittingTimes:
    """First hitting times of the top-ranked target set."""

    times: np.ndarray
    mean: float
    median: float
    target_size: int


def random_walk_hitting(
    g: DirectedGraph,
    c: float,
    ranks: RankVector,
    top_p: float,
    trials: int,
    seed: int,
    q=None,
    start: int | None = None,
    max_steps: int = 1_000_000,
) -> HittingTimes:
    """Steps a PageRank surfer needs to first enter the top-ranked set.

    The target set holds the ``floor(top_p * n)`` highest-ranked nodes
    (ties by node index).  The walk follows a uniform out-edge with
    probability ``c`` and teleports to a ``q``-distributed node otherwise;
    the start node (``q``-distributed unless ``start`` is given) counts as
    step 0.  ``c = 1`` (no teleportation) is allowed for deterministic
    tests only.
    """
    if not (0 < top_p < 1):
        raise ParameterError(f"top_p must be in (0, 1), got {top_p}")
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    m = int(top_p * g.n)
    if m == 0:
        raise ParameterError(f"top_p={top_p} yields an empty target set on n={g.n}")
    if q is None:
        q = np.full(g.n, 1.0 / g.n)
    q = _validate_rank_inputs(g, c, q, allow_c_one=True)
    if np.any(g.out_degree == 0):
        raise ParameterError("walk requires out-degree >= 1 for every node")

    in_target = np.zeros(g.n, dtype=bool)
    in_target[ranks.top_nodes(m)] = True

    rng = child_rng(seed, STREAMS["walk"])
    cum_q = np.cumsum(q)
    cum_q[-1] = 1.0

    def draw_q(size):
        return np.searchsorted(cum_q, rng.random(size), side="right")

    if start is None:
        pos = draw_q(trials).astype(np.int64)
    else:
        if not (0 <= start < g.n):
            raise ParameterError(f"start node {start} out of range")
        pos = np.full(trials, start, dtype=np.int64)
    times = np.full(trials, -1, dtype=np.int64)
    active = np.arange(trials)
    step = 0
    while len(active):
        hit = in_target[pos[active]]
        times[active[hit]] = step
        active = active[~hit]
        if not len(active):
            break
        if step >= max_steps:
            raise ConvergenceError(
                f"{len(active)} walks did not hit the target in {max_steps} steps"
            )
        cur = pos[active]
        teleport = rng.random(len(active)) >= c
        follow = ~teleport
        if np.any(follow):
            nodes = cur[follow]
            offsets = (rng.random(len(nodes)) * g.out_degree[nodes]).astype(np.int64)
            pos[active[follow]] = g.out_targets[g.out_indptr[nodes] + offsets]
        if np.any(teleport):
            pos[active[teleport]] = draw_q(int(np.count_nonzero(teleport)))
        step += 1
    return HittingTimes(
        times=times,
        mean=float(times.mean()),
        median=float(np.median(times)),
        target_size=m,
    )
