"""Directed weighted graphs, the random walk they induce, and trajectory simulation.

Node identifiers are strings; they are mapped once to dense indices 0..n-1
and every numerical routine works on indices.  Graphs, transition matrices,
stationary vectors and flows are immutable after construction.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DirectedGraph",
    "Trajectory",
    "check_strongly_connected",
    "transition_matrix",
    "stationary_distribution",
    "edge_flow",
    "flow_conservation_residual",
    "simulate",
    "read_edge_list",
    "write_edge_list",
    "read_trajectory",
    "write_trajectory",
]


class DirectedGraph:
    """Directed graph with strictly positive edge weights.

    Parameters
    ----------
    nodes : sequence of str
        Node identifiers, at least two, no duplicates.  Their order fixes
        the index space.
    edges : mapping (src, dst) -> weight
        Directed edges with weight > 0.  Self-loops are allowed; duplicate
        directed edges are not (aggregate before constructing).
    """

    def __init__(self, nodes, edges):
        nodes = tuple(str(v) for v in nodes)
        if len(nodes) < 2:
            raise ValueError("graph needs at least 2 nodes")
        if len(set(nodes)) != len(nodes):
            raise ValueError("duplicate node identifiers")
        self.nodes = nodes
        self._index = {v: i for i, v in enumerate(nodes)}
        edge_map = {}
        for (x, y), w in dict(edges).items():
            x, y = str(x), str(y)
            if x not in self._index or y not in self._index:
                raise ValueError(f"edge ({x}, {y}) references unknown node")
            w = float(w)
            if not np.isfinite(w) or w <= 0.0:
                raise ValueError(f"edge ({x}, {y}) has non-positive weight {w}")
            edge_map[(x, y)] = w
        if not edge_map:
            raise ValueError("graph has no edges")
        self.edges = edge_map

    @property
    def n(self) -> int:
        return len(self.nodes)

    def index(self, node: str) -> int:
        return self._index[node]

    def weight_matrix(self) -> np.ndarray:
        """Dense n x n matrix K with K[i, j] = weight of edge (i, j), 0 if absent."""
        K = np.zeros((self.n, self.n))
        for (x, y), w in self.edges.items():
            K[self._index[x], self._index[y]] = w
        return K

    def out_neighbors(self):
        """Per-node lists of successor indices, each sorted ascending."""
        succ = [[] for _ in range(self.n)]
        for (x, y) in self.edges:
            succ[self._index[x]].append(self._index[y])
        return [sorted(s) for s in succ]

    @classmethod
    def from_edge_list(cls, triples):
        """Build a graph from (src, dst, weight) triples.

        Duplicate directed edges are aggregated by summing their weights;
        nodes are taken in sorted order of their identifiers.
        """
        agg: dict[tuple[str, str], float] = {}
        names = set()
        for x, y, w in triples:
            x, y = str(x), str(y)
            names.add(x)
            names.add(y)
            agg[(x, y)] = agg.get((x, y), 0.0) + float(w)
        return cls(sorted(names), agg)

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, edges={len(self.edges)})"


@dataclass(frozen=True)
class Trajectory:
    """A realization of the walk as a sequence of node indices."""

    states: np.ndarray
    seed: int | None = None
    nodes: tuple[str, ...] | None = field(default=None, repr=False)

    @property
    def length(self) -> int:
        return int(self.states.shape[0])

    def as_ids(self):
        if self.nodes is None:
            return [str(int(s)) for s in self.states]
        return [self.nodes[int(s)] for s in self.states]


def check_strongly_connected(G: DirectedGraph) -> bool:
    """True iff a directed path exists between every ordered node pair."""
    succ = [[] for _ in range(G.n)]
    pred = [[] for _ in range(G.n)]
    for (x, y) in G.edges:
        i, j = G.index(x), G.index(y)
        succ[i].append(j)
        pred[j].append(i)

    def reaches_all(adj):
        seen = np.zeros(G.n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return bool(seen.all())

    return reaches_all(succ) and reaches_all(pred)


def transition_matrix(G: DirectedGraph) -> np.ndarray:
    """Row-stochastic walk matrix: each row of K divided by its out-weight.

    Rejects graphs with a sink or, more generally, graphs that are not
    strongly connected (the walk would not be ergodic).
    """
    K = G.weight_matrix()
    out = K.sum(axis=1)
    sinks = np.flatnonzero(out == 0.0)
    if sinks.size:
        raise ValueError(
            f"node {G.nodes[sinks[0]]!r} has zero out-degree (sink); "
            "the graph is not strongly connected"
        )
    if not check_strongly_connected(G):
        raise ValueError("graph is not strongly connected")
    return K / out[:, None]


def _stationary_dense(P: np.ndarray) -> np.ndarray:
    """Solve (P^T - Id) pi = 0 with sum(pi) = 1 by replacing one equation."""
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    pi = np.maximum(pi, 0.0)
    s = pi.sum()
    if s <= 0:
        raise RuntimeError("dense stationary solve produced a non-positive vector")
    return pi / s


def stationary_distribution(P: np.ndarray, tol: float = 1e-12,
                            max_iter: int = 1_000_000) -> np.ndarray:
    """Stationary distribution pi with pi^T P = pi^T.

    Power iteration until the l1 residual drops below `tol`.  Periodic or
    very slowly mixing chains stall the iteration; for matrices of up to
    2000 states we then fall back to a dense linear solve, otherwise a
    RuntimeError reports the residual.
    """
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    pi = np.full(n, 1.0 / n)
    res_prev = np.inf
    stalled = 0
    for _ in range(max_iter):
        nxt = pi @ P
        nxt /= nxt.sum()
        res = float(np.abs(nxt - pi).sum())
        pi = nxt
        if res <= tol:
            return pi
        # residual not shrinking geometrically: periodic chain or tiny gap
        if res > 0.5 * res_prev:
            stalled += 1
            if stalled >= 100 and n <= 2000:
                pi = _stationary_dense(P)
                _check_stationary(P, pi)
                return pi
        else:
            stalled = 0
        res_prev = res
    if n <= 2000:
        pi = _stationary_dense(P)
        _check_stationary(P, pi)
        return pi
    raise RuntimeError(
        f"power iteration did not converge: residual {res:.3e} after {max_iter} iterations"
    )


def _check_stationary(P, pi, bound=1e-8):
    res = float(np.abs(pi @ P - pi).sum())
    if res > bound:
        raise RuntimeError(f"stationary solve failed, residual {res:.3e}")


def edge_flow(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Stationary probability flow F[i, j] = pi[i] * P[i, j]."""
    return np.asarray(pi)[:, None] * np.asarray(P)


def flow_conservation_residual(F: np.ndarray) -> float:
    """Max over nodes of |inflow - outflow|; ~0 for a stationary flow."""
    return float(np.max(np.abs(F.sum(axis=0) - F.sum(axis=1))))


def simulate(P: np.ndarray, start: int, length: int, seed: int) -> Trajectory:
    """Simulate `length` states of the walk, starting at index `start`.

    Reproducible: the generator is numpy's PCG64 seeded with `seed`, and
    one uniform variate is consumed per step in trajectory order.
    """
    if length < 1:
        raise ValueError("trajectory length must be >= 1")
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    if not 0 <= start < n:
        raise ValueError(f"start index {start} out of range")
    rng = np.random.default_rng(seed)

    succ = []
    cums = []
    for i in range(n):
        idx = np.flatnonzero(P[i])
        if idx.size == 0:
            raise ValueError(f"state {i} has no successors")
        c = np.cumsum(P[i, idx])
        c /= c[-1]
        c[-1] = 1.0  # uniforms in [0,1) always land inside the row
        succ.append(idx.tolist())
        cums.append(c.tolist())

    out = np.empty(length, dtype=np.int32)
    out[0] = start
    x = start
    pos = 1
    remaining = length - 1
    while remaining > 0:
        m = min(remaining, 1_000_000)
        us = rng.random(m).tolist()
        chunk = [0] * m
        for j, u in enumerate(us):
            x = succ[x][bisect_right(cums[x], u)]
            chunk[j] = x
        out[pos:pos + m] = chunk
        pos += m
        remaining -= m
    return Trajectory(states=out, seed=seed)


def read_edge_list(path) -> DirectedGraph:
    """Read a graph from UTF-8 text, one `src<TAB>dst<TAB>weight` per line.

    Blank lines and lines starting with `#` are skipped.  Repeated directed
    edges are aggregated by summing their weights.
    """
    triples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected src<TAB>dst<TAB>weight")
            try:
                w = float(parts[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad weight {parts[2]!r}") from exc
            triples.append((parts[0], parts[1], w))
    if not triples:
        raise ValueError(f"{path}: no edges found")
    return DirectedGraph.from_edge_list(triples)


def write_edge_list(G: DirectedGraph, path) -> None:
    """Write the graph as TSV edge lines in node-index order."""
    lines = []
    for (x, y), w in sorted(G.edges.items(), key=lambda it: (G.index(it[0][0]), G.index(it[0][1]))):
        lines.append(f"{x}\t{y}\t{w!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory(path, nodes: tuple[str, ...] | None = None) -> Trajectory:
    """Read a trajectory file with one node id per line.

    If `nodes` is given the ids are mapped through it, otherwise the sorted
    set of observed ids fixes the index space.
    """
    ids = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            ids.append(line)
    if not ids:
        raise ValueError(f"{path}: empty trajectory")
    if nodes is None:
        nodes = tuple(sorted(set(ids)))
    index = {v: i for i, v in enumerate(nodes)}
    try:
        states = np.array([index[v] for v in ids], dtype=np.int32)
    except KeyError as exc:
        raise ValueError(f"{path}: unknown node id {exc.args[0]!r}") from exc
    return Trajectory(states=states, nodes=nodes)


def write_trajectory(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(traj.as_ids()) + "\n")
