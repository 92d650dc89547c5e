"""Decomposing the stationary edge flow into weighted simple cycles.

Two decomposers are provided.  `sample_decomposition` extracts cycles from a
walk realization with a loop-erasing auxiliary chain; its weights converge to
the per-step cycle completion frequencies of the walk, the decomposition that
also carries the information-transport interpretation downstream.
`iterative_decomposition` peels cycles off the exact flow deterministically;
it reproduces the flow exactly but its weights are a different, algorithm-
dependent solution of the same flow equations whenever cycles share edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graph import Trajectory

__all__ = [
    "Cycle",
    "canonical_cycle",
    "reverse_cycle",
    "CycleDecomposition",
    "sample_decomposition",
    "merge_decompositions",
    "iterative_decomposition",
    "verify_flow_decomposition",
    "decomposition_to_json",
]

# A cycle is a tuple of distinct node indices, canonically rotated so the
# smallest index comes first.  Rotations are identified; reversals are not.
Cycle = tuple[int, ...]


def canonical_cycle(seq) -> Cycle:
    """Canonical rotation of a simple cycle: smallest node index first."""
    seq = tuple(int(v) for v in seq)
    if not seq:
        raise ValueError("empty cycle")
    if len(set(seq)) != len(seq):
        raise ValueError(f"not a simple cycle: {seq}")
    k = seq.index(min(seq))
    return seq[k:] + seq[:k]


def reverse_cycle(cycle: Cycle) -> Cycle:
    """The same cycle walked in the opposite orientation, re-canonicalized."""
    cycle = canonical_cycle(cycle)
    return canonical_cycle((cycle[0],) + tuple(reversed(cycle[1:])))


@dataclass(frozen=True)
class CycleDecomposition:
    """A collection of simple cycles with strictly positive weights.

    `kind` records the provenance ("sampled" or "iterative"); sampled
    decompositions also carry the per-cycle completion counts and the
    trajectory length T used to normalize them.
    """

    weights: dict
    kind: str
    n_nodes: int
    counts: dict | None = None
    T: int | None = None
    tol: float | None = None
    nodes: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        for c, w in self.weights.items():
            if w <= 0.0:
                raise ValueError(f"cycle {c} has non-positive weight {w}")

    @property
    def cycles(self) -> list[Cycle]:
        """Cycles in canonical (lexicographic) order; fixes matrix columns."""
        return sorted(self.weights)

    def weight(self, cycle) -> float:
        return self.weights.get(canonical_cycle(cycle), 0.0)

    def node_mass(self) -> np.ndarray:
        """Per-node sum of weights of the cycles through it (~ stationary mass)."""
        s = np.zeros(self.n_nodes)
        for c, w in self.weights.items():
            for x in c:
                s[x] += w
        return s

    def covered_nodes(self) -> np.ndarray:
        covered = np.zeros(self.n_nodes, dtype=bool)
        for c in self.weights:
            covered[list(c)] = True
        return covered

    def node_ids(self, cycle: Cycle):
        if self.nodes is None:
            return [str(v) for v in cycle]
        return [self.nodes[v] for v in cycle]


def sample_decomposition(traj: Trajectory, n_nodes: int | None = None) -> CycleDecomposition:
    """Cycle counts of a walk realization, by loop erasure.

    An auxiliary chain holds the loop-erased past of the walk.  Each new
    state is appended; when the current state X_i already sits at position p
    of the chain, the segment after p closed a cycle: it is recorded as
    (X_i, eta_{p+1}, ..., eta_l) and erased, leaving the chain ending at X_i.
    Weights are completion counts divided by the trajectory length.

    Parameters
    ----------
    traj : Trajectory
        Walk realization (indices).  Must have at least 2 states.
    n_nodes : int, optional
        Size of the index space; defaults to len(traj.nodes) or max index + 1.
    """
    T = traj.length
    if T < 2:
        raise ValueError("trajectory must contain at least 2 states")
    states = traj.states.tolist()
    if n_nodes is None:
        n_nodes = len(traj.nodes) if traj.nodes is not None else max(states) + 1

    counts: dict[Cycle, int] = {}
    first = states[0]
    eta = [first]
    pos = {first: 0}
    for x in states[1:]:
        p = pos.get(x)
        if p is None:
            pos[x] = len(eta)
            eta.append(x)
            continue
        tail = eta[p + 1:]
        cyc = canonical_cycle((x, *tail))
        counts[cyc] = counts.get(cyc, 0) + 1
        for y in tail:
            del pos[y]
        del eta[p + 1:]
        # the chain still ends at the walker's current node x (position p)
    # each step closes at most one cycle, so the counted steps cannot exceed T
    assert sum(k * len(c) for c, k in counts.items()) <= T
    weights = {c: k / T for c, k in counts.items()}
    return CycleDecomposition(weights=weights, counts=counts, kind="sampled",
                              T=T, n_nodes=n_nodes, nodes=traj.nodes)


def merge_decompositions(decs) -> CycleDecomposition:
    """Merge sampled decompositions from independent trajectories.

    Counts add, lengths add; the merge is associative and independent of
    input order.
    """
    decs = list(decs)
    if not decs:
        raise ValueError("nothing to merge")
    if any(d.kind != "sampled" or d.counts is None or d.T is None for d in decs):
        raise ValueError("can only merge sampled decompositions")
    n_nodes = decs[0].n_nodes
    nodes = decs[0].nodes
    if any(d.n_nodes != n_nodes or d.nodes != nodes for d in decs):
        raise ValueError("decompositions live on different node sets")
    counts: dict[Cycle, int] = {}
    total = 0
    for d in decs:
        total += d.T
        for c, k in d.counts.items():
            counts[c] = counts.get(c, 0) + k
    weights = {c: k / total for c, k in counts.items()}
    return CycleDecomposition(weights=weights, counts=counts, kind="sampled",
                              T=total, n_nodes=n_nodes, nodes=nodes)


def iterative_decomposition(F: np.ndarray, tol: float | None = None,
                            nodes: tuple[str, ...] | None = None) -> CycleDecomposition:
    """Deterministically peel simple cycles off a conservative flow.

    Repeatedly walks from the smallest-index node that still has residual
    out-flow, always following the largest-residual out-edge (ties broken by
    node index), until some node repeats; the cycle closed this way is
    extracted with weight min over its edges of the residual flow, which is
    then subtracted.  Terminates when every residual entry is below `tol`.

    The default tolerance is 1e-12 times the largest initial flow, raised to
    eight times the flow's own conservation error: entries below that level
    are rounding dust, not extractable circulation.

    Raises ValueError if F is not conservative at every node.
    """
    F = np.array(F, dtype=float, copy=True)
    n = F.shape[0]
    if F.shape != (n, n):
        raise ValueError("flow must be a square matrix")
    if np.any(F < 0):
        raise ValueError("flow entries must be non-negative")
    fmax = float(F.max())
    if fmax <= 0:
        raise ValueError("flow is identically zero")
    cons = float(np.max(np.abs(F.sum(axis=0) - F.sum(axis=1))))
    if cons > 1e-8 * fmax:
        raise ValueError(f"flow is not conservative (residual {cons:.3e})")
    if tol is None:
        tol = max(1e-12 * fmax, 8.0 * cons)

    weights: dict[Cycle, float] = {}
    max_steps = 2 * int(np.count_nonzero(F)) + n + 1
    for _ in range(max_steps):
        row_max = F.max(axis=1)
        live = np.flatnonzero(row_max > tol)
        if live.size == 0:
            break
        x = int(live[0])
        path = [x]
        seen = {x: 0}
        cyc_nodes = None
        while True:
            y = int(np.argmax(F[x]))
            if F[x, y] <= 0.0:
                # walked onto non-conservative dust; drop the inbound edge
                if len(path) < 2 or F[path[-2], x] > tol:
                    raise RuntimeError(
                        "residual flow lost conservation during peeling")
                F[path[-2], x] = 0.0
                break
            if y in seen:
                cyc_nodes = path[seen[y]:]
                break
            seen[y] = len(path)
            path.append(y)
            x = y
        if cyc_nodes is None:
            continue
        cyc = canonical_cycle(cyc_nodes)
        m = len(cyc_nodes)
        w = float(min(F[cyc_nodes[i], cyc_nodes[(i + 1) % m]] for i in range(m)))
        for i in range(m):
            F[cyc_nodes[i], cyc_nodes[(i + 1) % m]] -= w
        if w > tol:
            weights[cyc] = weights.get(cyc, 0.0) + w
    else:
        raise RuntimeError("cycle peeling did not terminate")
    return CycleDecomposition(weights=weights, kind="iterative", n_nodes=n,
                              tol=tol, nodes=nodes)


def verify_flow_decomposition(dec: CycleDecomposition, F: np.ndarray) -> float:
    """Max over matrix entries of |F - sum of cycle weights through the edge|."""
    F = np.asarray(F, dtype=float)
    S = np.zeros_like(F)
    for c, w in dec.weights.items():
        m = len(c)
        for i in range(m):
            S[c[i], c[(i + 1) % m]] += w
    return float(np.max(np.abs(F - S)))


def decomposition_to_json(dec: CycleDecomposition, extra: dict | None = None) -> str:
    """JSON export: cycles sorted by weight descending, then canonical order."""
    order = sorted(dec.weights, key=lambda c: (-dec.weights[c], c))
    items = []
    for c in order:
        entry = {"cycle": dec.node_ids(c), "weight": float(dec.weights[c])}
        if dec.counts is not None:
            entry["count"] = dec.counts.get(c, 0)
        items.append(entry)
    obj = {"kind": dec.kind, "n_nodes": dec.n_nodes, "cycles": items}
    if dec.T is not None:
        obj["T"] = dec.T
    if extra:
        obj.update(extra)
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
