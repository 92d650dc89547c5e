"""Undirected graphs derived from a cycle decomposition.

The communication graph weights node pairs by how easily the walk carries
probability between them: many short, heavy cycles through both nodes mean
intense communication.  The cycle graph weights cycle pairs by the flux they
exchange per step.  Both matrices are exactly symmetric by construction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .cycles import CycleDecomposition

__all__ = [
    "CommunicationGraph",
    "CycleGraph",
    "communication_graph",
    "cycle_graph",
    "export_graph",
]

# entries below this are sampling-noise floor and stored as exact zeros
_ZERO_FLOOR = 1e-15


@dataclass(frozen=True)
class CommunicationGraph:
    """Symmetric node-communication intensities with the stationary vector."""

    intensity: np.ndarray
    pi: np.ndarray
    nodes: tuple[str, ...] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.intensity.shape[0])

    def walk_matrix(self) -> np.ndarray:
        """Row-normalized intensity: the random walk on the communication graph."""
        return self.intensity / self.intensity.sum(axis=1)[:, None]

    def node_ids(self):
        return self.nodes if self.nodes is not None else tuple(str(i) for i in range(self.n))


@dataclass(frozen=True)
class CycleGraph:
    """Symmetric per-step flux exchange between cycles, with their stationary mu."""

    exchange: np.ndarray
    mu: np.ndarray
    cycles: tuple
    nodes: tuple[str, ...] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.exchange.shape[0])

    def node_ids(self):
        if self.nodes is None:
            return tuple("(" + ",".join(str(v) for v in c) + ")" for c in self.cycles)
        return tuple("(" + ",".join(self.nodes[v] for v in c) + ")" for c in self.cycles)


def communication_graph(dec: CycleDecomposition, pi: np.ndarray) -> CommunicationGraph:
    """Intensity matrix I[x, y] = sum over cycles through x and y of w/|cycle|.

    Self-loops (x == y) are kept: they carry the mass that makes each row sum
    to pi[x].  I equals diag(pi) times the lifted node chain when the weights
    are exact.
    """
    pi = np.asarray(pi, dtype=float)
    n = dec.n_nodes
    I = np.zeros((n, n))
    for c, w in dec.weights.items():
        idx = list(c)
        I[np.ix_(idx, idx)] += w / len(c)
    I[np.abs(I) < _ZERO_FLOOR] = 0.0
    uncovered = np.flatnonzero(I.sum(axis=1) == 0.0)
    if uncovered.size:
        raise ValueError(f"node index {int(uncovered[0])} is covered by no cycle")
    return CommunicationGraph(intensity=I, pi=pi, nodes=dec.nodes)


def cycle_graph(dec: CycleDecomposition, B: np.ndarray) -> CycleGraph:
    """Exchange matrix W[a, b] = sum over shared nodes x of w(a) * B[x, b].

    Symmetric because both lifted chains are reversible; stored as the upper
    triangle mirrored so symmetry is exact.
    """
    cycles = dec.cycles
    w = np.array([dec.weights[c] for c in cycles])
    member = np.zeros((len(cycles), dec.n_nodes))
    for j, c in enumerate(cycles):
        member[j, list(c)] = 1.0
    W = w[:, None] * (member @ B)
    W = np.triu(W) + np.triu(W, 1).T
    W[np.abs(W) < _ZERO_FLOOR] = 0.0
    mu = np.array([len(c) * dec.weights[c] for c in cycles])
    mu = mu / mu.sum()
    return CycleGraph(exchange=W, mu=mu, cycles=tuple(cycles), nodes=dec.nodes)


def _edge_iter(M: np.ndarray, include_self_loops: bool):
    n = M.shape[0]
    for i in range(n):
        start = i if include_self_loops else i + 1
        for j in range(start, n):
            if M[i, j] != 0.0:
                yield i, j, float(M[i, j])


def export_graph(graph, fmt: str, include_self_loops: bool = True) -> str:
    """Serialize a communication or cycle graph as DOT, TSV or JSON text.

    Edges are emitted with the lower index first, in index order, so the
    output is deterministic.  `include_self_loops=False` drops the diagonal,
    for visualization only.
    """
    if isinstance(graph, CommunicationGraph):
        M, ids = graph.intensity, graph.node_ids()
    elif isinstance(graph, CycleGraph):
        M, ids = graph.exchange, graph.node_ids()
    else:
        raise TypeError(f"cannot export {type(graph).__name__}")

    if fmt == "tsv":
        lines = [f"{ids[i]}\t{ids[j]}\t{wij!r}"
                 for i, j, wij in _edge_iter(M, include_self_loops)]
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["graph G {"]
        for i, j, wij in _edge_iter(M, include_self_loops):
            lines.append(f'  "{ids[i]}" -- "{ids[j]}" [weight={wij!r}];')
        lines.append("}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        obj = {
            "nodes": list(ids),
            "edges": [{"source": ids[i], "target": ids[j], "weight": wij}
                      for i, j, wij in _edge_iter(M, include_self_loops)],
        }
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown export format {fmt!r} (expected dot, tsv or json)")
