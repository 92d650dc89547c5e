"""Shared graph builders and pipeline helpers for the test suite."""

from dataclasses import dataclass

import numpy as np
import pytest

import cycleflow as cf

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def three_node_chain():
    """a <-> b <-> c with unit weights; every edge lies on exactly one 2-cycle."""
    return cf.DirectedGraph(
        ["a", "b", "c"],
        {("a", "b"): 1.0, ("b", "a"): 1.0, ("b", "c"): 1.0, ("c", "b"): 1.0})


def two_triangles(bridge=0.1):
    """Two bidirectional 3-cliques joined by one weak reciprocal edge."""
    nodes = [f"t{k}" for k in range(6)]
    edges = {}
    for tri in ((0, 1, 2), (3, 4, 5)):
        for a in tri:
            for b in tri:
                if a != b:
                    edges[(f"t{a}", f"t{b}")] = 1.0
    edges[("t2", "t3")] = bridge
    edges[("t3", "t2")] = bridge
    return cf.DirectedGraph(nodes, edges)


def three_cliques(bridge=0.05):
    """Three bidirectional 3-cliques joined in a weak ring."""
    nodes = [f"c{k}" for k in range(9)]
    edges = {}
    for tri in ((0, 1, 2), (3, 4, 5), (6, 7, 8)):
        for a in tri:
            for b in tri:
                if a != b:
                    edges[(f"c{a}", f"c{b}")] = 1.0
    for a, b in ((2, 3), (5, 6), (8, 0)):
        edges[(f"c{a}", f"c{b}")] = bridge
        edges[(f"c{b}", f"c{a}")] = bridge
    return cf.DirectedGraph(nodes, edges)


def shared_node_cliques():
    """Two bidirectional 3-cliques sharing one node."""
    nodes = [f"s{k}" for k in range(5)]
    edges = {}
    for tri in ((0, 1, 2), (2, 3, 4)):
        for a in tri:
            for b in tri:
                if a != b:
                    edges[(f"s{a}", f"s{b}")] = 1.0
    return cf.DirectedGraph(nodes, edges)


def reciprocal_ring4(seed=1):
    """All-reciprocal 4-ring with a strong clockwise drift; finite entropy production."""
    rng = np.random.default_rng(seed)
    nodes = ["a", "b", "c", "d"]
    edges = {}
    for x, y in (("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")):
        edges[(x, y)] = float(rng.uniform(2.0, 4.0))
        edges[(y, x)] = float(rng.uniform(0.3, 1.0))
    return cf.DirectedGraph(nodes, edges)


def random_strong_graph(rng, n=None):
    """Random strongly connected graph: a random ring plus random extra edges."""
    if n is None:
        n = int(rng.integers(3, 8))
    nodes = [f"x{k}" for k in range(n)]
    perm = rng.permutation(n)
    edges = {}
    for i in range(n):
        a, b = perm[i], perm[(i + 1) % n]
        edges[(f"x{a}", f"x{b}")] = float(rng.uniform(0.2, 3.0))
    for _ in range(int(rng.integers(0, 2 * n))):
        a, b = rng.integers(0, n, 2)
        if a != b:
            edges[(f"x{a}", f"x{b}")] = float(rng.uniform(0.2, 3.0))
    return cf.DirectedGraph(nodes, edges)


@dataclass
class Pipeline:
    """Everything derived from one graph, with an exact (flow-peeled) decomposition."""

    G: cf.DirectedGraph
    P: np.ndarray
    pi: np.ndarray
    F: np.ndarray
    dec: cf.CycleDecomposition
    B: np.ndarray
    V: np.ndarray
    P_lift: np.ndarray
    Q_lift: np.ndarray
    mu: np.ndarray
    K: cf.CommunicationGraph


def build_pipeline(G, dec=None):
    P = cf.transition_matrix(G)
    pi = cf.stationary_distribution(P)
    F = cf.edge_flow(P, pi)
    if dec is None:
        dec = cf.iterative_decomposition(F, nodes=G.nodes)
    B = cf.node_to_cycle_matrix(dec, pi)
    V = cf.cycle_to_node_matrix(dec)
    return Pipeline(G=G, P=P, pi=pi, F=F, dec=dec, B=B, V=V,
                    P_lift=cf.lifted_node_chain(B, V),
                    Q_lift=cf.lifted_cycle_chain(V, B),
                    mu=cf.cycle_stationary(dec),
                    K=cf.communication_graph(dec, pi))


def sampled_pipeline(G, T, seed=0, start=0):
    P = cf.transition_matrix(G)
    traj = cf.simulate(P, start, T, seed=seed)
    dec = cf.sample_decomposition(traj, n_nodes=G.n)
    return build_pipeline(G, dec=dec)


def mc_hitting_probabilities(P_walk, cores, start, n_walkers, seed, max_steps=100_000):
    """Monte-Carlo estimate of the probability of reaching each core first."""
    rng = np.random.default_rng(seed)
    n = P_walk.shape[0]
    target = np.full(n, -1, dtype=int)
    for j, core in enumerate(cores):
        target[list(core)] = j
    if target[start] >= 0:
        out = np.zeros(len(cores))
        out[target[start]] = 1.0
        return out
    cum = np.cumsum(P_walk, axis=1)
    cum[:, -1] = 1.0
    state = np.full(n_walkers, start, dtype=np.int64)
    hit = np.full(n_walkers, -1, dtype=np.int64)
    alive = np.arange(n_walkers)
    for _ in range(max_steps):
        u = rng.random(alive.size)
        cur = state[alive]
        nxt = np.empty(alive.size, dtype=np.int64)
        for x in np.unique(cur):
            mask = cur == x
            nxt[mask] = np.searchsorted(cum[x], u[mask], side="right")
        state[alive] = nxt
        absorbed = target[nxt] >= 0
        hit[alive[absorbed]] = target[nxt[absorbed]]
        alive = alive[~absorbed]
        if alive.size == 0:
            break
    assert alive.size == 0, "walkers failed to absorb"
    return np.bincount(hit, minlength=len(cores)) / n_walkers


@pytest.fixture(scope="session")
def barbell4():
    return build_pipeline(cf.barbell(4, 0.1))


@pytest.fixture(scope="session")
def barbell40():
    return build_pipeline(cf.barbell(40, 0.1))


@pytest.fixture(scope="session")
def chain3():
    return build_pipeline(three_node_chain())
