"""Benchmark graph families with known analytic structure."""

from __future__ import annotations

from .graph import DirectedGraph

__all__ = ["barbell", "barbell_closed_forms", "wheel_switch", "wheel_switch_beta_cycles", "ring"]


def barbell(n: int, eps: float) -> DirectedGraph:
    """Two directed n-rings joined at l0/r0 by a reciprocal edge of weight eps.

    Ring edges carry weight 1, both bridge directions weight eps.  The
    stationary distribution and the cycle weights have closed forms, see
    :func:`barbell_closed_forms`.
    """
    if n < 3:
        raise ValueError("barbell needs at least 3 nodes per ring")
    if not 0.0 < eps < 1.0:
        raise ValueError("bridge weight must lie in (0, 1)")
    nodes = [f"l{k}" for k in range(n)] + [f"r{k}" for k in range(n)]
    edges = {}
    for k in range(n):
        edges[(f"l{k}", f"l{(k + 1) % n}")] = 1.0
        edges[(f"r{k}", f"r{(k + 1) % n}")] = 1.0
    edges[("l0", "r0")] = eps
    edges[("r0", "l0")] = eps
    return DirectedGraph(nodes, edges)


def barbell_closed_forms(n: int, eps: float) -> dict:
    """Exact stationary and cycle quantities of the barbell.

    Returns w (= weight of each ring cycle and stationary mass of a plain
    ring node), the bridge-cycle weight eps*w, and the central-node mass
    (1+eps)*w.
    """
    w = 1.0 / (2.0 * (n + eps))
    return {
        "w": w,
        "pi_ring": w,
        "pi_center": (1.0 + eps) * w,
        "w_ring": w,
        "w_bridge": eps * w,
    }


def wheel_switch(n: int, p: float) -> DirectedGraph:
    """Two opposite n-loops coupled by two switch assemblies.

    Outer nodes o0..o{n-1} form the loop o_k -> o_{k+1}; inner nodes
    i0..i{n-1} form the loop i_k -> i_{k+1} (drawn in the opposite sense).
    At positions 0 and n/2 a switch assembly creates a 4-cycle
    (o_a, o_{a+1}, i_a, i_{a+1}): the walk leaves the loop at o_{a+1} towards
    i_a and at i_{a+1} towards o_a with probability p, and continues its loop
    with probability 1-p.  Edge weights are the transition probabilities
    themselves, so the walk matrix equals the weight matrix.
    """
    if n < 6 or n % 2:
        raise ValueError("loop size must be even and >= 6")
    if not 0.0 < p < 1.0:
        raise ValueError("switch probability must lie in (0, 1)")
    half = n // 2
    switch_origins = {1, half + 1}
    nodes = [f"o{k}" for k in range(n)] + [f"i{k}" for k in range(n)]
    edges = {}
    for k in range(n):
        cont = 1.0 - p if k in switch_origins else 1.0
        edges[(f"o{k}", f"o{(k + 1) % n}")] = cont
        edges[(f"i{k}", f"i{(k + 1) % n}")] = cont
    for a in (0, half):
        edges[(f"o{a + 1}", f"i{a}")] = p
        edges[(f"i{a + 1}", f"o{a}")] = p
    return DirectedGraph(nodes, edges)


def wheel_switch_beta_cycles(n: int) -> list[tuple[str, ...]]:
    """Node ids of the two 4-cycles created by the switch assemblies."""
    half = n // 2
    return [
        ("o0", "o1", "i0", "i1"),
        (f"o{half}", f"o{half + 1}", f"i{half}", f"i{half + 1}"),
    ]


def ring(n: int) -> DirectedGraph:
    """Single directed n-cycle with unit weights."""
    if n < 2:
        raise ValueError("ring needs at least 2 nodes")
    nodes = [f"v{k}" for k in range(n)]
    edges = {(f"v{k}", f"v{(k + 1) % n}"): 1.0 for k in range(n)}
    return DirectedGraph(nodes, edges)
