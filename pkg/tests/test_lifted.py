import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import cycleflow as cf

from conftest import build_pipeline, random_strong_graph, reciprocal_ring4


# ------------------------------------------------------------- the matrices

def test_node_to_cycle_barbell(barbell4):
    G, dec = barbell4.G, barbell4.dec
    B = barbell4.B
    l0 = G.index("l0")
    cycles = dec.cycles
    j_ring = cycles.index(tuple(range(4)))
    j_bridge = cycles.index((0, 4))
    eps = 0.1
    assert B[l0, j_ring] == pytest.approx(1 / (1 + eps), abs=1e-12)
    assert B[l0, j_bridge] == pytest.approx(eps / (1 + eps), abs=1e-12)
    l1 = G.index("l1")
    assert B[l1, j_ring] == 1.0


def test_node_to_cycle_chain(chain3):
    b = chain3.G.index("b")
    assert np.allclose(chain3.B[b], [0.5, 0.5], atol=1e-12)


def test_node_to_cycle_requires_cover(chain3):
    # drop one cycle: node c is no longer covered
    weights = {(0, 1): 0.25}
    partial = cf.CycleDecomposition(weights=weights, kind="iterative", n_nodes=3)
    with pytest.raises(ValueError, match="covered by no cycle"):
        cf.node_to_cycle_matrix(partial, chain3.pi)


def test_cycle_to_node_rows():
    dec = cf.CycleDecomposition(weights={(0, 1): 0.3, (1, 2, 3): 0.1},
                                kind="iterative", n_nodes=4)
    V = cf.cycle_to_node_matrix(dec)
    assert np.allclose(V[0], [0.5, 0.5, 0, 0])
    assert np.allclose(V[1], [0, 1 / 3, 1 / 3, 1 / 3])


def test_ring_lifted_chains_are_uniform():
    pipe = build_pipeline(cf.ring(5))
    assert pipe.B.shape == (5, 1)
    assert np.all(pipe.B == 1.0)
    assert np.allclose(pipe.P_lift, 0.2, atol=1e-14)
    assert pipe.Q_lift.shape == (1, 1)
    assert pipe.Q_lift[0, 0] == pytest.approx(1.0, abs=1e-14)


def test_lifted_chain_examples(chain3):
    G = chain3.G
    a, b = G.index("a"), G.index("b")
    assert chain3.P_lift[b, a] == pytest.approx(0.25, abs=1e-13)
    assert chain3.P_lift[b, b] == pytest.approx(0.5, abs=1e-13)
    # cycle chain: two 2-cycles sharing node b
    assert chain3.Q_lift[0, 1] == pytest.approx(0.25, abs=1e-13)
    assert np.allclose(chain3.mu, [0.5, 0.5], atol=1e-13)


def test_barbell_cycle_chain_entry(barbell4):
    cycles = barbell4.dec.cycles
    j_l = cycles.index(tuple(range(4)))
    j_c = cycles.index((0, 4))
    eps, n = 0.1, 4
    assert barbell4.Q_lift[j_l, j_c] == pytest.approx(
        (1 / n) * eps / (1 + eps), abs=1e-13)


def test_mu_is_stationary_for_cycle_chain(barbell4):
    mu, Q = barbell4.mu, barbell4.Q_lift
    assert np.abs(mu @ Q - mu).max() <= 1e-12
    assert mu.sum() == pytest.approx(1.0, abs=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_lifted_invariants_property(seed):
    pipe = build_pipeline(random_strong_graph(np.random.default_rng(seed)))
    for M in (pipe.B, pipe.V, pipe.P_lift, pipe.Q_lift):
        assert np.abs(M.sum(axis=1) - 1).max() <= 1e-10
    assert cf.detailed_balance_residual(pipe.P_lift, pipe.pi) <= 1e-10
    assert cf.detailed_balance_residual(pipe.Q_lift, pipe.mu) <= 1e-10
    assert np.abs(pipe.pi @ pipe.P_lift - pipe.pi).max() <= 1e-8
    assert np.abs(pipe.mu @ pipe.Q_lift - pipe.mu).max() <= 1e-8


# ------------------------------------------------------------------ spectra

def test_spectrum_leading_eigenvalue(barbell40):
    # the walk is periodic, so -1 shares the unit modulus with 1
    rep = cf.spectrum(barbell40.P)
    assert abs(abs(rep.eigenvalues[0]) - 1) <= 1e-8
    assert any(abs(z - 1) <= 1e-8 for z in rep.eigenvalues[:4])
    rep_lift = cf.spectrum_reversible(barbell40.P_lift, barbell40.pi)
    assert abs(rep_lift.eigenvalues[0] - 1) <= 1e-8
    assert rep_lift.max_imag == 0.0


def test_spectrum_ring_roots_of_unity():
    rep = cf.spectrum(cf.transition_matrix(cf.ring(5)))
    expected = np.exp(2j * np.pi * np.arange(5) / 5)
    got = np.sort_complex(rep.eigenvalues)
    assert np.allclose(np.sort_complex(expected), got, atol=1e-10)


def test_spectrum_top_k():
    P = cf.transition_matrix(cf.ring(6))
    rep = cf.spectrum(P, k=3)
    assert len(rep.eigenvalues) == 3
    with pytest.raises(ValueError):
        cf.spectrum(P, k=7)


def test_barbell_spectral_structure(barbell40):
    rep = cf.spectrum_reversible(barbell40.P_lift, barbell40.pi)
    lam = rep.real_sorted()
    n, eps = 40, 0.1
    assert lam[1] == pytest.approx(1 - eps / (n * (1 + eps)), abs=1e-10)
    assert lam[2] == pytest.approx((eps / (1 + eps)) * (1 - 1 / n), abs=1e-10)
    gaps = rep.gaps(8)
    assert int(np.argmax(gaps)) == 1  # the gap after the second eigenvalue
    # the plain walk has near-unit-modulus complex eigenvalues
    rep_walk = cf.spectrum(barbell40.P)
    assert any(abs(z) > 0.99 and abs(z.imag) > 0.1 for z in rep_walk.eigenvalues)


def test_csv_export(barbell4):
    rep = cf.spectrum_reversible(barbell4.P_lift, barbell4.pi)
    text = rep.csv_text()
    lines = text.strip().split("\n")
    assert lines[0] == "re,im"
    assert len(lines) == barbell4.G.n + 1
    first = [float(x) for x in lines[1].split(",")]
    assert first[0] == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------- spectral correspondence

def test_nonzero_spectra_agree(chain3, barbell4):
    for pipe in (chain3, barbell4):
        rep = cf.verify_spectral_match(pipe.P_lift, pipe.Q_lift, pipe.B, pipe.V,
                               pipe.pi, pipe.mu)
        assert rep.ok, rep.detail
        assert rep.max_spectrum_diff <= 1e-8


def test_nonzero_spectra_chain_values(chain3):
    rep = cf.verify_spectral_match(chain3.P_lift, chain3.Q_lift, chain3.B, chain3.V,
                           chain3.pi, chain3.mu)
    assert np.allclose(rep.nonzero_cycle, [1.0, 0.5], atol=1e-10)


def test_match_report_detects_mismatch(barbell4):
    # pair the chains of two different bridge weights: same shapes, different spectra
    other = build_pipeline(cf.barbell(4, 0.4))
    rep = cf.verify_spectral_match(barbell4.P_lift, other.Q_lift, barbell4.B, barbell4.V,
                           barbell4.pi, other.mu)
    assert not rep.ok
    assert rep.detail


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_spectral_match_property(seed):
    pipe = build_pipeline(random_strong_graph(np.random.default_rng(seed)))
    rep = cf.verify_spectral_match(pipe.P_lift, pipe.Q_lift, pipe.B, pipe.V,
                           pipe.pi, pipe.mu)
    assert rep.ok, rep.detail


# -------------------------------------------------------- entropy production

def test_entropy_zero_for_reversible(chain3):
    assert cf.entropy_production_edge(chain3.P, chain3.pi) == 0.0
    assert cf.entropy_production_cycle(chain3.dec) == 0.0


def test_entropy_infinite_without_reverse_edges(barbell4):
    assert cf.entropy_production_edge(barbell4.P, barbell4.pi) == math.inf
    assert cf.entropy_production_cycle(barbell4.dec) == math.inf


def test_entropy_two_state_chain_is_zero():
    # any two-state chain is detailed balanced, so the rate vanishes
    G = cf.DirectedGraph(["a", "b"], {("a", "b"): 0.8, ("a", "a"): 0.2,
                                      ("b", "a"): 0.4, ("b", "b"): 0.6})
    P = cf.transition_matrix(G)
    pi = cf.stationary_distribution(P)
    assert cf.entropy_production_edge(P, pi) == pytest.approx(0.0, abs=1e-15)


def test_entropy_positive_for_driven_ring():
    G = reciprocal_ring4()
    P = cf.transition_matrix(G)
    pi = cf.stationary_distribution(P)
    ep = cf.entropy_production_edge(P, pi)
    assert 0 < ep < math.inf


def test_entropy_cycle_matches_edge_formula_sampled():
    G = reciprocal_ring4()
    P = cf.transition_matrix(G)
    pi = cf.stationary_distribution(P)
    ep_edge = cf.entropy_production_edge(P, pi)
    traj = cf.simulate(P, 0, 10**6, seed=0)
    dec = cf.sample_decomposition(traj, n_nodes=G.n)
    ep_cycle = cf.entropy_production_cycle(dec)
    assert ep_cycle == pytest.approx(ep_edge, rel=0.05)
