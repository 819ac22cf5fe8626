"""Quantization: principal eigenvector, transition factor, walk, verifier."""

import numpy as np
import pytest

from nandwalk.formula import generate, generate_balanced, Leaf
from nandwalk.hamiltonian import (
    R1,
    R2,
    WeightedAdjacency,
    apply_input,
    build_tree_with_tail,
    edge_weights,
    norm_upper_bound,
)
from nandwalk.szegedy import (
    build_walk,
    classical_transition,
    principal_eigenvector,
    verify_correspondence,
    walk_from_hamiltonian,
)

from conftest import all_bits


def dense_top_pair(h):
    lam, vec = np.linalg.eigh(h.to_dense())
    v = vec[:, -1]
    if v.sum() < 0:
        v = -v
    return lam[-1], v


class TestPrincipalEigenvector:
    def test_single_edge(self):
        h = WeightedAdjacency.from_edges(2, [(0, 1, 1.0)])
        lam, delta = principal_eigenvector(h)
        assert lam == pytest.approx(1.0, abs=1e-12)
        assert delta == pytest.approx(np.full(2, 1 / np.sqrt(2)), abs=1e-10)

    def test_path_of_three_unit_edges(self):
        h = WeightedAdjacency.from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
        lam, delta = principal_eigenvector(h)
        lam_d, delta_d = dense_top_pair(h)
        assert lam == pytest.approx(lam_d, abs=1e-12)
        assert np.abs(delta - delta_d).max() < 1e-10
        # interior/end ratio is the top eigenvalue (golden ratio), not sqrt(2)
        assert delta[1] / delta[0] == pytest.approx(lam, abs=1e-10)

    def test_balanced2_matches_dense(self):
        h0 = edge_weights(build_tree_with_tail(generate_balanced(2)))
        lam, delta = principal_eigenvector(h0)
        lam_d, delta_d = dense_top_pair(h0)
        assert lam == pytest.approx(lam_d, abs=1e-11)
        assert np.abs(delta - delta_d).max() < 1e-10

    def test_residual_within_tolerance(self):
        h0 = edge_weights(build_tree_with_tail(generate("random:12:6")))
        lam, delta = principal_eigenvector(h0)
        resid = np.linalg.norm(h0.to_dense() @ delta - lam * delta)
        assert resid <= 1e-12 * lam
        assert (delta > 0).all()
        assert np.linalg.norm(delta) == pytest.approx(1.0, abs=1e-12)

    def test_disconnected_rejected(self):
        h = WeightedAdjacency.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
        with pytest.raises(ValueError, match="disconnected"):
            principal_eigenvector(h)

    def test_zero_matrix_rejected(self):
        h = WeightedAdjacency.from_edges(2, [(0, 1, 0.0)])
        with pytest.raises(ValueError):
            principal_eigenvector(h)


class TestClassicalTransition:
    def test_single_unit_edge(self):
        h = WeightedAdjacency.from_edges(2, [(0, 1, 1.0)])
        lam, delta = principal_eigenvector(h)
        p = classical_transition(h, delta, 1.0, lambda_max=lam)
        assert p.matrix() == pytest.approx(np.array([[0, 1], [1, 0]]), abs=1e-12)

    def test_reconstruction_balanced2(self):
        h0 = edge_weights(build_tree_with_tail(generate_balanced(2)))
        lam, delta = principal_eigenvector(h0)
        p = classical_transition(h0, delta, lam, lambda_max=lam)
        m = p.matrix() * p.matrix().T  # elementwise
        assert np.abs(m * lam - h0.to_dense()).max() < 1e-12

    def test_unit_rows_with_exact_norm(self):
        h0 = edge_weights(build_tree_with_tail(generate("chain:5")))
        lam, delta = principal_eigenvector(h0)
        p = classical_transition(h0, delta, lam, lambda_max=lam)
        assert np.abs(p.row_norms() - 1.0).max() < 1e-12
        assert p.deficit.max() == 0.0

    def test_strict_bound_adds_uniform_self_loops(self):
        h0 = edge_weights(build_tree_with_tail(generate_balanced(2)))
        lam, delta = principal_eigenvector(h0)
        n_h = norm_upper_bound(h0)
        assert n_h > lam
        p = classical_transition(h0, delta, n_h, lambda_max=lam)
        assert np.abs(p.row_norms() - 1.0).max() < 1e-12
        # deficit is the same at every vertex: 1 - lam/n_h
        want = 1 - lam / n_h
        assert p.deficit == pytest.approx(np.full(h0.n_vertices, want), abs=1e-12)

    def test_nonpositive_delta_rejected(self):
        h = WeightedAdjacency.from_edges(2, [(0, 1, 1.0)])
        with pytest.raises(ValueError):
            classical_transition(h, np.array([0.5, -0.5]), 1.0)


@pytest.fixture(scope="module")
def balanced2_walk():
    ast = generate_balanced(2)
    tree = build_tree_with_tail(ast)
    h0 = edge_weights(tree)
    return tree, h0, walk_from_hamiltonian(h0, tree)


class TestWalk:
    def test_unitary_on_random_states(self, balanced2_walk):
        _, _, walk = balanced2_walk
        rng = np.random.default_rng(1)
        for _ in range(100):
            psi = rng.normal(size=walk.dim) + 1j * rng.normal(size=walk.dim)
            psi /= np.linalg.norm(psi)
            out = walk.step(psi)
            assert abs(np.linalg.norm(out) - 1.0) < 1e-12

    def test_unitary_matrix(self, balanced2_walk):
        _, _, walk = balanced2_walk
        u = walk.unitary_dense()
        assert np.abs(u.conj().T @ u - np.eye(walk.dim)).max() < 1e-12

    def test_fixes_coin_subspaces(self, balanced2_walk):
        # U (S T |lam>) = T |lam> for every eigenvector of M
        _, _, walk = balanced2_walk
        m = walk.m_matrix()
        t = walk.coin_operator_t()
        _, evecs = np.linalg.eigh(m)
        u = walk.unitary_dense()
        for vec in evecs.T:
            tv = t @ vec
            stv = np.zeros_like(tv)
            stv[walk.space.swap] = tv
            assert np.linalg.norm(u @ stv - tv) < 1e-12

    def test_minus_swap_on_complement(self, balanced2_walk):
        _, _, walk = balanced2_walk
        t = walk.coin_operator_t()
        # random vector projected off the coin span
        rng = np.random.default_rng(2)
        psi = rng.normal(size=walk.dim) + 1j * rng.normal(size=walk.dim)
        q, _ = np.linalg.qr(t)
        psi -= q @ (q.conj().T @ psi)
        spsi = np.zeros_like(psi)
        spsi[walk.space.swap] = psi
        spsi -= q @ (q.conj().T @ spsi)  # also orthogonal to S-coins
        # rebuild psi so that S psi = spsi is off-span too
        psi = np.zeros_like(spsi)
        psi[walk.space.swap] = spsi
        out = walk.step(psi)
        assert np.linalg.norm(out + spsi) < 1e-10

    def test_locality(self, balanced2_walk):
        # a state on pair (v, w) maps into pairs rooted at w
        _, _, walk = balanced2_walk
        for j in range(walk.dim):
            psi = np.zeros(walk.dim, dtype=np.complex128)
            psi[j] = 1.0
            out = walk.step(psi)
            w = walk.space.seconds[j]
            support = np.flatnonzero(np.abs(out) > 1e-14)
            assert set(walk.space.firsts[support]) <= {w}


class TestOracle:
    def test_all_zeros_identity(self, balanced2_walk):
        _, _, walk = balanced2_walk
        assert (walk.oracle_signs("0000") == 1).all()

    def test_all_ones_negates_leaf_pairs(self, balanced2_walk):
        tree, _, walk = balanced2_walk
        signs = walk.oracle_signs("1111")
        leaf_rows = np.isin(walk.space.firsts, tree.leaves)
        assert (signs[leaf_rows] == -1).all()
        assert (signs[~leaf_rows] == 1).all()

    def test_fig1_pattern(self):
        ast = generate_balanced(3)
        tree = build_tree_with_tail(ast)
        walk = walk_from_hamiltonian(edge_weights(tree), tree)
        signs = walk.oracle_signs("00010111")
        flipped_vars = sorted(set(walk.row_var[signs == -1]))
        assert flipped_vars == [4, 6, 7, 8]


class TestCorrespondence:
    def test_balanced2_all_inputs_sample(self, balanced2_walk):
        tree, h0, walk = balanced2_walk
        for bits in all_bits(4)[::3]:
            m = walk.m_matrix(bits)
            h = apply_input(h0, tree, bits).to_dense()
            rep = verify_correspondence(walk, m, x=bits, h=h)
            assert rep.passed, rep.failures
            assert rep.max_residual <= 1e-9
            assert rep.row_norm_deviation <= 1e-12
            assert rep.reconstruction_deviation <= 1e-12
            assert rep.max_subspace_overlap <= 1e-10

    def test_zero_eigenvalue_maps_to_plus_minus_i(self, balanced2_walk):
        _, _, walk = balanced2_walk
        m = walk.m_matrix()
        rep = verify_correspondence(walk, m)
        zero = [e for e in rep.matches if abs(e.lam) < 1e-9 and not e.degenerate]
        assert zero, "expected zero eigenvalues in the spectrum"
        for entry in zero:
            got = sorted(entry.walk_eigenvalues, key=lambda b: b.imag)
            assert got[0] == pytest.approx(-1j, abs=1e-9)
            assert got[1] == pytest.approx(1j, abs=1e-9)

    def test_extreme_eigenvalue_is_degenerate_single(self, balanced2_walk):
        # the normalized principal eigenvalue is exactly 1: one eigenvector,
        # walk eigenvalue equal to it (the +-pair formula collapses)
        _, _, walk = balanced2_walk
        rep = verify_correspondence(walk, walk.m_matrix())
        top = max(rep.matches, key=lambda e: e.lam)
        assert top.lam == pytest.approx(1.0, abs=1e-12)
        assert top.degenerate
        assert top.walk_eigenvalues[0] == pytest.approx(1.0, abs=1e-9)
        bottom = min(rep.matches, key=lambda e: e.lam)
        assert bottom.lam == pytest.approx(-1.0, abs=1e-12)
        assert bottom.walk_eigenvalues[0] == pytest.approx(-1.0, abs=1e-9)

    def test_minus_iu_arcsin_mapping(self, balanced2_walk):
        _, _, walk = balanced2_walk
        rep = verify_correspondence(walk, walk.m_matrix())
        assert rep.arcsin_deviation < 1e-12

    def test_arcsin_third_order_gap_match(self):
        lams = np.linspace(-0.1, 0.1, 41)
        assert (np.abs(np.arcsin(lams) - lams) <= np.abs(lams) ** 3 + 1e-15).all()

    def test_oracle_walk_is_szegedy_walk_of_adjusted_coins(self, balanced2_walk):
        # U = oracle * U0 equals the coin-reflection walk built from the
        # adjusted isometry: reflection about T(x) columns, then swap
        _, _, walk = balanced2_walk
        bits = np.array([1, 0, 1, 1], dtype=np.uint8)
        t = walk.coin_operator_t(bits)
        refl = 2 * t @ t.T - np.eye(walk.dim)
        s = np.zeros((walk.dim, walk.dim))
        s[walk.space.swap, np.arange(walk.dim)] = 1.0
        assert np.abs(refl @ s - walk.unitary_dense(bits)).max() < 1e-12


class TestDisconnectedInput:
    def test_single_leaf_read_one(self):
        # the lone leaf reading 1 isolates it; the walk still runs from the
        # tail component and the leaf coin is the exact self loop
        tree = build_tree_with_tail(Leaf(1))
        h0 = edge_weights(tree)
        walk = walk_from_hamiltonian(h0, tree)
        m = walk.m_matrix(np.array([1], dtype=np.uint8))
        h = apply_input(h0, tree, [1]).to_dense()
        rep = verify_correspondence(walk, m, x=[1], h=h)
        assert rep.passed, rep.failures
        leaf_block = slice(walk.space.ptr[2], walk.space.ptr[3])
        t = walk.coin_operator_t([1])
        col = t[leaf_block, 2]
        assert col == pytest.approx(np.array([0.0, 1.0]), abs=1e-12)
        assert m[2, 2] == pytest.approx(1.0, abs=1e-12)
