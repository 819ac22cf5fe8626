"""Gate-tree construction and weighted adjacency matrices."""

import numpy as np
import pytest

from nandwalk.formula import Leaf, compute_stats, generate, generate_balanced, generate_chain
from nandwalk.hamiltonian import (
    R1,
    R2,
    ROOT,
    apply_input,
    build_tree_with_tail,
    edge_weights,
    norm_upper_bound,
    WeightedAdjacency,
)

from conftest import all_bits


class TestBuildTree:
    def test_balanced3_vertex_count(self):
        tree = build_tree_with_tail(generate_balanced(3))
        assert tree.n_vertices == 15 + 2

    def test_single_leaf_three_vertices(self):
        tree = build_tree_with_tail(Leaf(1))
        assert tree.n_vertices == 3
        assert tree.leaf_var[ROOT] == 1

    def test_chain4_count(self):
        tree = build_tree_with_tail(generate_chain(4))
        # gates: 3, leaves: 4, tail: 2
        assert tree.n_vertices == 7 + 2

    def test_tail_structure(self):
        tree = build_tree_with_tail(generate_balanced(2))
        assert tree.parent[R1] == R2
        assert tree.parent[ROOT] == R1
        assert tree.parent[R2] == -1
        n = tree.s[ROOT]
        assert tree.s[R1] == n and tree.s[R2] == n

    def test_preorder_parents_precede_children(self):
        tree = build_tree_with_tail(generate("random:10:5"))
        assert all(tree.parent[v] < v for v in range(1, tree.n_vertices))

    def test_values_fig1(self):
        tree = build_tree_with_tail(generate_balanced(3))
        vals = tree.values("00010111")
        assert vals[ROOT] == 1
        assert vals[R1] == 0
        assert vals[R2] == 1

    def test_path_sums_match_formula_stats(self):
        for spec in ("balanced:3", "chain:5", "random:11:4"):
            ast = generate(spec)
            st = compute_stats(ast)
            tree = build_tree_with_tail(ast)
            sm, sp = tree.path_sums(0.25)
            assert sm[ROOT] == pytest.approx(st.sigma_minus, abs=1e-12)
            assert sp[ROOT] == pytest.approx(st.sigma_plus, abs=1e-12)


class TestEdgeWeights:
    def test_balanced3_closed_forms(self):
        tree = build_tree_with_tail(generate_balanced(3))
        h = edge_weights(tree, beta=0.25)
        dense = h.to_dense()
        # interior edges: (s_v/s_p)^(1/4) = (1/2)^(1/4)
        w_int = 0.5**0.25
        for v in range(ROOT + 1, tree.n_vertices):
            p = tree.parent[v]
            assert dense[p, v] == pytest.approx(w_int, abs=1e-12)
        assert dense[R1, ROOT] == pytest.approx(1.0, abs=1e-12)
        sm = sum(2 ** (-k / 2) for k in range(4))
        assert dense[R2, R1] == pytest.approx(1 / (np.sqrt(sm) * 8**0.25), abs=1e-12)

    def test_single_leaf_tail_edge(self):
        tree = build_tree_with_tail(Leaf(1))
        dense = edge_weights(tree).to_dense()
        assert dense[R1, ROOT] == pytest.approx(1.0, abs=1e-12)
        assert dense[R2, R1] == pytest.approx(1.0, abs=1e-12)

    def test_weights_at_most_one_for_small_beta(self):
        for beta in (0.125, 0.25):
            for spec in ("balanced:3", "chain:6", "random:12:9"):
                h = edge_weights(build_tree_with_tail(generate(spec)), beta=beta)
                assert (h.weights <= 1 + 1e-12).all()

    def test_general_beta_formula(self):
        tree = build_tree_with_tail(generate_chain(4))
        for beta in (0.125, 0.5):
            dense = edge_weights(tree, beta=beta).to_dense()
            sm, _ = tree.path_sums(beta)
            for v in range(ROOT + 1, tree.n_vertices):
                p = tree.parent[v]
                want = tree.s[v] ** beta / tree.s[p] ** (0.5 - beta)
                assert dense[p, v] == pytest.approx(want, abs=1e-12)
            assert dense[R2, R1] == pytest.approx(
                1 / (np.sqrt(sm[ROOT]) * 4 ** (0.5 - beta)), abs=1e-12)

    def test_beta_out_of_range(self):
        tree = build_tree_with_tail(generate_balanced(1))
        for beta in (0.0, 0.6, -0.1):
            with pytest.raises(ValueError):
                edge_weights(tree, beta=beta)


class TestApplyInput:
    def test_all_zeros_is_identity(self):
        tree = build_tree_with_tail(generate_balanced(2))
        h0 = edge_weights(tree)
        hx = apply_input(h0, tree, "0000")
        assert (hx.to_dense() == h0.to_dense()).all()

    def test_fig1_removes_four_leaf_edges(self):
        tree = build_tree_with_tail(generate_balanced(3))
        h0 = edge_weights(tree)
        hx = apply_input(h0, tree, "00010111")
        assert len(hx.weights) == len(h0.weights) - 4
        d0, dx = h0.to_dense(), hx.to_dense()
        diff = np.argwhere((d0 != dx) & (np.triu(np.ones_like(d0)) > 0))
        removed_leaves = sorted(tree.leaf_var[v] for _, v in diff)
        assert removed_leaves == [4, 6, 7, 8]

    def test_single_leaf_splits(self):
        tree = build_tree_with_tail(Leaf(1))
        h0 = edge_weights(tree)
        hx = apply_input(h0, tree, "1")
        assert hx.components()[ROOT] != hx.components()[R1]

    def test_entrywise_dominated(self, spectral_corpus):
        for _, ast in spectral_corpus[:6]:
            tree = build_tree_with_tail(ast)
            h0 = edge_weights(tree)
            d0 = h0.to_dense()
            for bits in all_bits(tree.n_vars)[:: max(1, 2 ** (tree.n_vars - 4))]:
                dx = apply_input(h0, tree, bits).to_dense()
                assert (dx <= d0 + 1e-15).all()


class TestNormBound:
    def test_single_edge(self):
        h = WeightedAdjacency.from_edges(2, [(0, 1, 0.7)])
        assert norm_upper_bound(h) == pytest.approx(0.7)
        lam = np.linalg.eigvalsh(h.to_dense())
        assert norm_upper_bound(h) >= abs(lam).max() - 1e-12

    def test_star_graph(self):
        k = 5
        h = WeightedAdjacency.from_edges(k + 1, [(0, i, 1.0) for i in range(1, k + 1)])
        assert norm_upper_bound(h) == pytest.approx(k)
        lam = np.abs(np.linalg.eigvalsh(h.to_dense())).max()
        assert lam == pytest.approx(np.sqrt(k), abs=1e-12)
        assert norm_upper_bound(h) >= lam

    def test_dominates_dense_norm_on_corpus(self, spectral_corpus):
        for _, ast in spectral_corpus:
            h0 = edge_weights(build_tree_with_tail(ast))
            lam = np.abs(np.linalg.eigvalsh(h0.to_dense())).max()
            assert norm_upper_bound(h0) >= lam - 1e-12

    def test_binary_trees_bounded_by_three(self):
        for spec in ("balanced:4", "chain:8"):
            h0 = edge_weights(build_tree_with_tail(generate(spec)))
            assert norm_upper_bound(h0) <= 3.0


class TestSpectrumSymmetry:
    def test_bipartite_symmetry_exhaustive(self):
        for spec in ("balanced:3", "chain:4"):
            tree = build_tree_with_tail(generate(spec))
            h0 = edge_weights(tree)
            for bits in all_bits(tree.n_vars):
                lam = np.linalg.eigvalsh(apply_input(h0, tree, bits).to_dense())
                assert np.abs(np.sort(lam) + np.sort(-lam)[::-1]).max() < 1e-10


class TestExport:
    def test_coordinate_format(self):
        h = WeightedAdjacency.from_edges(3, [(0, 1, 0.5), (1, 2, 1 / 3)])
        text = h.export_coordinates()
        lines = text.strip().split("\n")
        assert lines[0].split() == ["0", "1", "0.5"]
        row, col, w = lines[1].split()
        assert (row, col) == ("1", "2")
        assert float(w) == pytest.approx(1 / 3, abs=1e-16)
        assert len(w) >= 17  # 17 significant digits requested
