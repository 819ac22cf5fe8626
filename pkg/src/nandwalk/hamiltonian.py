"""Weighted adjacency matrices of NAND gate trees with a two-vertex tail.

Vertex numbering is deterministic: 0 is the lower tail vertex (the walk's
start, written r2 in code), 1 is the middle tail vertex r1, 2 is the
formula root, and the remaining formula vertices follow in preorder with
children in formula order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from nandwalk.formula import FormulaAst, Gate, Leaf, as_bits

R2 = 0  # start vertex  (paper-agnostic names: tail end, tail mid, root)
R1 = 1
ROOT = 2

DEFAULT_DENSE_THRESHOLD = 4096


class SizeOverThreshold(ValueError):
    """Dense-path operation requested above the vertex-count threshold."""


@dataclass
class GateTree:
    """Rooted gate tree plus the attached two-vertex tail.

    parent[v] points toward vertex 0; children are in formula order.
    s[v] is the leaf count of the subformula under v, with
    s[0] = s[1] = s[2] = N.  leaf_var[v] is the 1-based variable index for
    leaves and 0 elsewhere.
    """

    parent: np.ndarray
    children: list[list[int]]
    s: np.ndarray
    leaf_var: np.ndarray
    n_vars: int
    depth: int

    @property
    def n_vertices(self) -> int:
        return len(self.parent)

    @property
    def n_leaves(self) -> int:
        return int(self.s[ROOT])

    @property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.leaf_var)

    def values(self, x) -> np.ndarray:
        """Per-vertex evaluations for one assignment; the tail follows the
        root (vertex 1 is its negation, vertex 0 copies it)."""
        return self.values_batch(as_bits(x, self.n_vars)[None, :])[:, 0]

    def values_batch(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluations, shape (n_vertices, n_inputs)."""
        xs = np.asarray(xs, dtype=np.uint8)
        n, k = self.n_vertices, xs.shape[0]
        vals = np.zeros((n, k), dtype=np.uint8)
        for v in range(n - 1, ROOT - 1, -1):
            if self.leaf_var[v]:
                vals[v] = xs[:, self.leaf_var[v] - 1]
            else:
                prod = np.ones(k, dtype=np.uint8)
                for c in self.children[v]:
                    prod &= vals[c]
                vals[v] = 1 - prod
        vals[R1] = 1 - vals[ROOT]
        vals[R2] = vals[ROOT]
        return vals

    def path_sums(self, beta: float = 0.25) -> tuple[np.ndarray, np.ndarray]:
        """Per-vertex (sigma_minus, sigma_plus): maxima over paths from v
        up to a leaf (endpoints included) of sum(1/s_w^(2 beta)) and
        sum(s_w).  Tail vertices extend the root path."""
        n = self.n_vertices
        sm = np.zeros(n)
        spl = np.zeros(n)
        for v in range(n - 1, ROOT - 1, -1):
            if self.leaf_var[v]:
                sm[v] = 1.0
                spl[v] = 1.0
            else:
                sm[v] = float(self.s[v]) ** (-2.0 * beta) + max(sm[c] for c in self.children[v])
                spl[v] = self.s[v] + max(spl[c] for c in self.children[v])
        nn = float(self.s[ROOT])
        sm[R1] = nn ** (-2.0 * beta) + sm[ROOT]
        spl[R1] = nn + spl[ROOT]
        sm[R2] = nn ** (-2.0 * beta) + sm[R1]
        spl[R2] = nn + spl[R1]
        return sm, spl


@dataclass
class WeightedAdjacency:
    """Sparse symmetric nonnegative adjacency matrix over tree vertices.

    Edges stored once, (row < col), sorted.  beta is the weight-shaping
    exponent; tail_weight records the special lower-tail edge value.
    """

    n_vertices: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    beta: float = 0.25
    tail_weight: float = field(default=float("nan"))

    def __post_init__(self):
        order = np.lexsort((self.cols, self.rows))
        self.rows = np.asarray(self.rows)[order]
        self.cols = np.asarray(self.cols)[order]
        self.weights = np.asarray(self.weights, dtype=float)[order]
        if (self.rows >= self.cols).any():
            raise ValueError("edges must be stored with row < col")
        if (self.weights < 0).any():
            raise ValueError("weights must be nonnegative")

    @classmethod
    def from_edges(cls, n_vertices: int, edges, beta: float = 0.25) -> "WeightedAdjacency":
        """Build from (u, v, w) triples; orientation is normalized."""
        rows, cols, ws = [], [], []
        for u, v, w in edges:
            if u == v:
                raise ValueError("no self loops in an adjacency matrix")
            rows.append(min(u, v))
            cols.append(max(u, v))
            ws.append(w)
        return cls(n_vertices, np.array(rows, dtype=int), np.array(cols, dtype=int),
                   np.array(ws, dtype=float), beta=beta)

    def to_dense(self, threshold: int = DEFAULT_DENSE_THRESHOLD) -> np.ndarray:
        if self.n_vertices > threshold:
            raise SizeOverThreshold(
                f"{self.n_vertices} vertices exceeds dense threshold {threshold}")
        h = np.zeros((self.n_vertices, self.n_vertices))
        h[self.rows, self.cols] = self.weights
        h[self.cols, self.rows] = self.weights
        return h

    def to_csr(self) -> sp.csr_matrix:
        m = sp.coo_matrix(
            (np.concatenate([self.weights, self.weights]),
             (np.concatenate([self.rows, self.cols]),
              np.concatenate([self.cols, self.rows]))),
            shape=(self.n_vertices, self.n_vertices))
        return m.tocsr()

    def neighbor_lists(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in zip(self.rows, self.cols):
            nbrs[u].append(int(v))
            nbrs[v].append(int(u))
        return [sorted(ns) for ns in nbrs]

    def components(self) -> np.ndarray:
        """Component label per vertex (zero-weight edges count as absent)."""
        mask = self.weights > 0
        m = sp.coo_matrix(
            (np.ones(mask.sum()), (self.rows[mask], self.cols[mask])),
            shape=(self.n_vertices, self.n_vertices))
        _, labels = connected_components(m, directed=False)
        return labels

    def export_coordinates(self) -> str:
        """Coordinate-format text: row col weight, 0-indexed, 17 sig digits."""
        lines = [f"{r} {c} {w:.17g}" for r, c, w in zip(self.rows, self.cols, self.weights)]
        return "\n".join(lines) + "\n"


def build_tree_with_tail(ast: FormulaAst) -> GateTree:
    """Attach the two tail vertices below the formula root and number
    vertices in preorder."""
    parent = {R2: -1, R1: R2, ROOT: R1}
    children: dict[int, list[int]] = {R2: [R1], R1: [ROOT]}
    leaf_var: dict[int, int] = {}
    counter = [ROOT]

    def rec(node: FormulaAst, my: int):
        children.setdefault(my, [])
        if isinstance(node, Leaf):
            leaf_var[my] = node.var
            return
        for c in node.children:
            counter[0] += 1
            ci = counter[0]
            parent[ci] = my
            children[my].append(ci)
            rec(c, ci)

    rec(ast, ROOT)
    n = counter[0] + 1
    parent_arr = np.array([parent[v] for v in range(n)], dtype=int)
    children_list = [children.get(v, []) for v in range(n)]
    lv = np.zeros(n, dtype=int)
    for v, var in leaf_var.items():
        lv[v] = var
    s = np.zeros(n, dtype=np.int64)
    depth = np.zeros(n, dtype=int)
    for v in range(n - 1, ROOT - 1, -1):
        if lv[v]:
            s[v] = 1
        else:
            s[v] = sum(s[c] for c in children_list[v])
            depth[v] = 1 + max(depth[c] for c in children_list[v])
    s[R1] = s[R2] = s[ROOT]
    return GateTree(
        parent=parent_arr,
        children=children_list,
        s=s,
        leaf_var=lv,
        n_vars=int(lv.max()),
        depth=int(depth[ROOT]),
    )


def edge_weights(tree: GateTree, beta: float = 0.25) -> WeightedAdjacency:
    """All-zero-input adjacency matrix: interior edges carry
    s_v^beta / s_p^(1/2-beta); the mid-tail edge follows the same rule and
    the lower tail edge carries 1/(sqrt(sigma_minus(root)) N^(1/2-beta)).
    Every leaf edge is present (all leaves treated as evaluating to 0).
    """
    if not 0.0 < beta <= 0.5:
        raise ValueError(f"beta must be in (0, 1/2], got {beta}")
    sm, _ = tree.path_sums(beta)
    n_leaves = float(tree.s[ROOT])
    rows, cols, ws = [], [], []
    for v in range(1, tree.n_vertices):
        p = int(tree.parent[v])
        if v == R1:
            w = 1.0 / (np.sqrt(sm[ROOT]) * n_leaves ** (0.5 - beta))
        else:
            w = float(tree.s[v]) ** beta / float(tree.s[p]) ** (0.5 - beta)
        rows.append(min(p, v))
        cols.append(max(p, v))
        ws.append(w)
    adj = WeightedAdjacency(tree.n_vertices, np.array(rows), np.array(cols),
                            np.array(ws), beta=beta)
    adj.tail_weight = 1.0 / (np.sqrt(sm[ROOT]) * n_leaves ** (0.5 - beta))
    if beta <= 0.25 and (adj.weights > 1.0 + 1e-12).any():
        raise AssertionError("weights above 1 at beta <= 1/4")
    return adj


def apply_input(h0: WeightedAdjacency, tree: GateTree, x) -> WeightedAdjacency:
    """Input-dependent matrix: drop the parent edge of every leaf whose
    variable reads 1; everything else is unchanged."""
    bits = as_bits(x, tree.n_vars)
    drop = np.zeros(len(h0.rows), dtype=bool)
    for i, (u, v) in enumerate(zip(h0.rows, h0.cols)):
        leaf = v if tree.leaf_var[v] else (u if tree.leaf_var[u] else 0)
        if leaf and bits[tree.leaf_var[leaf] - 1] == 1:
            drop[i] = True
    adj = WeightedAdjacency(h0.n_vertices, h0.rows[~drop], h0.cols[~drop],
                            h0.weights[~drop], beta=h0.beta)
    adj.tail_weight = h0.tail_weight
    return adj


def norm_upper_bound(h: WeightedAdjacency) -> float:
    """Cheap upper bound on the spectral norm: the maximum row 1-norm."""
    sums = np.zeros(h.n_vertices)
    np.add.at(sums, h.rows, h.weights)
    np.add.at(sums, h.cols, h.weights)
    return float(sums.max(initial=0.0))
