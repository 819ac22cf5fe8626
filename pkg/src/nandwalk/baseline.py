"""Classical reference evaluators.

brute_force_truth_table is the ground-truth oracle used by every sweep;
alpha_beta_evaluate is the zero-error pruning evaluator whose expected
leaf-query count on the adversarial input scales as N^0.754 on balanced
binary trees.
"""

from __future__ import annotations

import numpy as np

from nandwalk.formula import FormulaAst, Gate, Leaf, as_bits, n_vars


def alpha_beta_evaluate(ast: FormulaAst, x, seed: int = 0) -> tuple[int, int]:
    """(value, leaves read): children in seeded uniformly random order,
    stopping at the first 0-child (the gate is then 1)."""
    bits = as_bits(x, n_vars(ast))
    rng = np.random.default_rng(seed)
    queries = [0]

    def rec(node: FormulaAst) -> int:
        if isinstance(node, Leaf):
            queries[0] += 1
            return int(bits[node.var - 1])
        order = rng.permutation(len(node.children))
        for i in order:
            if rec(node.children[i]) == 0:
                return 1
        return 0

    value = rec(ast)
    return value, queries[0]


def brute_force_truth_table(ast: FormulaAst) -> np.ndarray:
    """phi over all 2^V assignments (x1 the most significant bit), V <= 20."""
    v = n_vars(ast)
    if v > 20:
        raise ValueError(f"{v} variables is too many for a truth table")
    cols = 1 << v
    idx = np.arange(cols, dtype=np.uint32)
    leaf_bits = [(idx >> (v - 1 - i)) & 1 for i in range(v)]
    return _iterative_table(ast, leaf_bits, cols)


def _iterative_table(ast, leaf_bits, cols) -> np.ndarray:
    vals: dict[int, np.ndarray] = {}
    stack = [(ast, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            vals[id(node)] = leaf_bits[node.var - 1].astype(np.uint8)
        elif expanded:
            prod = np.ones(cols, dtype=np.uint8)
            for c in node.children:
                prod &= vals[id(c)]
            vals[id(node)] = 1 - prod
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return vals[id(ast)]


def worst_case_input(ast: FormulaAst, target: int = 1) -> np.ndarray:
    """Adversarial assignment for pruning: a gate forced to 1 gets exactly
    one 0-child (the rest 1), a gate forced to 0 gets all children 1.

    On balanced binary trees the expected leaf-query count of
    alpha_beta_evaluate then satisfies q(d+1) pairs (w0, w1) via
    w0' = 2 w1, w1' = w0 + w1/2, giving growth (1 + sqrt(33))/4 per level.
    """
    bits = np.zeros(n_vars(ast), dtype=np.uint8)
    stack: list[tuple[FormulaAst, int]] = [(ast, target)]
    while stack:
        node, want = stack.pop()
        if isinstance(node, Leaf):
            bits[node.var - 1] = want
            continue
        if want == 1:
            stack.append((node.children[0], 0))
            stack.extend((c, 1) for c in node.children[1:])
        else:
            stack.extend((c, 1) for c in node.children)
    return bits


def mean_alpha_beta_queries(ast: FormulaAst, x, trials: int, seed: int = 0) -> float:
    """Mean leaf-query count over seeded child-order randomizations."""
    total = 0
    for i in range(trials):
        _, q = alpha_beta_evaluate(ast, x, seed=seed + i)
        total += q
    return total / trials
