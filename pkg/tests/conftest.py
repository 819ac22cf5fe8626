"""Shared fixtures: the formula corpus and independent evaluation oracles."""

import numpy as np
import pytest

from nandwalk.formula import (
    Leaf,
    MixedGate,
    generate_balanced,
    generate_chain,
    generate_random,
)

# 20 seeded random trees, sizes cycling 4..12 (leaf counts <= 12)
RANDOM_CORPUS = [(4 + (i % 9), i) for i in range(20)]


def corpus_small():
    """The correctness-sweep corpus: balanced(1..3), chain(2..4), the
    seeded random trees."""
    items = []
    for d in (1, 2, 3):
        items.append((f"balanced:{d}", generate_balanced(d)))
    for n in (2, 3, 4):
        items.append((f"chain:{n}", generate_chain(n)))
    for n, seed in RANDOM_CORPUS:
        items.append((f"random:{n}:{seed}", generate_random(n, seed)))
    return items


def corpus_spectral():
    """The spectral-sweep corpus, up to 16 leaves."""
    items = corpus_small()
    items.append(("balanced:4", generate_balanced(4)))
    for n in (5, 6, 7, 8):
        items.append((f"chain:{n}", generate_chain(n)))
    return items


@pytest.fixture(scope="session")
def small_corpus():
    return corpus_small()


@pytest.fixture(scope="session")
def spectral_corpus():
    return corpus_spectral()


def eval_mixed(node, bits) -> int:
    """Independent mixed-gate evaluator (test-side oracle)."""
    if isinstance(node, Leaf):
        return int(bits[node.var - 1])
    vals = [eval_mixed(c, bits) for c in node.children]
    if isinstance(node, MixedGate):
        kind = node.kind
    else:
        kind = "NAND"
    if kind == "NOT":
        return 1 - vals[0]
    if kind == "AND":
        return int(all(vals))
    if kind == "OR":
        return int(any(vals))
    prod = 1
    for v in vals:
        prod *= v
    return 1 - prod


def all_bits(v: int) -> np.ndarray:
    grid = np.indices((2,) * v, dtype=np.uint8)
    return grid.reshape(v, -1).T
