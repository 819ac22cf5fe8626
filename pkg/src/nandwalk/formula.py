"""NAND formulas: parsing, generation, rewriting and classical evaluation.

A formula is a rooted tree of NAND gates over indexed variables x1..xV.
The NAND gate on bits y1..yk evaluates to 1 - y1*...*yk; a 1-ary NAND is
NOT.  Size N counts leaves with multiplicity (a repeated variable is a
separate leaf sharing its input bit).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

GATE_KINDS = ("NAND", "AND", "OR", "NOT")


class FormulaSyntaxError(ValueError):
    """Parse failure; carries the 0-based text position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DimensionError(ValueError):
    """An input assignment whose length does not match the variable count."""


class SizeLimitError(ValueError):
    """A requested formula exceeds the configured size cap."""


@dataclass(frozen=True)
class Leaf:
    """Variable occurrence; var is 1-based."""

    var: int

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")


@dataclass(frozen=True)
class Gate:
    """NAND gate over an ordered, non-empty child tuple."""

    children: tuple["FormulaAst", ...]

    def __post_init__(self):
        if len(self.children) == 0:
            raise ValueError("a gate needs at least one child")


FormulaAst = Union[Leaf, Gate]


@dataclass(frozen=True)
class MixedGate:
    """Gate of any supported kind; intermediate parse representation."""

    kind: str
    children: tuple

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.children) == 0:
            raise ValueError("a gate needs at least one child")
        if self.kind == "NOT" and len(self.children) != 1:
            raise ValueError("NOT takes exactly one child")


MixedAst = Union[Leaf, MixedGate]


@dataclass(frozen=True)
class FormulaStats:
    """Structural statistics of a NAND formula.

    sigma_minus / sigma_plus are the input-independent path sums: maxima
    over root-to-leaf paths (both endpoints included) of sum(1/sqrt(s_w))
    and sum(s_w).  They upper-bound the evaluation-dependent quantities
    used in the spectral analysis, so every gap bound stated in terms of
    the latter remains valid with these.
    """

    n_leaves: int
    n_vars: int
    depth: int
    sigma_minus: float
    sigma_plus: float
    approx_balanced: bool
    balanced_binary: bool


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(NAND|AND|OR|NOT|x[0-9]+|[(),])")


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                return
            bad_at = len(text) - len(rest)
            raise FormulaSyntaxError(f"unexpected character {rest[0]!r}", bad_at)
        yield m.group(1), m.start(1)
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, want: str):
        tok, pos = self.next()
        if tok != want:
            raise FormulaSyntaxError(f"expected {want!r}, found {tok!r}", pos)

    def parse(self) -> MixedAst:
        node = self.expr()
        tok, pos = self.peek()
        if tok is not None:
            raise FormulaSyntaxError(f"trailing input {tok!r}", pos)
        return node

    def expr(self) -> MixedAst:
        tok, pos = self.next()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", pos)
        if tok.startswith("x"):
            idx = int(tok[1:])
            if tok[1] == "0":
                raise FormulaSyntaxError("variable index must not start with 0", pos)
            return Leaf(idx)
        if tok in GATE_KINDS:
            self.expect("(")
            children = [self.expr()]
            while True:
                nxt, npos = self.next()
                if nxt == ")":
                    break
                if nxt != ",":
                    raise FormulaSyntaxError(f"expected ',' or ')', found {nxt!r}", npos)
                children.append(self.expr())
            if tok == "NOT" and len(children) != 1:
                raise FormulaSyntaxError("NOT takes exactly one child", pos)
            return MixedGate(tok, tuple(children))
        raise FormulaSyntaxError(f"unexpected token {tok!r}", pos)


def parse_mixed(text: str) -> MixedAst:
    """Parse the prefix grammar into a mixed AND/OR/NOT/NAND tree."""
    return _Parser(text).parse()


def parse_formula(text: str) -> FormulaAst:
    """Parse formula text and rewrite it into an all-NAND tree.

    Variable indices must form a contiguous range 1..V.
    """
    ast = to_nand(parse_mixed(text))
    validate(ast)
    return ast


def validate(ast: FormulaAst) -> None:
    """Check that variable indices cover 1..V without gaps."""
    seen = set(leaf_vars(ast))
    v = max(seen)
    missing = set(range(1, v + 1)) - seen
    if missing:
        raise ValueError(f"variable indices have gaps: missing x{min(missing)}")


# ---------------------------------------------------------------------------
# Rewriting
# ---------------------------------------------------------------------------


def to_nand(ast: MixedAst) -> FormulaAst:
    """Rewrite AND/OR/NOT gates into NAND, preserving semantics.

    NOT(e) -> NAND(e); AND(es) -> NAND(NAND(es)); OR(es) -> NAND(NAND(e) ...).
    """
    if isinstance(ast, Leaf):
        return ast
    if isinstance(ast, Gate):
        return Gate(tuple(to_nand(c) for c in ast.children))
    kids = tuple(to_nand(c) for c in ast.children)
    if ast.kind == "NAND":
        return Gate(kids)
    if ast.kind == "NOT":
        return Gate(kids)
    if ast.kind == "AND":
        return Gate((Gate(kids),))
    # OR: De Morgan
    return Gate(tuple(Gate((k,)) for k in kids))


# ---------------------------------------------------------------------------
# Evaluation and statistics
# ---------------------------------------------------------------------------


def as_bits(x, n_vars: int) -> np.ndarray:
    """Normalize an assignment (iterable/str of 0,1) to a uint8 array."""
    if isinstance(x, str):
        if not set(x) <= {"0", "1"}:
            raise ValueError(f"input bits must be 0/1, got {x!r}")
        arr = np.frombuffer(x.encode(), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(x, dtype=np.uint8)
    if arr.ndim != 1 or arr.size != n_vars:
        raise DimensionError(f"expected {n_vars} input bits, got {arr.size}")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("input bits must be 0 or 1")
    return arr


def leaf_vars(ast: FormulaAst) -> list[int]:
    """Variable index of every leaf, in left-to-right order."""
    out: list[int] = []
    stack = [ast]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            out.append(node.var)
        else:
            stack.extend(reversed(node.children))
    return out


def n_vars(ast: FormulaAst) -> int:
    return max(leaf_vars(ast))


def evaluate_classical(ast: FormulaAst, x) -> int:
    """phi(x): leaf -> x_i, gate -> 1 - product of child values.

    Iterative post-order so that chain formulas of any depth evaluate.
    """
    bits = as_bits(x, n_vars(ast))
    vals: dict[int, int] = {}
    stack: list[tuple[FormulaAst, bool]] = [(ast, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            vals[id(node)] = int(bits[node.var - 1])
        elif expanded:
            prod = 1
            for c in node.children:
                prod *= vals[id(c)]
            vals[id(node)] = 1 - prod
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return vals[id(ast)]


def subformula_sizes(ast: FormulaAst) -> dict[int, int]:
    """id(node) -> leaf count of the subformula (s_v)."""
    sizes: dict[int, int] = {}
    stack: list[tuple[FormulaAst, bool]] = [(ast, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            sizes[id(node)] = 1
        elif expanded:
            sizes[id(node)] = sum(sizes[id(c)] for c in node.children)
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return sizes


def _depth(ast: FormulaAst) -> int:
    depths: dict[int, int] = {}
    stack: list[tuple[FormulaAst, bool]] = [(ast, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            depths[id(node)] = 0
        elif expanded:
            depths[id(node)] = 1 + max(depths[id(c)] for c in node.children)
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return depths[id(ast)]


def path_sums(ast: FormulaAst, beta: float = 0.25) -> tuple[float, float]:
    """(sigma_minus, sigma_plus) at the root: maxima over root-to-leaf
    paths of sum(1/s_w^(2*beta)) and sum(s_w), path endpoints included."""
    sizes = subformula_sizes(ast)
    sm: dict[int, float] = {}
    sp: dict[int, float] = {}
    stack: list[tuple[FormulaAst, bool]] = [(ast, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Leaf):
            sm[id(node)] = 1.0
            sp[id(node)] = 1.0
        elif expanded:
            s = sizes[id(node)]
            sm[id(node)] = s ** (-2.0 * beta) + max(sm[id(c)] for c in node.children)
            sp[id(node)] = s + max(sp[id(c)] for c in node.children)
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in node.children)
    return sm[id(ast)], sp[id(ast)]


def is_balanced_binary(ast: FormulaAst) -> bool:
    """True for full binary NAND trees with all leaves at equal depth
    (includes the single-leaf tree)."""
    def rec(node):
        # returns depth if uniform, else None
        if isinstance(node, Leaf):
            return 0
        if len(node.children) != 2:
            return None
        d = [rec(c) for c in node.children]
        if d[0] is None or d[0] != d[1]:
            return None
        return d[0] + 1

    return rec(ast) is not None


def compute_stats(ast: FormulaAst) -> FormulaStats:
    """Structural statistics: N, depth, path sums, balance flags."""
    nv = n_vars(ast)
    n = subformula_sizes(ast)[id(ast)]
    d = _depth(ast)
    sm, sp = path_sums(ast)
    return FormulaStats(
        n_leaves=n,
        n_vars=nv,
        depth=d,
        sigma_minus=sm,
        sigma_plus=sp,
        approx_balanced=(sm <= 4.0 and sp <= 4.0 * n),
        balanced_binary=is_balanced_binary(ast),
    )


# ---------------------------------------------------------------------------
# Fan-in expansion
# ---------------------------------------------------------------------------


def expand_fanin(ast: FormulaAst, max_fanin: int) -> FormulaAst:
    """Equivalent formula in which every gate has fan-in <= max_fanin.

    Wide gates are rewritten as NAND over double-negated groups:
    NAND(c1..cm) = NAND(AND(group1), ..., AND(groupj)) with
    AND(g) = NAND(NAND(g)).
    """
    if max_fanin < 2:
        raise ValueError("max_fanin must be >= 2")

    def rec(node: FormulaAst) -> FormulaAst:
        if isinstance(node, Leaf):
            return Leaf(node.var)
        kids = [rec(c) for c in node.children]
        while len(kids) > max_fanin:
            grouped = []
            for i in range(0, len(kids), max_fanin):
                chunk = tuple(kids[i : i + max_fanin])
                if len(chunk) == 1:
                    grouped.append(chunk[0])
                else:
                    grouped.append(Gate((Gate(chunk),)))  # AND of the chunk
            kids = grouped
        return Gate(tuple(kids))

    return rec(ast)


# ---------------------------------------------------------------------------
# Rebalancing
# ---------------------------------------------------------------------------

_ZERO = "const0"
_ONE = "const1"


def _substitute(node: FormulaAst, target: FormulaAst, value: int):
    """Replace the subtree `target` by a constant and simplify constants
    away bottom-up.  Returns a FormulaAst, _ZERO or _ONE."""
    if node is target:
        return _ONE if value else _ZERO
    if isinstance(node, Leaf):
        return node
    kids = [_substitute(c, target, value) for c in node.children]
    if any(k is _ZERO for k in kids):
        return _ONE
    live = tuple(k for k in kids if k is not _ONE)
    if not live:
        return _ZERO
    return Gate(live)


def _subtree_in_range(ast: FormulaAst, lo: int, hi: int):
    """A descendant gate-tree node whose leaf count lies in [lo, hi],
    preferring the largest; with fan-in <= 2 one always exists."""
    sizes = subformula_sizes(ast)
    node = ast
    while sizes[id(node)] > hi:
        node = max(node.children, key=lambda c: sizes[id(c)])
    if sizes[id(node)] < lo:
        raise AssertionError("no split point; is the tree fan-in <= 2?")
    return node


def _inversions_above(root: FormulaAst, target: FormulaAst) -> int:
    """Number of gates strictly above target on its root path."""
    path: list[int] = []

    def rec(node, depth):
        if node is target:
            path.append(depth)
            return True
        if isinstance(node, Leaf):
            return False
        return any(rec(c, depth + 1) for c in node.children)

    rec(root, 0)
    return path[0]


def rebalance(ast: FormulaAst, k: int = 2) -> FormulaAst:
    """Equivalent fan-in-<=2 formula with logarithmic depth.

    Recursive restructuring: split at a subtree S with size in
    [N/3, 2N/3]; because the root path through S inverts once per NAND
    gate, the whole formula is monotone (even path length) or antitone
    (odd) in S's value and can be recombined with a single copy of S:

        monotone:  F = OR(AND(S, F[S<-1]), F[S<-0])
        antitone:  F = OR(AND(NOT S, F[S<-0]), F[S<-1])

    The depth and size bounds of the guarantee
    (depth <= 9 ln2 * k * log2 N, size <= N^(1 + 1/log2 k)) are asserted
    on the result, not by construction.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    result = _rebalance(_strip_double_not(expand_fanin(ast, 2)))
    if result in (_ZERO, _ONE):
        raise ValueError("formula is constant; cannot be represented")
    n = subformula_sizes(ast)[id(ast)]
    depth_bound = 9.0 * math.log(2.0) * k * max(math.log2(n), 1.0)
    size_bound = float(n) ** (1.0 + 1.0 / math.log2(k))
    got_depth = _depth(result)
    got_size = subformula_sizes(result)[id(result)]
    if got_depth > depth_bound:
        raise AssertionError(f"rebalance depth {got_depth} exceeds bound {depth_bound:.1f}")
    if got_size > size_bound + 1e-9:
        raise AssertionError(f"rebalance size {got_size} exceeds bound {size_bound:.1f}")
    return result


def _not(node):
    if node is _ZERO:
        return _ONE
    if node is _ONE:
        return _ZERO
    return Gate((node,))


def _and2(a, b):
    if a is _ZERO or b is _ZERO:
        return _ZERO
    if a is _ONE:
        return b
    if b is _ONE:
        return a
    return Gate((Gate((a, b)),))


def _or2(a, b):
    if a is _ONE or b is _ONE:
        return _ONE
    if a is _ZERO:
        return b
    if b is _ZERO:
        return a
    return Gate((Gate((a,)), Gate((b,))))


def _strip_double_not(node):
    """Collapse NAND(NAND(e)) -> e everywhere (keeps NOT chains shallow)."""
    if node in (_ZERO, _ONE) or isinstance(node, Leaf):
        return node
    kids = tuple(_strip_double_not(c) for c in node.children)
    if len(kids) == 1 and isinstance(kids[0], Gate) and len(kids[0].children) == 1:
        return kids[0].children[0]
    return Gate(kids)


def _rebalance(ast):
    ast = _strip_double_not(ast)
    if ast in (_ZERO, _ONE) or isinstance(ast, Leaf):
        return ast
    sizes = subformula_sizes(ast)
    n = sizes[id(ast)]
    if n <= 3:
        return ast
    split = _subtree_in_range(ast, (n + 2) // 3, (2 * n) // 3)
    s_bal = _rebalance(split)
    f1 = _rebalance(_substitute(ast, split, 1))
    f0 = _rebalance(_substitute(ast, split, 0))
    if _inversions_above(ast, split) % 2 == 0:
        # monotone in S: F[S<-0] <= F[S<-1]
        return _or2(_and2(s_bal, f1), f0)
    return _or2(_and2(_not(s_bal), f0), f1)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

MAX_GENERATED_LEAVES = 1 << 20


def generate_balanced(n: int) -> FormulaAst:
    """Full binary NAND tree of depth n over 2^n distinct variables."""
    if n < 0:
        raise ValueError("depth must be >= 0")
    if 2**n > MAX_GENERATED_LEAVES:
        raise SizeLimitError(f"balanced({n}) exceeds the size cap")
    counter = [0]

    def rec(d: int) -> FormulaAst:
        if d == 0:
            counter[0] += 1
            return Leaf(counter[0])
        return Gate((rec(d - 1), rec(d - 1)))

    return rec(n)


def generate_chain(n_leaves: int) -> FormulaAst:
    """Maximally imbalanced tree x1 NAND (x2 NAND (... NAND xN))."""
    if n_leaves < 1:
        raise ValueError("need at least one leaf")
    if n_leaves > MAX_GENERATED_LEAVES:
        raise SizeLimitError(f"chain({n_leaves}) exceeds the size cap")
    node: FormulaAst = Leaf(n_leaves)
    for i in range(n_leaves - 1, 0, -1):
        node = Gate((Leaf(i), node))
    return node


def generate_random(n_leaves: int, seed: int) -> FormulaAst:
    """Reproducible random tree with gate fan-in in {1, 2} over distinct
    variables x1..xN."""
    if n_leaves < 1:
        raise ValueError("need at least one leaf")
    if n_leaves > MAX_GENERATED_LEAVES:
        raise SizeLimitError(f"random({n_leaves}) exceeds the size cap")
    rng = np.random.default_rng(seed)
    counter = [0]

    def rec(budget: int) -> FormulaAst:
        if budget == 1:
            # unary NAND chains with probability 1/4, never at leaves' expense
            if rng.random() < 0.25:
                return Gate((rec(1),))
            counter[0] += 1
            return Leaf(counter[0])
        left = int(rng.integers(1, budget))
        return Gate((rec(left), rec(budget - left)))

    return rec(n_leaves)


def generate(spec: str) -> FormulaAst:
    """Generate from a family spec: balanced:N_DEPTH, chain:N, random:N:SEED."""
    parts = spec.split(":")
    family = parts[0]
    try:
        if family == "balanced" and len(parts) == 2:
            return generate_balanced(int(parts[1]))
        if family == "chain" and len(parts) == 2:
            return generate_chain(int(parts[1]))
        if family == "random" and len(parts) == 3:
            return generate_random(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad family spec {spec!r}: {exc}") from exc
    raise ValueError(
        f"bad family spec {spec!r}; expected balanced:DEPTH, chain:N or random:N:SEED"
    )


def format_formula(ast: FormulaAst) -> str:
    """Render an AST back to grammar text."""
    if isinstance(ast, Leaf):
        return f"x{ast.var}"
    return "NAND(" + ",".join(format_formula(c) for c in ast.children) + ")"
