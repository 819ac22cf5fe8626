"""Quantization of a nonnegative symmetric matrix into a coined walk.

The walk acts on directed edges: swap the pair, then reflect each
vertex's outgoing amplitudes about its coin vector.  The eigen
correspondence between the vertex-space matrix M = P o P^T and the walk
unitary (eigenvalues -lambda +- i sqrt(1 - lambda^2)) is checked
numerically by `verify_correspondence`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from nandwalk import kernels
from nandwalk.formula import as_bits
from nandwalk.hamiltonian import GateTree, R1, R2, WeightedAdjacency, norm_upper_bound

# row-norm deficits below this are treated as exact zeros (the rows are
# renormalized), so oracle-flipped leaf coins become exact self loops
DEFICIT_SNAP = 1e-10


@dataclass
class EdgeSpace:
    """Ordered basis of directed pairs, grouped by first vertex.

    Block v occupies positions ptr[v]:ptr[v+1] and lists v's sorted
    neighbors followed by the self-loop pair (v, v).  swap is the pair
    reversal involution (fixing self loops).
    """

    n_vertices: int
    firsts: np.ndarray
    seconds: np.ndarray
    ptr: np.ndarray
    swap: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.firsts)

    def index(self, v: int, w: int) -> int:
        lo, hi = self.ptr[v], self.ptr[v + 1]
        for j in range(lo, hi):
            if self.seconds[j] == w:
                return j
        raise KeyError(f"({v}, {w}) is not a basis pair")


def build_edge_space(adjacency: list[list[int]]) -> EdgeSpace:
    firsts, seconds, ptr = [], [], [0]
    for v, nbrs in enumerate(adjacency):
        for w in nbrs:
            firsts.append(v)
            seconds.append(w)
        firsts.append(v)
        seconds.append(v)
        ptr.append(len(firsts))
    firsts = np.array(firsts, dtype=np.int64)
    seconds = np.array(seconds, dtype=np.int64)
    ptr = np.array(ptr, dtype=np.int64)
    index = {(int(a), int(b)): j for j, (a, b) in enumerate(zip(firsts, seconds))}
    swap = np.array([index[(int(b), int(a))] for a, b in zip(firsts, seconds)],
                    dtype=np.int64)
    return EdgeSpace(len(adjacency), firsts, seconds, ptr, swap)


@dataclass
class TransitionFactor:
    """Unit-row amplitude factor of the normalized matrix.

    amp[j] = sqrt(p_{vw}) at basis position j = (v, w); the self-loop
    position of each row absorbs any row-norm deficit left by a strict
    norm upper bound.
    """

    space: EdgeSpace
    amp: np.ndarray
    n_h: float
    lambda_max: float
    deficit: np.ndarray

    def row_norms(self) -> np.ndarray:
        return np.sqrt(np.add.reduceat(self.amp**2, self.space.ptr[:-1]))

    def matrix(self) -> np.ndarray:
        """P as a dense vertex-by-vertex matrix (p amplitudes, not squares)."""
        n = self.space.n_vertices
        p = np.zeros((n, n))
        p[self.space.firsts, self.space.seconds] = self.amp
        return p


@dataclass
class CoinedWalk:
    """U = (coin reflection) after (pair swap), plus the oracle phase layer."""

    space: EdgeSpace
    amp: np.ndarray
    transition: TransitionFactor
    tree: GateTree | None = None
    row_var: np.ndarray = field(default=None)  # 1-based variable per row, 0 none
    start_index: int = -1

    @property
    def dim(self) -> int:
        return self.space.dim

    def start_state(self) -> np.ndarray:
        psi = np.zeros(self.dim, dtype=np.complex128)
        psi[self.start_index] = 1.0
        return psi

    def oracle_signs(self, x) -> np.ndarray:
        """+-1 per basis position: -1 where the first register is a leaf
        reading 1."""
        if self.tree is None:
            raise ValueError("walk has no leaf/variable structure")
        bits = as_bits(x, self.tree.n_vars)
        signs = np.ones(self.dim)
        mask = self.row_var > 0
        signs[mask] = 1.0 - 2.0 * bits[self.row_var[mask] - 1]
        return signs

    def oracle_signs_batch(self, xs: np.ndarray) -> np.ndarray:
        """(dim, n_inputs) sign matrix for a batch of assignments."""
        xs = np.asarray(xs, dtype=np.uint8)
        signs = np.ones((self.dim, xs.shape[0]))
        mask = self.row_var > 0
        signs[mask] = 1.0 - 2.0 * xs[:, self.row_var[mask] - 1].T
        return signs

    def step(self, state: np.ndarray, signs: np.ndarray | None = None) -> np.ndarray:
        """One application of U (or of oracle * U when signs are given)."""
        if signs is None:
            signs = np.ones(self.dim)
        out = np.empty_like(state)
        kernels.coined_step(np.ascontiguousarray(state, dtype=np.complex128),
                            out, self.space.swap, self.space.ptr, self.amp, signs)
        return out

    def unitary_dense(self, x=None) -> np.ndarray:
        """Dense matrix of U (with oracle phases when x is given)."""
        u = np.empty((self.dim, self.dim), dtype=np.complex128)
        signs = self.oracle_signs(x) if x is not None else None
        e = np.zeros(self.dim, dtype=np.complex128)
        for j in range(self.dim):
            e[:] = 0
            e[j] = 1
            u[:, j] = self.step(e, signs)
        return u

    def coin_operator_t(self, x=None) -> np.ndarray:
        """Dense (dim x n_vertices) isometry mapping vertex v to its coin
        state.  With x, the coin of a leaf reading 1 is the unit vector
        orthogonal to its original coin within the 2-dim leaf block (the
        oracle's block-wide sign flip is a reflection about exactly that
        vector); with snapped deficits this is the pure self loop."""
        t = np.zeros((self.dim, self.space.n_vertices))
        t[np.arange(self.dim), self.space.firsts] = self.amp
        if x is not None:
            bits = as_bits(x, self.tree.n_vars)
            for v in self.tree.leaves:
                if bits[self.tree.leaf_var[v] - 1] == 1:
                    lo, hi = self.space.ptr[v], self.space.ptr[v + 1]
                    if hi - lo != 2:
                        raise ValueError("leaf block must be (parent, self-loop)")
                    a, b = self.amp[lo], self.amp[lo + 1]
                    t[lo:hi, v] = (-b, a)
        return t

    def m_matrix(self, x=None) -> np.ndarray:
        """M = P o P^T of the (oracle-adjusted) walk."""
        t = self.coin_operator_t(x)
        s = np.zeros_like(t)
        s[self.space.swap] = t
        return t.T @ s


def principal_eigenvector(h: WeightedAdjacency, tol: float = 1e-13,
                          max_iter: int = 1_000_000) -> tuple[float, np.ndarray]:
    """Top eigenpair of a connected nonnegative symmetric matrix by power
    iteration with the deterministic all-ones start.

    The iteration runs on H + cI (c = row-sum bound): the plain matrix has
    a spectrum symmetric about zero on bipartite graphs, so unshifted
    power iteration would not converge.  Returns (lambda_max, delta) with
    delta entrywise positive and the residual below tol * lambda_max.
    """
    labels = h.components()
    if labels.max() != 0:
        raise ValueError("matrix is disconnected; quantize per component")
    if len(h.weights) == 0 or not (h.weights > 0).any():
        raise ValueError("zero matrix has no principal eigenvector")
    mat = h.to_csr()
    shift = norm_upper_bound(h)
    v = np.full(h.n_vertices, 1.0 / np.sqrt(h.n_vertices))
    rayleigh = 0.0
    for _ in range(max_iter):
        hv = mat @ v
        lam = float(v @ hv)
        resid = np.linalg.norm(hv - lam * v)
        if resid <= tol * max(abs(lam), 1.0) and abs(lam - rayleigh) < 1e-13:
            break
        rayleigh = lam
        w = hv + shift * v
        v = w / np.linalg.norm(w)
    else:
        raise RuntimeError("power iteration did not converge")
    if v.min() <= 0:
        raise RuntimeError("principal eigenvector is not entrywise positive")
    return lam, v


def classical_transition(h: WeightedAdjacency, delta: np.ndarray, n_h: float,
                         lambda_max: float | None = None) -> TransitionFactor:
    """Row-normalized square-root factorization of h / n_h.

    p_{vw} = (h_{vw}/n_h) delta_w / delta_v; rows then have squared norm
    lambda_max / n_h, and any deficit is placed on the self-loop
    amplitude.  Deficits below DEFICIT_SNAP are zeroed and the row is
    renormalized exactly.
    """
    if (delta <= 0).any():
        raise ValueError("delta must be entrywise positive")
    if lambda_max is None:
        lambda_max = float(delta @ (h.to_csr() @ delta)) / float(delta @ delta)
    space = build_edge_space(h.neighbor_lists())
    amp = np.zeros(space.dim)
    hd = h.to_dense(threshold=max(h.n_vertices, 1))
    off_diag = space.firsts != space.seconds
    amp[off_diag] = np.sqrt(
        hd[space.firsts[off_diag], space.seconds[off_diag]] / n_h
        * delta[space.seconds[off_diag]] / delta[space.firsts[off_diag]])
    sq = np.add.reduceat(amp**2, space.ptr[:-1])
    deficit = np.maximum(0.0, 1.0 - sq)
    self_pos = space.ptr[1:] - 1
    big = deficit > DEFICIT_SNAP
    amp[self_pos[big]] = np.sqrt(deficit[big])
    # exact unit rows
    norms = np.sqrt(np.add.reduceat(amp**2, space.ptr[:-1]))
    amp /= np.repeat(norms, np.diff(space.ptr))
    return TransitionFactor(space, amp, float(n_h), float(lambda_max),
                            np.where(big, deficit, 0.0))


def build_walk(p: TransitionFactor, tree: GateTree | None = None) -> CoinedWalk:
    """Assemble the coined walk from a unit-row transition factor."""
    norms = p.row_norms()
    if np.abs(norms - 1.0).max() > 1e-9:
        raise ValueError("transition rows must be unit")
    row_var = np.zeros(p.space.dim, dtype=np.int64)
    start = -1
    if tree is not None:
        row_var[:] = tree.leaf_var[p.space.firsts]
        start = p.space.index(R2, R1)
    return CoinedWalk(p.space, p.amp.copy(), p, tree=tree, row_var=row_var,
                      start_index=start)


def walk_from_hamiltonian(h0: WeightedAdjacency, tree: GateTree,
                          n_h_mode: str = "exact") -> CoinedWalk:
    """Preprocessing pipeline: principal eigenvector of the all-zero
    matrix, factorization, walk.  n_h_mode 'exact' uses the computed top
    eigenvalue (zero deficit); 'bound' uses the row-sum upper bound."""
    lam, delta = principal_eigenvector(h0)
    n_h = lam if n_h_mode == "exact" else norm_upper_bound(h0)
    p = classical_transition(h0, delta, n_h, lambda_max=lam)
    return build_walk(p, tree=tree)


def apply_oracle(walk: CoinedWalk, x, state: np.ndarray) -> np.ndarray:
    """Phase (-1)^{x_i} on every pair whose first register is leaf i."""
    return state * walk.oracle_signs(x)


# ---------------------------------------------------------------------------
# Correspondence verification
# ---------------------------------------------------------------------------


@dataclass
class EigenMatch:
    lam: float
    walk_eigenvalues: tuple[complex, ...]
    residuals: tuple[float, ...]
    degenerate: bool  # |lam| = 1: single eigenvector, eigenvalue lam itself
    passed: bool


@dataclass
class CorrespondenceReport:
    matches: list[EigenMatch]
    max_residual: float
    max_subspace_overlap: float
    row_norm_deviation: float
    reconstruction_deviation: float
    diagonal_shift: float
    arcsin_deviation: float
    passed: bool
    failures: list[str]

    def lines(self) -> list[str]:
        out = [
            f"eigenvalues checked: {len(self.matches)}",
            f"max eigenvector residual: {self.max_residual:.3e}",
            f"max cross-subspace overlap: {self.max_subspace_overlap:.3e}",
            f"row norm deviation: {self.row_norm_deviation:.3e}",
            f"reconstruction deviation (off-diagonal): {self.reconstruction_deviation:.3e}",
            f"diagonal shift: {self.diagonal_shift:.3e}",
            f"arcsin mapping deviation: {self.arcsin_deviation:.3e}",
            f"correspondence: {'pass' if self.passed else 'FAIL'}",
        ]
        out.extend(f"failure: {f}" for f in self.failures)
        return out


def verify_correspondence(walk: CoinedWalk, m: np.ndarray, x=None,
                          h: np.ndarray | None = None,
                          residual_tol: float = 1e-9,
                          overlap_tol: float = 1e-10) -> CorrespondenceReport:
    """Check the eigen correspondence between M and the walk unitary.

    For each eigenvalue lambda of M with |lambda| < 1, the vectors
    (1 + beta S) T|lambda> with beta = -lambda +- i sqrt(1 - lambda^2)
    must be eigenvectors of U; at |lambda| = 1 the pair degenerates to the
    single eigenvector T|lambda> with eigenvalue lambda.  Also checks
    subspace orthogonality, the -iU eigenvalue mapping
    e^{i arcsin(lambda)} / -e^{-i arcsin(lambda)}, row norms, and the
    reconstruction n_h * (P o P^T) = H off-diagonal.
    """
    u = walk.unitary_dense(x)
    t = walk.coin_operator_t(x)
    evals, evecs = np.linalg.eigh((m + m.T) / 2)
    swap = walk.space.swap

    matches: list[EigenMatch] = []
    failures: list[str] = []
    max_res = 0.0
    arcsin_dev = 0.0
    columns = []
    for lam, vec in zip(evals, evecs.T):
        tv = t @ vec
        stv = np.zeros_like(tv)
        stv[swap] = tv
        if abs(abs(lam) - 1.0) < 1e-12:
            res = float(np.linalg.norm(u @ tv - lam * tv))
            matches.append(EigenMatch(float(lam), (complex(lam),), (res,), True,
                                      res <= residual_tol))
            max_res = max(max_res, res)
            columns.append(("deg", lam, [tv]))
            if res > residual_tol:
                failures.append(f"degenerate eigenvalue {lam:.6f}: residual {res:.2e}")
            continue
        betas = []
        resids = []
        vecs_here = []
        for sgn in (+1.0, -1.0):
            beta = complex(-lam, sgn * np.sqrt(max(0.0, 1.0 - lam * lam)))
            y = tv + beta * stv
            res = float(np.linalg.norm(u @ y - beta * y))
            betas.append(beta)
            resids.append(res)
            vecs_here.append(y)
            max_res = max(max_res, res)
            # -iU mapping: e^{i arcsin lam} for +, -e^{-i arcsin lam} for -
            target = (np.exp(1j * np.arcsin(lam)) if sgn > 0
                      else -np.exp(-1j * np.arcsin(lam)))
            arcsin_dev = max(arcsin_dev, abs(-1j * beta - target))
        ok = max(resids) <= residual_tol
        if not ok:
            failures.append(f"eigenvalue {lam:.6f}: residual {max(resids):.2e}")
        matches.append(EigenMatch(float(lam), tuple(betas), tuple(resids), False, ok))
        columns.append(("pair", lam, [tv, stv]))

    # subspace orthogonality across distinct eigenvalues
    max_overlap = 0.0
    for i in range(len(columns)):
        for j in range(i + 1, len(columns)):
            if abs(columns[i][1] - columns[j][1]) < 1e-10:
                continue
            for a in columns[i][2]:
                for b in columns[j][2]:
                    na = np.linalg.norm(a)
                    nb = np.linalg.norm(b)
                    if na < 1e-14 or nb < 1e-14:
                        continue
                    max_overlap = max(max_overlap, abs(np.vdot(a, b)) / (na * nb))
    if max_overlap > overlap_tol:
        failures.append(f"subspaces not orthogonal: {max_overlap:.2e}")

    row_dev = float(np.abs(walk.transition.row_norms() - 1.0).max())
    if h is not None:
        recon_dev, diag_shift = reconstruction_deviation(walk, m, h)
    else:
        recon_dev, diag_shift = float("nan"), float(np.abs(np.diag(m)).max())
    passed = not failures
    return CorrespondenceReport(
        matches=matches,
        max_residual=max_res,
        max_subspace_overlap=max_overlap,
        row_norm_deviation=row_dev,
        reconstruction_deviation=recon_dev,
        diagonal_shift=diag_shift,
        arcsin_deviation=float(arcsin_dev),
        passed=passed,
        failures=failures,
    )


def reconstruction_deviation(walk: CoinedWalk, m: np.ndarray,
                             h: np.ndarray) -> tuple[float, float]:
    """(max off-diagonal |n_h * M - H|, max |diagonal of M|).

    h is the dense matrix being quantized (H(x) when the walk carries
    oracle phases).  M's diagonal carries only self-loop weight (the
    row-completion deficit and oracle-flipped leaf coins) and is reported
    separately from the off-diagonal reconstruction error.
    """
    recon = np.abs(m * walk.transition.n_h - h)
    diag = float(np.abs(np.diag(m)).max())
    np.fill_diagonal(recon, 0.0)
    return float(recon.max()), diag
