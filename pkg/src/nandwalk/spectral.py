"""Spectral verification of the gate-tree matrices.

Three independently checkable facts drive the evaluator's correctness,
and each gets a numeric verifier here: when the formula reads 0 there is
a constructible zero-energy eigenvector with large weight on the walk's
start vertex; kernel vectors vanish on gates evaluating to 1 (and on the
tail when the formula reads 1); and when the formula reads 1 every
eigenvector touching the tail has energy bounded away from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nandwalk.formula import as_bits
from nandwalk.hamiltonian import (
    DEFAULT_DENSE_THRESHOLD,
    R1,
    R2,
    ROOT,
    GateTree,
    SizeOverThreshold,
    WeightedAdjacency,
)

KERNEL_TOL = 1e-9  # |E| below this counts as zero energy
SUPPORT_TOL = 1e-8  # amplitude above this counts as support
RESIDUAL_TOL = 1e-10
OVERLAP_SLACK = 1e-9


def eigendecompose(h: WeightedAdjacency, threshold: int = DEFAULT_DENSE_THRESHOLD,
                   validate: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Dense symmetric eigendecomposition; the ground truth for every
    other check at desk scale."""
    if h.n_vertices > threshold:
        raise SizeOverThreshold(
            f"{h.n_vertices} vertices exceeds dense threshold {threshold}")
    dense = h.to_dense(threshold)
    evals, evecs = np.linalg.eigh(dense)
    if validate:
        scale = max(1.0, float(np.abs(evals).max(initial=0.0)))
        resid = np.abs(dense @ evecs - evecs * evals).max()
        ortho = np.abs(evecs.T @ evecs - np.eye(h.n_vertices)).max()
        if resid > 1e-10 * scale or ortho > 1e-10:
            raise FloatingPointError(
                f"eigendecomposition failed validation: {resid:.2e}, {ortho:.2e}")
    return evals, evecs


def construct_zero_eigenvector(tree: GateTree, h: WeightedAdjacency, x) -> np.ndarray:
    """Explicit zero-energy eigenvector for a formula reading 0.

    Recursive construction down the tree: a 0-vertex gets weight, its
    children stay at zero, and below each child exactly one 0-grandchild
    subtree is rescaled so the child's row balances; the tail is extended
    with zero weight on the mid vertex.  Raises if the formula reads 1.
    """
    bits = as_bits(x, tree.n_vars)
    vals = tree.values(bits)
    if vals[ROOT] != 0:
        raise ValueError("no zero-energy construction: formula reads 1")
    hd = h.to_dense()
    a = np.zeros(tree.n_vertices)

    def build(p: int, scale: float):
        # invariant: vals[p] == 0
        a[p] = scale
        if tree.leaf_var[p]:
            return
        for v in tree.children[p]:
            if tree.leaf_var[v]:
                continue  # a 1-reading leaf is disconnected; row holds trivially
            grand = [c for c in tree.children[v] if vals[c] == 0]
            c = grand[0]
            build(c, -scale * hd[p, v] / hd[v, c])

    build(ROOT, 1.0)
    a[R1] = 0.0
    a[R2] = -hd[R1, ROOT] * a[ROOT] / hd[R2, R1]
    return a


@dataclass
class ZeroEnergyCheck:
    residual: float  # ||H a|| / ||a||
    overlap: float  # |a_start| / ||a||
    root_magnitude: float  # a_root / ||a restricted to the gate tree||
    root_magnitude_bound: float  # 1 / (sqrt(sigma_minus) s^beta)
    passed: bool


def check_zero_energy(tree: GateTree, h: WeightedAdjacency, x) -> ZeroEnergyCheck:
    """Construct the eigenvector and verify residual, start-vertex overlap
    and the root-magnitude lower bound."""
    a = construct_zero_eigenvector(tree, h, x)
    norm = np.linalg.norm(a)
    residual = float(np.linalg.norm(h.to_dense() @ a) / norm)
    overlap = float(abs(a[R2]) / norm)
    tree_part = a[ROOT:]
    root_mag = float(a[ROOT] / np.linalg.norm(tree_part))
    sm, _ = tree.path_sums(h.beta)
    bound = 1.0 / (np.sqrt(sm[ROOT]) * float(tree.s[ROOT]) ** h.beta)
    passed = (residual <= RESIDUAL_TOL
              and overlap >= 1.0 / np.sqrt(2.0) - OVERLAP_SLACK
              and root_mag >= bound - 1e-12
              and abs(a[R1]) == 0.0)
    return ZeroEnergyCheck(residual, overlap, root_mag, bound, passed)


@dataclass
class SupportCheck:
    kernel_dim: int
    max_one_vertex_amplitude: float  # over gates evaluating to 1
    max_tail_amplitude: float  # only meaningful when the formula reads 1
    passed: bool


def check_zero_support(tree: GateTree, h: WeightedAdjacency, x,
                       eigensystem=None) -> SupportCheck:
    """Kernel vectors vanish on internal vertices evaluating to 1; when
    the formula reads 1 they vanish on both tail vertices too."""
    bits = as_bits(x, tree.n_vars)
    vals = tree.values(bits)
    evals, evecs = eigensystem if eigensystem is not None else eigendecompose(h)
    kernel = evecs[:, np.abs(evals) <= KERNEL_TOL]
    ones = [v for v in range(ROOT, tree.n_vertices)
            if vals[v] == 1 and not tree.leaf_var[v]]
    max_one = float(np.abs(kernel[ones]).max()) if ones and kernel.size else 0.0
    max_tail = 0.0
    if vals[ROOT] == 1 and kernel.size:
        max_tail = float(np.abs(kernel[[R1, R2]]).max())
    passed = max_one <= SUPPORT_TOL and max_tail <= SUPPORT_TOL
    return SupportCheck(kernel.shape[1], max_one, max_tail, passed)


@dataclass
class GapCheck:
    bound: float  # 1 / (9 sigma_minus sqrt(sigma_plus))
    min_supported_energy: float  # min |E| over tail-supported eigenvectors
    passed: bool


def check_spectral_gap(tree: GateTree, h: WeightedAdjacency, x,
                       sigma_minus: float | None = None,
                       sigma_plus: float | None = None,
                       eigensystem=None) -> GapCheck:
    """Every eigenvector with tail support has |E| at or above the path-sum
    gap bound.  Requires the formula to read 1."""
    bits = as_bits(x, tree.n_vars)
    vals = tree.values(bits)
    if vals[ROOT] != 1:
        raise ValueError("gap check applies to formulas reading 1")
    if sigma_minus is None or sigma_plus is None:
        sm, sp = tree.path_sums(h.beta)
        sigma_minus = sigma_minus if sigma_minus is not None else float(sm[ROOT])
        sigma_plus = sigma_plus if sigma_plus is not None else float(sp[ROOT])
    bound = 1.0 / (9.0 * sigma_minus * np.sqrt(sigma_plus))
    evals, evecs = eigensystem if eigensystem is not None else eigendecompose(h)
    supported = (np.abs(evecs[R1]) + np.abs(evecs[R2])) > SUPPORT_TOL
    if supported.any():
        min_e = float(np.abs(evals[supported]).min())
    else:
        min_e = float("inf")
    return GapCheck(bound, min_e, min_e >= bound - 1e-10)


@dataclass
class YBoundReport:
    energy: float
    gamma_ok: bool
    ratio_failures: list[str]
    checked_vertices: int
    passed: bool


def ybound_diagnostic(tree: GateTree, h: WeightedAdjacency, x,
                      energy: float, eigvec: np.ndarray,
                      amp_tol: float = 1e-10) -> YBoundReport:
    """Child-to-parent amplitude ratio bounds along the tree.

    Bottom-up recursion (all path sums in their input-independent form):

        y0_v = (1 + sum_c h_vc y1_c) / h_pv
        y1_v = h_pv sqrt(s_v) / gamma_v
        gamma_v = G - G^2 sigma_minus(v) - E^2 (1 + G') sigma_plus(v),
        G = 1/(2 sigma_minus(root)), G' = 8 sigma_minus(root)

    with 1/G' <= gamma_v <= G, and for vertices with a 0-evaluation
    0 < a_p/a_v <= y0_v E, with a 1-evaluation 0 >= a_v/a_p >= -y1_v E.
    Diagnostic only: the input-independent path sums shift the constants
    relative to the statement being probed, so failures are reported,
    never raised.
    """
    bits = as_bits(x, tree.n_vars)
    vals = tree.values(bits)
    sm, sp = tree.path_sums(h.beta)
    sig_r = sm[ROOT]
    gap_bound = 1.0 / (9.0 * sig_r * np.sqrt(sp[ROOT]))
    if not 0.0 < energy <= gap_bound + 1e-12:
        raise ValueError(f"energy {energy} outside (0, {gap_bound:.3e}]")
    hd = h.to_dense()
    big_g = 1.0 / (2.0 * sig_r)
    big_gp = 8.0 * sig_r
    n = tree.n_vertices
    gamma = big_g - big_g**2 * sm - energy**2 * (1.0 + big_gp) * sp
    gamma_ok = bool((gamma[1:] >= 1.0 / big_gp - 1e-12).all()
                    and (gamma[1:] <= big_g + 1e-12).all())
    y1 = np.zeros(n)
    y0 = np.zeros(n)
    for v in range(n - 1, R2, -1):
        p = tree.parent[v]
        h_pv = hd[p, v]
        kids = tree.children[v]
        y1[v] = h_pv * np.sqrt(float(tree.s[v])) / gamma[v]
        y0[v] = (1.0 + sum(hd[v, c] * y1[c] for c in kids)) / h_pv if h_pv > 0 else np.inf

    failures: list[str] = []
    checked = 0
    for v in range(n - 1, R2, -1):
        p = tree.parent[v]
        av, ap = eigvec[v], eigvec[p]
        if abs(av) <= amp_tol and abs(ap) <= amp_tol:
            continue
        checked += 1
        if vals[v] == 0:
            if abs(av) <= amp_tol:
                failures.append(f"vertex {v}: zero amplitude but parent nonzero")
                continue
            ratio = ap / av
            if not 0.0 < ratio <= y0[v] * energy * (1 + 1e-9):
                failures.append(
                    f"vertex {v}: a_p/a_v = {ratio:.3e} outside (0, {y0[v] * energy:.3e}]")
        else:
            if abs(av) <= amp_tol:
                continue  # ratio 0, holds trivially
            ratio = av / ap
            if not -y1[v] * energy * (1 + 1e-9) <= ratio < 0.0:
                failures.append(
                    f"vertex {v}: a_v/a_p = {ratio:.3e} outside [-{y1[v] * energy:.3e}, 0)")
    return YBoundReport(energy, gamma_ok, failures, checked,
                        gamma_ok and not failures)


@dataclass
class SpectralReport:
    """Per-input verification summary over one matrix H(x)."""

    x: np.ndarray
    phi: int
    eigenvalues: np.ndarray
    symmetry_deviation: float
    zero_energy: ZeroEnergyCheck | None
    support: SupportCheck
    gap: GapCheck | None
    passed: bool

    def report_dict(self) -> dict:
        out = {
            "input": "".join(str(b) for b in self.x),
            "phi": self.phi,
            "spectrum_symmetry_deviation": self.symmetry_deviation,
            "kernel_dim": self.support.kernel_dim,
            "one_vertex_amplitude": self.support.max_one_vertex_amplitude,
            "passed": self.passed,
        }
        if self.zero_energy is not None:
            out["zero_residual"] = self.zero_energy.residual
            out["tail_overlap"] = self.zero_energy.overlap
        if self.gap is not None:
            out["gap_bound"] = self.gap.bound
            out["min_supported_energy"] = self.gap.min_supported_energy
            out["tail_amplitude"] = self.support.max_tail_amplitude
        return out


def spectrum_symmetry_deviation(evals: np.ndarray) -> float:
    """Distance between the spectrum and its negation (bipartite graphs
    give exactly symmetric spectra)."""
    return float(np.abs(np.sort(evals) + np.sort(-evals)[::-1]).max())


def verify_input(tree: GateTree, h0: WeightedAdjacency, x,
                 apply_input_fn=None) -> SpectralReport:
    """Run every applicable spectral check for one assignment."""
    from nandwalk.hamiltonian import apply_input

    bits = as_bits(x, tree.n_vars)
    hx = (apply_input_fn or apply_input)(h0, tree, bits)
    evals, evecs = eigendecompose(hx)
    phi = int(tree.values(bits)[ROOT])
    sym = spectrum_symmetry_deviation(evals)
    support = check_zero_support(tree, hx, bits, eigensystem=(evals, evecs))
    zero = gap = None
    if phi == 0:
        zero = check_zero_energy(tree, hx, bits)
        passed = support.passed and zero.passed
    else:
        gap = check_spectral_gap(tree, hx, bits, eigensystem=(evals, evecs))
        passed = support.passed and gap.passed
    passed = passed and sym <= 1e-10
    return SpectralReport(bits, phi, evals, sym, zero, support, gap, passed)
