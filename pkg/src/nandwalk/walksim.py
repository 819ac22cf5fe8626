"""Exact state-vector simulation of phase estimation over the coined walk.

A run prepares the counter in (1/sqrt(T)) sum_t (-i)^t |t>, which turns
controlled powers of the walk into phase estimation of -i U, applies
U^t = (oracle * U0)^t to the start edge (lower tail, mid tail), inverse
Fourier transforms the counter, and reads the exact outcome distribution.
Outcomes 0 and T/2 signal a +-i eigenphase, i.e. a zero-energy component;
the formula value is 0 exactly when that acceptance mass is large.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from nandwalk import kernels
from nandwalk.formula import FormulaAst, FormulaStats, as_bits, compute_stats
from nandwalk.hamiltonian import build_tree_with_tail, edge_weights
from nandwalk.szegedy import CoinedWalk, walk_from_hamiltonian

GENERAL_T_CONSTANT = 100.0  # counter oversampling for non-balanced trees
ACCEPT_THRESHOLD = 0.225  # midpoint of the separated acceptance bounds
DEFAULT_ERROR_BUDGET = 0.2
DEFAULT_REPS = 21
MAX_STEP_RECORD = 1 << 26  # cap on T * dim for the full-distribution record


@dataclass(frozen=True)
class PhaseEstimationConfig:
    counter_size: int  # T
    precision: float  # delta_p, diagnostic
    error_budget: float  # delta_e
    reps: int = DEFAULT_REPS
    seed: int = 0
    mode: str = "exact"  # "exact" | "sampled"

    def __post_init__(self):
        if self.counter_size < 2 or self.counter_size % 2:
            raise ValueError("counter size must be even and >= 2")
        if not 0 < self.error_budget < 0.25:
            raise ValueError("error budget must be in (0, 1/4)")
        if self.precision <= 0:
            raise ValueError("precision must be positive")


@dataclass
class RunResult:
    distribution: np.ndarray  # exact probabilities over counter values
    acceptance_probability: float  # mass on {0, T/2}
    decision: int  # 0 iff acceptance mass >= threshold
    queries_max: int  # controlled-oracle count on the deepest branch (T-1)
    queries_avg: float  # uniform branch-weighted average
    wall_time: float
    config: PhaseEstimationConfig
    sampled_outcomes: np.ndarray | None = field(default=None)

    def report_dict(self, with_timing: bool = False) -> dict:
        out = {
            "counter_size": self.config.counter_size,
            "precision": self.config.precision,
            "error_budget": self.config.error_budget,
            "mode": self.config.mode,
            "seed": self.config.seed,
            "reps": self.config.reps,
            "acceptance_probability": self.acceptance_probability,
            "decision": self.decision,
            "queries_max": self.queries_max,
            "queries_avg": self.queries_avg,
        }
        if self.sampled_outcomes is not None:
            out["sampled_outcomes"] = self.sampled_outcomes.tolist()
        if with_timing:
            out["wall_time_s"] = self.wall_time
        return out


def default_config(stats: FormulaStats, n_h: float, *, seed: int = 0,
                   reps: int = DEFAULT_REPS, mode: str = "exact") -> PhaseEstimationConfig:
    """Counter size: 320 floor(sqrt(N)) for balanced binary trees, else the
    next even integer at or above C * n_h * sigma_minus * sqrt(sigma_plus)."""
    delta_p = 1.0 / (10.0 * stats.sigma_minus * np.sqrt(stats.sigma_plus))
    if stats.balanced_binary:
        t = 320 * int(np.floor(np.sqrt(stats.n_leaves)))
    else:
        t = int(np.ceil(GENERAL_T_CONSTANT * n_h * stats.sigma_minus
                        * np.sqrt(stats.sigma_plus)))
        t += t % 2
    return PhaseEstimationConfig(
        counter_size=t,
        precision=float(delta_p),
        error_budget=DEFAULT_ERROR_BUDGET,
        reps=reps,
        seed=seed,
        mode=mode,
    )


def run_phase_estimation(walk: CoinedWalk, x, cfg: PhaseEstimationConfig) -> RunResult:
    """One exact phase-estimation run; the full outcome distribution is
    computed by Fourier transforming the recorded per-step states."""
    t0 = time.perf_counter()
    t_count = cfg.counter_size
    signs = walk.oracle_signs(x)
    dim = walk.dim
    if t_count * dim > MAX_STEP_RECORD:
        raise MemoryError(
            f"step record {t_count}x{dim} exceeds cap; use acceptance_sweep")
    psi = walk.start_state()
    buf = np.empty_like(psi)
    record = np.empty((t_count, dim), dtype=np.complex128)
    phase = 1.0 + 0.0j
    for t in range(t_count):
        np.multiply(psi, phase, out=record[t])
        kernels.coined_step(psi, buf, walk.space.swap, walk.space.ptr,
                            walk.amp, signs)
        psi, buf = buf, psi
        phase *= -1j
    norm_drift = abs(np.linalg.norm(psi) - 1.0)
    if norm_drift > 1e-10:
        raise FloatingPointError(f"walk lost unitarity: norm drift {norm_drift:.2e}")
    amps = np.fft.fft(record, axis=0) / t_count
    dist = np.einsum("ij,ij->i", amps, amps.conj()).real
    total = dist.sum()
    if abs(total - 1.0) > 1e-10:
        raise FloatingPointError(f"distribution sums to {total}")
    accept = float(dist[0] + dist[t_count // 2])
    sampled = None
    if cfg.mode == "sampled":
        rng = np.random.default_rng(cfg.seed)
        sampled = rng.choice(t_count, size=cfg.reps, p=np.maximum(dist, 0.0) / total)
        zero_frac = float(np.isin(sampled, (0, t_count // 2)).mean())
        decision = 0 if zero_frac >= ACCEPT_THRESHOLD else 1
    else:
        decision = 0 if accept >= ACCEPT_THRESHOLD else 1
    return RunResult(
        distribution=dist,
        acceptance_probability=accept,
        decision=decision,
        queries_max=t_count - 1,
        queries_avg=(t_count - 1) / 2.0,
        wall_time=time.perf_counter() - t0,
        config=cfg,
        sampled_outcomes=sampled,
    )


def count_queries(result: RunResult) -> int:
    """Oracle invocations on the deepest counter branch (the benchmarked
    quantity); the uniform branch average is available on the result."""
    return result.queries_max


@dataclass
class Pipeline:
    """Preprocessing products for one formula: tree, matrix, walk, config."""

    ast: FormulaAst
    stats: FormulaStats
    tree: object
    h0: object
    walk: CoinedWalk
    config: PhaseEstimationConfig


def prepare(ast: FormulaAst, *, beta: float = 0.25, seed: int = 0,
            reps: int = DEFAULT_REPS, mode: str = "exact",
            n_h_mode: str = "exact") -> Pipeline:
    stats = compute_stats(ast)
    tree = build_tree_with_tail(ast)
    h0 = edge_weights(tree, beta=beta)
    walk = walk_from_hamiltonian(h0, tree, n_h_mode=n_h_mode)
    cfg = default_config(stats, walk.transition.n_h, seed=seed, reps=reps, mode=mode)
    return Pipeline(ast=ast, stats=stats, tree=tree, h0=h0, walk=walk, config=cfg)


def evaluate(ast: FormulaAst, x, cfg: PhaseEstimationConfig | None = None,
             pipeline: Pipeline | None = None) -> int:
    """Formula value estimate from phase estimation.

    Exact mode thresholds the acceptance probability of a single run;
    sampled mode draws cfg.reps outcomes and compares the fraction landing
    on {0, T/2} against the same threshold.
    """
    if pipeline is None:
        pipeline = prepare(ast)
    if cfg is None:
        cfg = pipeline.config
    bits = as_bits(x, pipeline.stats.n_vars)
    result = run_phase_estimation(pipeline.walk, bits, cfg)
    return result.decision


def acceptance_sweep(walk: CoinedWalk, xs: np.ndarray, t_count: int,
                     chunk: int = 4096) -> np.ndarray:
    """Acceptance probability (mass on outcomes 0 and T/2) for a batch of
    assignments, holding only O(dim) state per column.

    Equivalent to running run_phase_estimation per input and summing the
    two accepting outcomes; used by full truth-table sweeps.
    """
    xs = np.asarray(xs, dtype=np.uint8)
    n_inputs = xs.shape[0]
    out = np.empty(n_inputs)
    dim = walk.dim
    psi0 = walk.start_state()
    for lo in range(0, n_inputs, chunk):
        hi = min(lo + chunk, n_inputs)
        k = hi - lo
        signs = walk.oracle_signs_batch(xs[lo:hi])
        signs = np.ascontiguousarray(signs)
        psi = np.tile(psi0[:, None], (1, k))
        buf = np.empty_like(psi)
        scratch = np.empty(k, dtype=np.complex128)
        acc_even = np.zeros((dim, k), dtype=np.complex128)
        acc_odd = np.zeros((dim, k), dtype=np.complex128)
        phase = 1.0 + 0.0j
        for t in range(t_count):
            if t % 2 == 0:
                acc_even += phase * psi
            else:
                acc_odd += phase * psi
            kernels.coined_step_batch(psi, buf, walk.space.swap,
                                      walk.space.ptr, walk.amp, signs, scratch)
            psi, buf = buf, psi
            phase *= -1j
        # outcome 0 amplitude: even + odd; outcome T/2: even - odd
        p_zero = np.abs(acc_even + acc_odd) ** 2
        p_half = np.abs(acc_even - acc_odd) ** 2
        out[lo:hi] = (p_zero.sum(axis=0) + p_half.sum(axis=0)) / t_count**2
    return out


def decision_sweep(pipeline: Pipeline, xs: np.ndarray) -> np.ndarray:
    """Exact-mode decisions for a batch of assignments."""
    acc = acceptance_sweep(pipeline.walk, xs, pipeline.config.counter_size)
    return (acc < ACCEPT_THRESHOLD).astype(np.uint8)


def all_assignments(n_vars: int) -> np.ndarray:
    """All 2^V assignments, x1 as the most significant bit, shape (2^V, V)."""
    if n_vars > 20:
        raise ValueError("truth table too large")
    grid = np.indices((2,) * n_vars, dtype=np.uint8)
    return grid.reshape(n_vars, -1).T


def sampled_majority(ast: FormulaAst, x, cfg: PhaseEstimationConfig,
                     pipeline: Pipeline | None = None) -> tuple[int, float]:
    """Sampled-mode decision and the observed zero-outcome fraction."""
    if pipeline is None:
        pipeline = prepare(ast)
    run = run_phase_estimation(pipeline.walk, x, replace(cfg, mode="sampled"))
    zero_frac = float(np.isin(run.sampled_outcomes,
                              (0, cfg.counter_size // 2)).mean())
    return run.decision, zero_frac
