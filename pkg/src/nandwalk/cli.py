"""Command-line front end.

Subcommands: eval (run the walk evaluator on one input), verify (sweep
the spectral checks over inputs), bench (query-count scaling table) and
kernels (compiled-vs-python walk kernel benchmark).

Exit codes: 0 success, 1 verification failure, 2 formula parse error,
3 input-dimension error, 4 size over the dense threshold.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from nandwalk import baseline, kernels, report, spectral, walksim
from nandwalk.formula import (
    DimensionError,
    FormulaSyntaxError,
    compute_stats,
    format_formula,
    generate,
    parse_formula,
)
from nandwalk.hamiltonian import SizeOverThreshold, apply_input

EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_DIMENSION = 3
EXIT_SIZE = 4


def _load_formula(args):
    if getattr(args, "generate", None):
        return generate(args.generate)
    if getattr(args, "formula", None):
        with open(args.formula, encoding="utf-8") as fh:
            return parse_formula(fh.read().strip())
    raise SystemExit("one of --formula or --generate is required")


def _emit(doc: dict, json_path: str | None):
    sys.stdout.write(report.to_text(doc))
    if json_path:
        report.write_json(doc, json_path)


def cmd_eval(args) -> int:
    ast = _load_formula(args)
    pipeline = walksim.prepare(ast, beta=args.beta, seed=args.seed,
                               reps=args.reps, mode=args.mode)
    x = args.input
    t0 = time.perf_counter()
    result = walksim.run_phase_estimation(pipeline.walk, x, pipeline.config)
    elapsed = time.perf_counter() - t0
    classical = None
    if pipeline.stats.n_vars <= 20:
        classical, _ = baseline.alpha_beta_evaluate(ast, x, seed=args.seed)
    doc = {
        "formula": {
            "n_leaves": pipeline.stats.n_leaves,
            "n_vars": pipeline.stats.n_vars,
            "depth": pipeline.stats.depth,
            "sigma_minus": pipeline.stats.sigma_minus,
            "sigma_plus": pipeline.stats.sigma_plus,
            "approx_balanced": pipeline.stats.approx_balanced,
            "beta": args.beta,
        },
        "run": result.report_dict(with_timing=args.timings),
    }
    if classical is not None:
        doc["classical_value"] = classical
        doc["agrees_with_classical"] = bool(classical == result.decision)
    if args.timings:
        doc["run"]["wall_time_s"] = elapsed
    if args.export_h:
        hx = apply_input(pipeline.h0, pipeline.tree, x)
        with open(args.export_h, "w", encoding="utf-8") as fh:
            fh.write(hx.export_coordinates())
        doc["exported_matrix"] = args.export_h
    _emit(doc, args.json)
    return 0


def cmd_verify(args) -> int:
    ast = _load_formula(args)
    pipeline = walksim.prepare(ast, beta=args.beta, seed=args.seed)
    tree, h0 = pipeline.tree, pipeline.h0
    if tree.n_vertices > args.dense_threshold:
        raise SizeOverThreshold(
            f"{tree.n_vertices} vertices exceeds dense threshold {args.dense_threshold}")
    if args.corrupt_weight:
        # negative-control hook: inflate the lower tail edge weight
        h0.weights = h0.weights.copy()
        h0.weights[0] *= 3.0
    v = tree.n_vars
    if 2**v <= args.max_inputs:
        xs = walksim.all_assignments(v)
    else:
        rng = np.random.default_rng(args.seed)
        xs = rng.integers(0, 2, size=(args.max_inputs, v), dtype=np.uint8)
    rows = []
    n_failed = 0
    for bits in xs:
        rep = spectral.verify_input(tree, h0, bits)
        rows.append(rep.report_dict())
        if not rep.passed:
            n_failed += 1
    doc = {
        "formula": format_formula(ast) if len(format_formula(ast)) < 200 else "(large)",
        "n_inputs": len(rows),
        "n_failed": n_failed,
        "inputs": {r["input"]: {k: v for k, v in r.items() if k != "input"}
                   for r in rows},
    }
    _emit(doc, args.json)
    return EXIT_VERIFY_FAILED if n_failed else 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    for n in sizes:
        if args.family == "balanced":
            depth = int(round(np.log2(n)))
            if 2**depth != n:
                raise ValueError(f"balanced family needs powers of two, got {n}")
            ast = generate(f"balanced:{depth}")
        elif args.family == "chain":
            ast = generate(f"chain:{n}")
        else:
            raise ValueError(f"unknown family {args.family!r}")
        stats = compute_stats(ast)
        if stats.balanced_binary:
            t_count = 320 * int(np.floor(np.sqrt(stats.n_leaves)))
        else:
            pipeline = walksim.prepare(ast)
            t_count = pipeline.config.counter_size
        hard_x = baseline.worst_case_input(ast)
        mean_q = baseline.mean_alpha_beta_queries(ast, hard_x, args.trials,
                                                  seed=args.seed)
        rows.append((n, t_count - 1, mean_q))
    logn = np.log2([r[0] for r in rows])
    q_exp = float(np.polyfit(logn, np.log2([r[1] for r in rows]), 1)[0])
    c_exp = float(np.polyfit(logn, np.log2([r[2] for r in rows]), 1)[0])
    doc = {
        "family": args.family,
        "trials": args.trials,
        "seed": args.seed,
        "rows": {str(n): {"quantum_queries": q, "classical_queries": c}
                 for n, q, c in rows},
        "quantum_exponent": q_exp,
        "classical_exponent": c_exp,
    }
    sys.stdout.write(f"{'N':>8} {'quantum':>10} {'classical':>12}\n")
    for n, q, c in rows:
        sys.stdout.write(f"{n:>8} {q:>10} {c:>12.2f}\n")
    sys.stdout.write(f"fitted exponents: quantum {q_exp:.4f}, classical {c_exp:.4f}\n")
    if args.json:
        report.write_json(doc, args.json)
    return 0


def cmd_kernels(args) -> int:
    backends = kernels.available_backends()
    ast = generate(f"balanced:{args.depth}")
    pipeline = walksim.prepare(ast)
    walk = pipeline.walk
    x = np.zeros(pipeline.stats.n_vars, dtype=np.uint8)
    signs = walk.oracle_signs(x)
    psi = walk.start_state()
    buf = np.empty_like(psi)
    sys.stdout.write(f"walk dimension {walk.dim}, {args.steps} steps per backend\n")
    for name, mod in backends.items():
        state = psi.copy()
        t0 = time.perf_counter()
        for _ in range(args.steps):
            mod.coined_step(state, buf, walk.space.swap, walk.space.ptr,
                            walk.amp, signs)
            state, buf = buf, state
        dt = time.perf_counter() - t0
        sys.stdout.write(
            f"{name:>9}: {dt:.4f} s ({args.steps / dt:,.0f} steps/s)\n")
    sys.stdout.write(f"active backend: {kernels.BACKEND}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nandwalk",
        description="Evaluate NAND formulas by simulated coined-walk phase "
                    "estimation and verify the spectral facts behind it.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p):
        p.add_argument("--formula", help="formula file (grammar: NAND/AND/OR/NOT, x1..)")
        p.add_argument("--generate", help="family spec: balanced:D | chain:N | random:N:SEED")
        p.add_argument("--beta", type=float, default=0.25, help="weight exponent")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", help="write a JSON report to this path")

    p_eval = sub.add_parser("eval", help="run the walk evaluator on one input")
    add_source(p_eval)
    p_eval.add_argument("--input", required=True, help="bit string, x1 first")
    p_eval.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p_eval.add_argument("--reps", type=int, default=walksim.DEFAULT_REPS)
    p_eval.add_argument("--timings", action="store_true", help="include wall times")
    p_eval.add_argument("--export-h", help="write H(x) in coordinate format")
    p_eval.set_defaults(func=cmd_eval)

    p_verify = sub.add_parser("verify", help="sweep spectral checks over inputs")
    add_source(p_verify)
    p_verify.add_argument("--dense-threshold", type=int, default=4096)
    p_verify.add_argument("--max-inputs", type=int, default=4096,
                          help="sample size when 2^V exceeds this")
    p_verify.add_argument("--corrupt-weight", action="store_true",
                          help=argparse.SUPPRESS)  # negative-control test hook
    p_verify.set_defaults(func=cmd_verify)

    p_bench = sub.add_parser("bench", help="query-count scaling table")
    p_bench.add_argument("--family", default="balanced", choices=("balanced", "chain"))
    p_bench.add_argument("--sizes", default="4,16,64,256")
    p_bench.add_argument("--trials", type=int, default=200)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--json", help="write a JSON report to this path")
    p_bench.set_defaults(func=cmd_bench)

    p_k = sub.add_parser("kernels", help="benchmark walk-step backends")
    p_k.add_argument("--depth", type=int, default=6, help="balanced tree depth")
    p_k.add_argument("--steps", type=int, default=20000)
    p_k.set_defaults(func=cmd_kernels)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormulaSyntaxError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except DimensionError as exc:
        sys.stderr.write(f"dimension error: {exc}\n")
        return EXIT_DIMENSION
    except SizeOverThreshold as exc:
        sys.stderr.write(f"size error: {exc}\n")
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())
