"""Command-line interface: ``pdsearch {simulate,table1,sweep,validate}``.

Exit codes: 0 success, 1 numerical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import analytic, experiments
from .errors import PDSearchError
from .operators import MarkedSet, run_grover, run_search
from .statevector import MAX_INDEX_QUBITS, probability_of_index_set

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2
SIMULATE_TOL = 1e-9


class UsageError(Exception):
    pass


def _parse_marked(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"--marked expects comma-separated integers, got {text!r}") from None


def _resolve_marked(args) -> MarkedSet:
    if args.marked is not None and args.num_marked is not None:
        raise UsageError("give either --marked or --num-marked, not both")
    if args.marked is not None:
        return MarkedSet(args.n, _parse_marked(args.marked))
    if args.num_marked is not None:
        return MarkedSet.random(args.n, args.num_marked, args.seed)
    raise UsageError("one of --marked or --num-marked is required")


def _resolve_iterations(text: str, algorithm: str, params: analytic.SearchParams) -> int:
    if text == "auto":
        if algorithm == "grover":
            return analytic.grover_iterations(params.N, params.M)
        return analytic.required_iterations(params)
    try:
        q = int(text)
    except ValueError:
        raise UsageError(f"-q expects a non-negative integer or 'auto', got {text!r}") from None
    if q < 0:
        raise UsageError(f"-q must be non-negative, got {q}")
    return q


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def cmd_simulate(args) -> int:
    if not 1 <= args.n <= MAX_INDEX_QUBITS:
        raise UsageError(f"-n must be in [1, {MAX_INDEX_QUBITS}], got {args.n}")
    marked = _resolve_marked(args)
    params = analytic.SearchParams(args.n, marked.M)
    algorithm = experiments.resolve_algorithm(args.algorithm)
    if algorithm == "classical":
        raise UsageError("simulate supports pd and grover only")
    q = _resolve_iterations(args.iterations, algorithm, params)

    if algorithm == "grover":
        state = run_grover(args.n, marked, q)
        predicted = analytic.grover_success_probability(params.N, params.M, q)
    else:
        state = run_search(args.n, marked, q)
        predicted = analytic.success_probability(params, q)
    p_sim = probability_of_index_set(state, marked)
    diff = abs(p_sim - predicted)
    ok = diff < SIMULATE_TOL

    record = {
        "algorithm": algorithm,
        "n": args.n,
        "N": params.N,
        "M": params.M,
        "marked": list(marked.members),
        "iterations": q,
        "p_success_simulated": p_sim,
        "p_failure_simulated": 1.0 - p_sim,
        "p_success_closed_form": predicted,
        "abs_diff": diff,
        "pass": ok,
    }
    if args.format == "json":
        text = json.dumps(record, indent=2) + "\n"
    else:
        keys = list(record)
        row = [";".join(map(str, v)) if isinstance(v, list) else
               experiments.fmt(v) if isinstance(v, float) else str(v).lower() if isinstance(v, bool)
               else str(v) for v in record.values()]
        text = ",".join(keys) + "\n" + ",".join(row) + "\n"
    _emit(text, args.output)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_table1(args) -> int:
    if not 1 <= args.n_min <= args.n_max <= experiments.MAX_TABLE_N:
        raise UsageError(
            f"need 1 <= --n-min <= --n-max <= {experiments.MAX_TABLE_N}, got {args.n_min}, {args.n_max}"
        )
    rows = experiments.table_first_iteration(args.n_min, args.n_max)
    if args.format == "json":
        text = json.dumps([dataclasses.asdict(r) for r in rows], indent=2) + "\n"
    else:
        text = experiments.table_to_csv(rows)
    _emit(text, args.output)
    return EXIT_OK


def _sweep_policy(args) -> experiments.IterationPolicy:
    chosen = [args.fixed_q is not None, args.paper_q, args.grover_q]
    if sum(chosen) > 1:
        raise UsageError("choose at most one of --fixed-q, --paper-q, --grover-q")
    if args.paper_q:
        return experiments.PAPER_FORMULA
    if args.grover_q:
        return experiments.GROVER_FORMULA
    q = 1 if args.fixed_q is None else args.fixed_q
    if q < 0:
        raise UsageError("--fixed-q must be non-negative")
    return experiments.IterationPolicy.fixed(q)


def cmd_sweep(args) -> int:
    if args.points < 1:
        raise UsageError(f"--points must be positive, got {args.points}")
    algos = [a for a in args.algos.split(",") if a.strip()]
    policy = _sweep_policy(args)
    if args.log_range is not None:
        lo, hi = args.log_range
        grid = experiments.SweepGrid.logarithmic(args.points, lo, hi, policy, algos)
    else:
        grid = experiments.SweepGrid.linear(args.points, policy, algos)
    if args.format == "json":
        points = experiments.sweep_curves(grid)
        text = json.dumps([{"algorithm": p.algorithm, "ratio": p.ratio,
                            "iterations": p.iterations_used, "p_success": p.p_success}
                           for p in points]) + "\n"
    else:
        text = experiments.curves_to_csv(grid)
    _emit(text, args.output)
    for algo, (ratio, p) in experiments.curve_minima(grid).items():
        print(f"# min {algo}: p_success={experiments.fmt(p)} at ratio={experiments.fmt(ratio)}",
              file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    if not 1 <= args.n_max <= 12:
        raise UsageError(f"--n-max must be in [1, 12], got {args.n_max}")
    if args.q_max < 0 or args.samples < 1:
        raise UsageError("--q-max must be >= 0 and --samples >= 1")
    report = experiments.cross_validate(args.n_max, args.q_max, args.samples,
                                        seed=args.seed, threads=args.threads)
    _emit(report.to_json() + "\n" if args.format == "json" else report.to_csv(), args.output)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


class _ArgparseError(UsageError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _ArgparseError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pdsearch", description="Partial-diffusion quantum search toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, default_format="csv"):
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)
        p.add_argument("--threads", type=int, default=1, help="worker threads cap")

    p = sub.add_parser("simulate", help="run the state-vector simulator and compare to the closed form")
    p.add_argument("-n", type=int, required=True, help="number of index qubits")
    p.add_argument("--marked", help="comma-separated marked indices, e.g. 0,5,9")
    p.add_argument("--num-marked", type=int, help="number of random marked indices (uses --seed)")
    p.add_argument("-q", "--iterations", default="auto", help="iteration count or 'auto'")
    p.add_argument("--algorithm", default="pd", help="pd (default) or grover")
    p.add_argument("--seed", type=int, default=0)
    common(p, "json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table1", help="first-iteration max/min/average success table")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=6)
    common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", help="success probability curves over M/N")
    p.add_argument("--algos", default="pd,grover,classical")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--fixed-q", type=int, default=None)
    p.add_argument("--paper-q", action="store_true", help="each algorithm uses its own iteration formula")
    p.add_argument("--grover-q", action="store_true", help="both algorithms use Grover's iteration formula")
    p.add_argument("--log-range", nargs=2, type=float, metavar=("MIN", "MAX"),
                   help="logarithmic ratio grid instead of k/points")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="cross-validate simulator, recurrence and closed form")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--q-max", type=int, default=30)
    p.add_argument("--samples", type=int, default=400, help="simulator (n, M) instance budget")
    p.add_argument("--seed", type=int, default=0)
    common(p, "json")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, PDSearchError) as exc:
        if not isinstance(exc, _ArgparseError):
            parser.print_usage(sys.stderr)
        print(f"pdsearch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
