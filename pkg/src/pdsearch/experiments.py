"""Table and curve reproduction, grid searches, and three-way cross-validation."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import analytic
from . import operators
from .errors import DomainError
from .operators import MarkedSet

ALGORITHMS = ("partial_diffusion", "grover", "classical")
ALGORITHM_ALIASES = {"pd": "partial_diffusion", "partial_diffusion": "partial_diffusion",
                     "grover": "grover", "classical": "classical"}
FLOAT_FORMAT = ".12g"
MAX_TABLE_N = 20


def fmt(x: float) -> str:
    return format(float(x), FLOAT_FORMAT)


def resolve_algorithm(name: str) -> str:
    try:
        return ALGORITHM_ALIASES[name.strip().lower()]
    except KeyError:
        raise DomainError(f"unknown algorithm {name!r}; choose from pd, grover, classical") from None


# -- Table 1 -------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    n: int
    max_prob: float
    min_prob: float
    avg_prob: float


def table_first_iteration(n_min: int = 2, n_max: int = 6) -> list[TableRow]:
    """Max, min and oracle-averaged success probability after one iteration, per ``n``."""
    if not (1 <= n_min <= n_max <= MAX_TABLE_N):
        raise DomainError(f"need 1 <= n_min <= n_max <= {MAX_TABLE_N}, got {n_min}, {n_max}")
    rows = []
    for n in range(n_min, n_max + 1):
        N = 2**n
        p = analytic.success_probability_ratio(np.arange(1, N + 1) / N, 1)
        avg = analytic.average_success_first_iteration(N).closed
        rows.append(TableRow(n, float(p.max()), float(p.min()), avg))
    return rows


def table_to_csv(rows: Iterable[TableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "max_prob", "min_prob", "avg_prob"])
    for r in rows:
        w.writerow([r.n, fmt(r.max_prob), fmt(r.min_prob), fmt(r.avg_prob)])
    return buf.getvalue()


# -- curves --------------------------------------------------------------------


@dataclass(frozen=True)
class IterationPolicy:
    """``fixed`` uses ``q`` for every algorithm; ``paper_formula`` gives each
    algorithm its own iteration formula; ``grover_formula`` uses Grover's
    count for both quantum algorithms."""

    kind: str
    q: int | None = None

    def __post_init__(self):
        if self.kind not in ("fixed", "paper_formula", "grover_formula"):
            raise DomainError(f"unknown iteration policy {self.kind!r}")
        if self.kind == "fixed" and (self.q is None or self.q < 0):
            raise DomainError("fixed policy needs a non-negative q")

    @classmethod
    def fixed(cls, q: int) -> "IterationPolicy":
        return cls("fixed", int(q))

    def iterations(self, algorithm: str, ratios: np.ndarray) -> np.ndarray:
        if algorithm == "classical":
            return np.zeros(ratios.shape, dtype=np.int64)
        if self.kind == "fixed":
            return np.full(ratios.shape, self.q, dtype=np.int64)
        if self.kind == "grover_formula" or algorithm == "grover":
            return np.atleast_1d(analytic.grover_iterations_ratio(ratios))
        return np.atleast_1d(analytic.required_iterations_ratio(ratios))


PAPER_FORMULA = IterationPolicy("paper_formula")
GROVER_FORMULA = IterationPolicy("grover_formula")


@dataclass(frozen=True)
class SweepGrid:
    ratio_points: tuple[float, ...]
    iteration_policy: IterationPolicy
    algorithms: tuple[str, ...] = ALGORITHMS

    def __post_init__(self):
        ratios = tuple(float(r) for r in self.ratio_points)
        if not ratios:
            raise DomainError("sweep grid needs at least one ratio")
        if any(not 0.0 < r <= 1.0 for r in ratios):
            raise DomainError("ratios must lie in (0, 1]")
        algos = tuple(resolve_algorithm(a) for a in self.algorithms)
        if not algos:
            raise DomainError("sweep grid needs at least one algorithm")
        object.__setattr__(self, "ratio_points", ratios)
        object.__setattr__(self, "algorithms", algos)

    @classmethod
    def linear(cls, points: int, policy: IterationPolicy, algorithms=ALGORITHMS) -> "SweepGrid":
        """Ratios ``k / points`` for ``k = 1..points``."""
        if points < 1:
            raise DomainError(f"points must be positive, got {points}")
        return cls(tuple((np.arange(1, points + 1) / points).tolist()), policy, tuple(algorithms))

    @classmethod
    def logarithmic(cls, points: int, r_min: float, r_max: float, policy: IterationPolicy,
                    algorithms=ALGORITHMS) -> "SweepGrid":
        if points < 2:
            raise DomainError(f"a logarithmic grid needs at least 2 points, got {points}")
        if not 0.0 < r_min < r_max <= 1.0:
            raise DomainError("need 0 < r_min < r_max <= 1")
        return cls(tuple(np.geomspace(r_min, r_max, points).tolist()), policy, tuple(algorithms))


@dataclass(frozen=True)
class CurvePoint:
    ratio: float
    algorithm: str
    iterations_used: int
    p_success: float


def success_for(algorithm: str, ratios, iterations) -> np.ndarray:
    """Analytic success probability of ``algorithm`` at real ratios; vectorized."""
    ratios = np.asarray(ratios, dtype=float)
    if algorithm == "partial_diffusion":
        return np.atleast_1d(analytic.success_probability_ratio(ratios, iterations))
    if algorithm == "grover":
        return np.atleast_1d(analytic.grover_success_probability_ratio(ratios, iterations))
    if algorithm == "classical":
        return np.atleast_1d(ratios).copy()
    raise DomainError(f"unknown algorithm {algorithm!r}")


def _sweep_arrays(grid: SweepGrid):
    ratios = np.asarray(grid.ratio_points)
    for algo in grid.algorithms:
        qs = grid.iteration_policy.iterations(algo, ratios)
        yield algo, ratios, qs, success_for(algo, ratios, qs)


def sweep_curves(grid: SweepGrid) -> list[CurvePoint]:
    """One CurvePoint per (algorithm, ratio), ordered by algorithm then ratio as given."""
    points = []
    for algo, ratios, qs, ps in _sweep_arrays(grid):
        points.extend(
            CurvePoint(r, algo, q, p) for r, q, p in zip(ratios.tolist(), qs.tolist(), ps.tolist())
        )
    return points


def curves_to_csv(grid: SweepGrid) -> str:
    """CSV with header ``algorithm,ratio,iterations,p_success``."""
    buf = io.StringIO()
    buf.write("algorithm,ratio,iterations,p_success\n")
    for algo, ratios, qs, ps in _sweep_arrays(grid):
        buf.writelines(
            f"{algo},{fmt(r)},{q},{fmt(p)}\n" for r, q, p in zip(ratios.tolist(), qs.tolist(), ps.tolist())
        )
    return buf.getvalue()


def curve_minima(grid: SweepGrid) -> dict[str, tuple[float, float]]:
    """``algorithm -> (ratio_at_min, min_prob)`` over the grid."""
    out = {}
    for algo, ratios, _qs, ps in _sweep_arrays(grid):
        i = int(np.argmin(ps))
        out[algo] = (float(ratios[i]), float(ps[i]))
    return out


_ITERATION_CONSTANTS = {
    "partial_diffusion": analytic.PD_ITERATION_CONSTANT,
    "grover": analytic.GROVER_ITERATION_CONSTANT,
}


def min_probability_with_paper_iterations(algorithm: str, ratio_grid_resolution: int = 100_000,
                                          refine: bool = True):
    """Global minimum of success probability when each algorithm uses its own iteration formula.

    Scans ratios ``k / resolution`` for ``k = 1..resolution`` and returns
    ``(ratio_at_min, min_prob)``. The curve jumps wherever the floored
    iteration count changes, and the minimum sits on the low side of such a
    jump. With ``refine`` the jump next to the grid minimum is located
    exactly (``r* = (c / q)^2`` for iteration constant ``c``) and evaluated
    there, so the result does not depend on how close a grid point lands to
    the jump.
    """
    if ratio_grid_resolution < 10_000:
        raise DomainError("ratio grid resolution must be at least 10^4")
    algorithm = resolve_algorithm(algorithm)
    ratios = np.arange(1, ratio_grid_resolution + 1) / ratio_grid_resolution
    qs = PAPER_FORMULA.iterations(algorithm, ratios)
    ps = success_for(algorithm, ratios, qs)
    i = int(np.argmin(ps))
    best = (float(ratios[i]), float(ps[i]))
    if not refine or algorithm not in _ITERATION_CONSTANTS:
        return best
    c = _ITERATION_CONSTANTS[algorithm]
    for j in (i - 1, i + 1):
        if not 0 <= j < ratios.shape[0] or qs[j] == qs[i]:
            continue
        q_left = int(max(qs[i], qs[j]))
        # floor(c / sqrt(r)) == q_left holds up to and including r*
        r_star = min(max((c / q_left) ** 2, ratios[min(i, j)]), ratios[max(i, j)])
        p_star = float(success_for(algorithm, r_star, q_left)[0])
        if p_star < best[1]:
            best = (float(r_star), p_star)
    return best


# -- cross-validation ------------------------------------------------------------

ANALYTIC_TOL = 1e-9
SIMULATOR_TOL = 1e-10
STRUCTURE_TOL = 1e-12


@dataclass
class PairResult:
    pair: str
    max_abs_dev: float
    grid_size: int
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_dev < self.threshold)

    def as_dict(self) -> dict:
        return {"pair": self.pair, "max_abs_dev": self.max_abs_dev,
                "grid_size": self.grid_size, "pass": self.passed}


@dataclass
class ValidationReport:
    results: list[PairResult] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> str:
        return json.dumps({"pass": self.passed, "truncated": self.truncated,
                           "results": [r.as_dict() for r in self.results]}, indent=2)

    def to_csv(self) -> str:
        lines = ["pair,max_abs_dev,grid_size,pass"]
        lines += [f"{r.pair},{r.max_abs_dev:.6e},{r.grid_size},{str(r.passed).lower()}"
                  for r in self.results]
        return "\n".join(lines) + "\n"


def _match_counts(N: int, limit: int, rng: np.random.Generator) -> list[int]:
    if N <= limit:
        return list(range(1, N + 1))
    picks = rng.choice(np.arange(2, N), size=limit - 2, replace=False)
    return sorted({1, N, *picks.tolist()})


def _simulate_instance(n: int, M: int, q_max: int, seed: int,
                       diffusion: Callable | None) -> tuple[float, float, float]:
    """Max deviations (amplitudes vs closed form, P_s vs closed form, structure spread)."""
    params = analytic.SearchParams(n, M)
    marked = MarkedSet.random(n, M, seed)
    closed = analytic.closed_form_trajectory(params, q_max)
    ps_closed = analytic.success_probability_ratio(params.ratio, np.arange(q_max + 1))
    amp_dev = ps_dev = spread = 0.0
    for q, state in enumerate(operators.search_trajectory(n, marked, q_max, diffusion)):
        st = operators.amplitude_structure(state, marked)
        devs = [abs(st.b - closed[q, 1]), abs(st.c - closed[q, 2])]
        if st.a is not None:
            devs.append(abs(st.a - closed[q, 0]))
        amp_dev = max(amp_dev, *devs)
        spread = max(spread, st.spread, st.max_imag)
        ps = sum(abs(x) ** 2 for x in (st.b, st.c)) * M
        ps_dev = max(ps_dev, abs(ps - ps_closed[q]))
    return amp_dev, ps_dev, spread


def cross_validate(n_max: int = 6, q_max: int = 20, sample_budget: int = 400, *,
                   m_per_n: int = 64, seed: int = 0,
                   threads: int = 1, diffusion: Callable | None = None) -> ValidationReport:
    """Compare simulator, recurrence and closed form over a sampled (n, M, q) grid.

    Analytic pair: every ``n <= n_max`` (at most 12), all ``M`` when
    ``N <= m_per_n`` and ``m_per_n`` sampled values otherwise. Simulator pairs: ``n <= min(n_max, 10)``, at most
    ``sample_budget`` (n, M) instances; if the grid is larger the report is
    marked truncated. ``diffusion`` replaces the partial diffusion operator
    in the simulator path (negative controls).
    """
    if not 1 <= n_max <= 12 or q_max < 0:
        raise DomainError("need 1 <= n_max <= 12 and q_max >= 0")
    rng = np.random.default_rng(seed)
    report = ValidationReport()

    worst, count = 0.0, 0
    for n in range(1, n_max + 1):
        for M in _match_counts(2**n, m_per_n, rng):
            params = analytic.SearchParams(n, M)
            rec = analytic.recurrence_trajectory(params, q_max)
            closed = analytic.closed_form_trajectory(params, q_max)
            worst = max(worst, float(np.max(np.abs(rec - closed))))
            count += rec.shape[0]
    report.results.append(PairResult("recurrence_vs_closed_form", worst, count, ANALYTIC_TOL))

    sim_n_max = min(n_max, 10)
    instances = [(n, M) for n in range(1, sim_n_max + 1)
                 for M in _match_counts(2**n, m_per_n, rng)]
    if len(instances) > sample_budget:
        report.truncated = True
        keep = rng.choice(len(instances), size=sample_budget, replace=False)
        instances = [instances[i] for i in sorted(keep)]
    seeds = rng.integers(0, 2**63, size=len(instances)).tolist()

    def run(args):
        (n, M), s = args
        return _simulate_instance(n, M, q_max, s, diffusion)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            devs = list(pool.map(run, zip(instances, seeds)))
    else:
        devs = [run(a) for a in zip(instances, seeds)]
    size = len(instances) * (q_max + 1)
    amp, ps, spread = (max((d[i] for d in devs), default=0.0) for i in range(3))
    report.results.append(PairResult("simulated_vs_closed_form", amp, size, SIMULATOR_TOL))
    report.results.append(PairResult("simulated_p_success_vs_closed_form", ps, size, SIMULATOR_TOL))
    report.results.append(PairResult("simulated_three_amplitude_structure", spread, size, STRUCTURE_TOL))
    return report
