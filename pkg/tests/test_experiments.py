import csv
import io
import json

import numpy as np
import pytest

from pdsearch import analytic, experiments, operators
from pdsearch.errors import DomainError
from pdsearch.experiments import (
    IterationPolicy,
    PAPER_FORMULA,
    SweepGrid,
    cross_validate,
    curves_to_csv,
    min_probability_with_paper_iterations,
    sweep_curves,
    table_first_iteration,
    table_to_csv,
)
from pdsearch.statevector import probability_of_index_set

# published first-iteration table, six decimals
PUBLISHED_TABLE = {
    2: (1.0, 0.8125, 0.875),
    3: (1.0, 0.507812, 0.937500),
    4: (1.0, 0.282227, 0.968750),
    5: (1.0, 0.148560, 0.984375),
    6: (1.0, 0.076187, 0.992187),
}


def test_table_rows_match_published_values():
    rows = table_first_iteration(2, 6)
    assert [r.n for r in rows] == [2, 3, 4, 5, 6]
    for r in rows:
        expected = PUBLISHED_TABLE[r.n]
        assert (r.max_prob, r.min_prob, r.avg_prob) == pytest.approx(expected, abs=5e-6)


def test_table_min_is_single_match():
    for r in table_first_iteration(1, 12):
        x = 1 / 2**r.n
        assert r.min_prob == pytest.approx(5 * x - 8 * x**2 + 4 * x**3, abs=1e-12)
        assert r.avg_prob == 1 - 1 / 2 ** (r.n + 1)


@pytest.mark.parametrize("bounds", [(0, 3), (5, 4), (2, 21)])
def test_table_range_validation(bounds):
    with pytest.raises(DomainError):
        table_first_iteration(*bounds)


def test_table_csv_header():
    text = table_to_csv(table_first_iteration(2, 3))
    assert text.splitlines()[0] == "n,max_prob,min_prob,avg_prob"
    assert text.splitlines()[1] == "2,1,0.8125,0.875"


def test_sweep_grover_quarter():
    [pt] = sweep_curves(SweepGrid((0.25,), IterationPolicy.fixed(1), ("grover",)))
    assert pt.p_success == pytest.approx(1.0, abs=1e-12)


def test_sweep_pd_half():
    [pt] = sweep_curves(SweepGrid((0.5,), IterationPolicy.fixed(1), ("pd",)))
    assert pt.p_success == pytest.approx(1.0, abs=1e-12)
    assert pt.algorithm == "partial_diffusion"


def test_sweep_pd_third():
    [pt] = sweep_curves(SweepGrid((1 / 3,), IterationPolicy.fixed(1), ("pd",)))
    assert pt.p_success == pytest.approx(5 / 3 - 8 / 9 + 4 / 27, abs=1e-12)
    assert pt.p_success == pytest.approx(0.9259, abs=1e-4)


def test_sweep_ordering_and_reevaluation():
    grid = SweepGrid.linear(50, PAPER_FORMULA)
    points = sweep_curves(grid)
    assert [p.algorithm for p in points] == [a for a in grid.algorithms for _ in range(50)]
    for p in points:
        if p.algorithm == "partial_diffusion":
            ref = analytic.success_probability_ratio(p.ratio, p.iterations_used)
            assert p.iterations_used == analytic.required_iterations_ratio(p.ratio)
        elif p.algorithm == "grover":
            ref = analytic.grover_success_probability_ratio(p.ratio, p.iterations_used)
            assert p.iterations_used == analytic.grover_iterations_ratio(p.ratio)
        else:
            ref = p.ratio
        assert abs(p.p_success - ref) < 1e-12
        assert 0 <= p.p_success <= 1 + 1e-12


def test_sweep_integer_instances_match_params():
    for n, M in [(4, 1), (6, 20), (10, 3)]:
        p = analytic.SearchParams(n, M)
        [pt] = sweep_curves(SweepGrid((M / 2**n,), PAPER_FORMULA, ("pd",)))
        q = analytic.required_iterations(p)
        assert pt.iterations_used == q
        assert pt.p_success == pytest.approx(analytic.success_probability(p, q), abs=1e-12)


def test_grover_formula_policy_applies_to_pd():
    [pt] = sweep_curves(SweepGrid((0.01,), experiments.GROVER_FORMULA, ("pd",)))
    assert pt.iterations_used == analytic.grover_iterations(100, 1)


@pytest.mark.parametrize("ratios", [(), (0.0,), (1.5,), (-0.2,)])
def test_sweep_grid_rejects(ratios):
    with pytest.raises(DomainError):
        SweepGrid(ratios, IterationPolicy.fixed(1))


def test_sweep_grid_rejects_unknown_algorithm():
    with pytest.raises(DomainError):
        SweepGrid((0.5,), IterationPolicy.fixed(1), ("shor",))


def test_log_grid_reaches_hard_cases():
    grid = SweepGrid.logarithmic(200, 1e-6, 1e-3, PAPER_FORMULA, ("pd", "grover"))
    pts = sweep_curves(grid)
    assert min(p.ratio for p in pts) == pytest.approx(1e-6)
    pd_min = min(p.p_success for p in pts if p.algorithm == "partial_diffusion")
    assert pd_min > 0.84


def test_csv_schema_and_determinism():
    grid = SweepGrid.linear(100, IterationPolicy.fixed(3), ("pd", "grover", "classical"))
    a, b = curves_to_csv(grid), curves_to_csv(grid)
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert list(rows[0]) == ["algorithm", "ratio", "iterations", "p_success"]
    assert len(rows) == 300
    for row in rows:
        # 12 significant digits
        mantissa = row["p_success"].split("e")[0].replace("-", "").replace(".", "").lstrip("0")
        assert len(mantissa) <= 12


def test_min_grover():
    ratio, p = min_probability_with_paper_iterations("grover", 100_000)
    assert ratio == pytest.approx(0.61685, abs=2e-4)
    assert p == pytest.approx(0.1749, abs=5e-4)


def test_min_partial_diffusion():
    ratio, p = min_probability_with_paper_iterations("pd", 100_000)
    assert ratio == pytest.approx(0.30842, abs=2e-4)
    assert p == pytest.approx(0.8472, abs=5e-4)


def test_min_classical_at_grid_edge():
    ratio, p = min_probability_with_paper_iterations("classical", 10_000)
    assert ratio == p == 1e-4


def test_min_requires_resolution():
    with pytest.raises(DomainError):
        min_probability_with_paper_iterations("pd", 1000)


@pytest.mark.parametrize("algorithm", ["pd", "grover"])
def test_min_grid_stability(algorithm):
    r1, p1 = min_probability_with_paper_iterations(algorithm, 100_000)
    r2, p2 = min_probability_with_paper_iterations(algorithm, 200_000)
    assert abs(r1 - r2) < 1e-5
    assert abs(p1 - p2) < 1e-5


def test_cross_validate_small_exhaustive():
    report = cross_validate(n_max=2, q_max=10, sample_budget=100)
    assert report.passed and not report.truncated
    for r in report.results:
        assert r.max_abs_dev < 1e-12


def test_cross_validate_truncation_is_reported():
    report = cross_validate(n_max=6, q_max=5, sample_budget=10)
    assert report.truncated
    assert report.passed


def test_cross_validate_report_formats():
    report = cross_validate(n_max=3, q_max=4, sample_budget=50)
    data = json.loads(report.to_json())
    assert {"pair", "max_abs_dev", "grid_size", "pass"} <= set(data["results"][0])
    assert report.to_csv().startswith("pair,max_abs_dev,grid_size,pass\n")


def test_cross_validate_catches_broken_diffusion():
    def broken(state):
        # wrong sign on the workspace-1 subspace
        out = operators.apply_partial_diffusion(state)
        amps = out.amplitudes.copy()
        amps[1::2] *= -1
        return operators.StateVector(state.n_index_qubits, amps)

    report = cross_validate(n_max=4, q_max=6, sample_budget=50, diffusion=broken)
    assert not report.passed


def test_cross_validate_threads_match_serial():
    a = cross_validate(n_max=5, q_max=8, sample_budget=40, seed=3)
    b = cross_validate(n_max=5, q_max=8, sample_budget=40, seed=3, threads=4)
    assert a.to_json() == b.to_json()


def test_simulator_n10_single_match_at_formula_iterations():
    n, marked = 10, operators.MarkedSet(10, [123])
    p = analytic.SearchParams(n, 1)
    q = analytic.required_iterations(p)
    assert q == 35
    sim = probability_of_index_set(operators.run_search(n, marked, q), marked)
    assert abs(sim - analytic.success_probability(p, q)) < 1e-10


def test_all_marked_certainty_three_ways():
    n = 6
    p = analytic.SearchParams(n, 64)
    marked = operators.MarkedSet(n, range(64))
    assert probability_of_index_set(operators.run_search(n, marked, 1), marked) == pytest.approx(1, abs=1e-12)
    assert analytic.success_probability(p, 1) == pytest.approx(1, abs=1e-12)
    t = analytic.amplitudes_by_recurrence(p, 1)
    assert p.M * (t.b**2 + t.c**2) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("algorithm,ratio,value", [("pd", 0.30842, 0.8472), ("grover", 0.61685, 0.1749)])
def test_min_unrefined_grid_also_meets_landmarks(algorithm, ratio, value):
    r, p = min_probability_with_paper_iterations(algorithm, 100_000, refine=False)
    assert r == pytest.approx(ratio, abs=2e-4)
    assert p == pytest.approx(value, abs=5e-4)


def test_min_refined_location_is_iteration_boundary():
    r, _ = min_probability_with_paper_iterations("pd", 100_000)
    assert r == pytest.approx(np.pi**2 / 32, abs=1e-15)
