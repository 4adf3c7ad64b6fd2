import numpy as np
import pytest
import scipy.sparse as sp
from oracles import tableau_lp

from mcsp.catalog import build_blocks, build_catalog
from mcsp.instance import Instance, generate_instance
from mcsp.model import build_cb, build_cs
from mcsp.simplex import BoundedSimplex, LpStatus, solve_lp


def both(inst):
    cat = build_catalog(inst)
    return build_cb(build_blocks(cat), inst.n), build_cs(cat, inst.n)


@pytest.mark.parametrize("s", ["A", "ACGT", "ABABABAB", "GATTACAGATTACA"])
def test_identical_strings_lp_is_one(s):
    for model in both(Instance(s, s)):
        res = solve_lp(model)
        assert res.status is LpStatus.OPTIMAL
        assert res.objective_value == pytest.approx(1.0, abs=1e-9)


def test_ab_ba():
    for model in both(Instance("AB", "BA")):
        assert solve_lp(model).objective_value == pytest.approx(2.0, abs=1e-9)


# values computed with tests/oracles.py::tableau_lp and frozen
@pytest.mark.parametrize("s1,s2,expected", [
    ("AGACTG", "ACTAGG", 3.0),
    ("ABBBAABBA", "ABBAABABB", 3.5),
    ("BAABBAAAB", "BBAAAABAB", 11 / 3),
])
def test_frozen_lp_values(s1, s2, expected):
    for model in both(Instance(s1, s2)):
        res = solve_lp(model)
        assert res.objective_value == pytest.approx(expected, abs=1e-7)
        assert model.is_feasible(res.values, tol=1e-7)


@pytest.mark.parametrize("seed", range(15))
def test_against_tableau_oracle(seed):
    inst = generate_instance(7 + seed % 5, 2 + seed % 2, 100 + seed)
    for model in both(inst):
        ref = tableau_lp(model.A.toarray(), model.rhs, model.obj)
        assert solve_lp(model).objective_value == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_random_box_lp_against_oracle(seed):
    rng = np.random.default_rng(seed)
    m, n = 4, 9
    A = rng.integers(-3, 4, size=(m, n)).astype(float)
    x0 = rng.random(n)
    b = A @ x0
    c = rng.normal(size=n)
    res = solve_lp_arrays(A, b, c)
    assert res.status is LpStatus.OPTIMAL
    assert res.objective_value == pytest.approx(tableau_lp(A, b, c), abs=1e-7)
    assert np.allclose(A @ res.values, b, atol=1e-7)
    assert np.all(res.values > -1e-9) and np.all(res.values < 1 + 1e-9)


def solve_lp_arrays(A, b, c, lower=None, upper=None, **kw):
    n = len(c)
    s = BoundedSimplex(sp.csc_matrix(A), b, c,
                       np.zeros(n) if lower is None else lower,
                       np.ones(n) if upper is None else upper, **kw)
    return s.result(s.solve())


def test_beale_cycling_example_terminates():
    # Beale's example cycles under textbook Dantzig pivoting without anti-cycling
    A = np.array([[1, 0, 0, 0.25, -8, -1, 9],
                  [0, 1, 0, 0.5, -12, -0.5, 3],
                  [0, 0, 1, 0, 0, 1, 0]])
    b = np.array([0, 0, 1.0])
    c = np.array([0, 0, 0, -0.75, 20, -0.5, 6])
    res = solve_lp_arrays(A, b, c, upper=np.full(7, 100.0), stall_limit=3)
    assert res.status is LpStatus.OPTIMAL
    assert res.objective_value == pytest.approx(-1.25, abs=1e-9)


def test_infeasible():
    res = solve_lp_arrays(np.array([[1.0, 1.0]]), np.array([3.0]), np.array([1.0, 1.0]))
    assert res.status is LpStatus.INFEASIBLE


def test_iteration_limit(worked):
    cb, _ = both(worked)
    assert solve_lp(cb, max_iters=1).status is LpStatus.ITERATION_LIMIT


@pytest.mark.parametrize("seed", range(6))
def test_iteration_counts_are_modest(seed):
    inst = generate_instance(40, [2, 4, 12][seed % 3], seed)
    for model in both(inst):
        res = solve_lp(model)
        assert res.status is LpStatus.OPTIMAL
        assert res.iterations < 10 * (model.num_rows + model.num_vars) or res.bland_engaged


@pytest.mark.parametrize("seed", range(8))
def test_reoptimize_matches_fresh_solve(seed):
    inst = generate_instance(20, 3, seed)
    _, cs = both(inst)
    solver = BoundedSimplex(cs.A, cs.rhs, cs.obj, cs.lower, cs.upper)
    assert solver.solve() is LpStatus.OPTIMAL
    rng = np.random.default_rng(seed)
    lower, upper = cs.lower.copy(), cs.upper.copy()
    x = solver.structural_values()
    for j in rng.choice(cs.num_vars, size=3, replace=False):
        if rng.random() < 0.5:
            upper[j] = 0.0
        else:
            lower[j] = 1.0
        solver.set_bounds(lower, upper)
        status = solver.reoptimize()
        fresh = BoundedSimplex(cs.A, cs.rhs, cs.obj, lower, upper)
        fresh_status = fresh.solve()
        if fresh_status is LpStatus.INFEASIBLE:
            assert status is LpStatus.INFEASIBLE
            break
        assert status is LpStatus.OPTIMAL
        x = solver.structural_values()
        assert cs.obj @ x == pytest.approx(cs.obj @ fresh.structural_values(), abs=1e-7)
        assert np.abs(cs.A @ x - cs.rhs).max() < 1e-7


def test_snapshot_restore(worked):
    _, cs = both(worked)
    solver = BoundedSimplex(cs.A, cs.rhs, cs.obj, cs.lower, cs.upper)
    solver.solve()
    snap = solver.snapshot()
    value = solver.objective()
    upper = cs.upper.copy()
    upper[np.flatnonzero(solver.structural_values() > 0.5)[0]] = 0.0
    solver.set_bounds(cs.lower, upper)
    solver.reoptimize()
    assert solver.objective() > value
    solver.restore(snap)
    assert solver.objective() == pytest.approx(value)


def test_cutoff_stops_early():
    inst = generate_instance(30, 2, 3)
    _, cs = both(inst)
    solver = BoundedSimplex(cs.A, cs.rhs, cs.obj, cs.lower, cs.upper)
    solver.solve()
    root = solver.objective()
    upper = cs.upper.copy()
    upper[solver.structural_values() > 1e-6] = 0.0
    solver.set_bounds(cs.lower, upper)
    status = solver.reoptimize(cutoff=root + 1e-3)
    assert status in (LpStatus.CUTOFF, LpStatus.INFEASIBLE)
