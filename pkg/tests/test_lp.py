import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from jensen_duality.errors import ValidationError
from jensen_duality.lp import (EQ, GE, INFEASIBLE, LE, OPTIMAL, UNBOUNDED, LinearProgram,
                               LpSolution, solve, verify_certificates)


def highs(lp: LinearProgram):
    sgn = -1.0 if lp.maximize else 1.0
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, rhs, s in zip(lp.A, lp.b, lp.senses):
        if s == LE:
            A_ub.append(row), b_ub.append(rhs)
        elif s == GE:
            A_ub.append(-row), b_ub.append(-rhs)
        else:
            A_eq.append(row), b_eq.append(rhs)
    bounds = [(None, None) if f else (0, None if not np.isfinite(u) else u)
              for f, u in zip(lp.free, lp.ub)]
    res = linprog(sgn * lp.c, A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(A_eq) if A_eq else None, b_eq=b_eq or None, bounds=bounds,
                  method="highs")
    return res


def random_lp(rng, m, n, bounded=False):
    A = rng.normal(size=(m, n))
    x0 = rng.uniform(0, 1, n)
    senses = tuple(rng.choice([LE, GE, EQ], size=m, p=[0.5, 0.3, 0.2]))
    b = A @ x0 + np.array([rng.uniform(0, 1) if s == LE else (-rng.uniform(0, 1) if s == GE
                                                              else 0.0) for s in senses])
    c = rng.normal(size=n)
    free = rng.uniform(size=n) < 0.2
    upper = np.where(free, np.inf, np.where(rng.uniform(size=n) < 0.5, 1.5, np.inf)) \
        if bounded else None
    # keep it bounded: a box row on the sum of |x|
    A = np.vstack([A, np.ones(n), -np.ones(n)])
    b = np.concatenate([b, [n * 2.0], [n * 2.0]])
    senses = senses + (LE, LE)
    return LinearProgram.build(c, A, b, senses, free=free, maximize=bool(rng.integers(2)),
                               upper=upper)


def test_textbook_lp():
    lp = LinearProgram.build([1, 1], [[1, 1]], [1], LE, maximize=True)
    sol = solve(lp)
    assert sol.status == OPTIMAL
    assert sol.value == pytest.approx(1.0, abs=1e-12)
    assert sol.y == pytest.approx([1.0], abs=1e-12)
    assert sol.residuals.max() <= 1e-12


def test_textbook_min_with_ge_rows():
    # min 2x + 3y  s.t. x + y >= 4, x + 3y >= 6  ->  (3, 1), value 9, duals (1.5, 0.5)
    lp = LinearProgram.build([2, 3], [[1, 1], [1, 3]], [4, 6], GE)
    sol = solve(lp)
    assert sol.value == pytest.approx(9.0, abs=1e-12)
    assert sol.x == pytest.approx([3.0, 1.0], abs=1e-12)
    assert sol.y == pytest.approx([1.5, 0.5], abs=1e-12)


def test_equality_and_free_variable():
    # min x - y  s.t.  x + y == 2, x - y <= 1, y free, 0 <= x
    lp = LinearProgram.build([1, -1], [[1, 1], [1, -1]], [2, 1], (EQ, LE), free=[False, True])
    sol = solve(lp)
    ref = highs(lp)
    assert sol.value == pytest.approx(ref.fun, abs=1e-10)


def test_infeasible_and_unbounded():
    lp = LinearProgram.build([1], [[1], [1]], [1, 2], (LE, GE))
    assert solve(lp).status == INFEASIBLE
    lp = LinearProgram.build([1, 0], [[1, -1]], [1], LE, maximize=True)
    assert solve(lp).status == UNBOUNDED


def test_upper_bounds():
    # max x + 2y with x <= 3 and y <= 1 as bounds, x + y <= 3.5
    lp = LinearProgram.build([1, 2], [[1, 1]], [3.5], LE, maximize=True, upper=[3, 1])
    sol = solve(lp)
    assert sol.value == pytest.approx(4.5, abs=1e-12)
    assert sol.x == pytest.approx([2.5, 1.0], abs=1e-12)


@pytest.mark.parametrize("bad", [
    dict(c=[1, 2], A=[[1, 1, 1]], b=[1]),
    dict(c=[1], A=[[1]], b=[1, 2]),
    dict(c=[np.nan], A=[[1]], b=[1]),
    dict(c=[1], A=[[1]], b=[1], senses="<"),
    dict(c=[1], A=[[1]], b=[1], upper=[-1.0]),
    dict(c=[1], A=[[1]], b=[1], free=True, upper=[1.0]),
])
def test_validation(bad):
    kw = dict(senses=LE)
    kw.update(bad)
    with pytest.raises(ValidationError):
        LinearProgram.build(**kw)


@pytest.mark.parametrize("seed", range(40))
def test_against_highs(seed):
    rng = np.random.default_rng(seed)
    lp = random_lp(rng, int(rng.integers(2, 9)), int(rng.integers(2, 12)), bounded=seed % 2 == 1)
    sol = solve(lp)
    ref = highs(lp)
    if ref.status == 2:
        assert sol.status == INFEASIBLE
        return
    if ref.status == 3:
        assert sol.status == UNBOUNDED
        return
    assert ref.status == 0
    assert sol.status == OPTIMAL
    sgn = -1.0 if lp.maximize else 1.0
    assert sol.value == pytest.approx(sgn * ref.fun, abs=1e-8 * max(1, abs(ref.fun)))
    assert sol.residuals.max() <= 1e-8


def _vertices(A, b):
    """Brute-force vertex enumeration of ``{x >= 0 : A x <= b}``."""
    m, n = A.shape
    G = np.vstack([A, -np.eye(n)])
    h = np.concatenate([b, np.zeros(n)])
    out = []
    for rows in itertools.combinations(range(m + n), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ v <= h + 1e-9):
            out.append(v)
    return out


@pytest.mark.parametrize("seed", range(10))
def test_against_vertex_enumeration(seed):
    rng = np.random.default_rng(100 + seed)
    A = rng.uniform(0.1, 1.0, size=(5, 8))
    b = rng.uniform(1.0, 2.0, size=5)
    c = rng.normal(size=8)
    sol = solve(LinearProgram.build(c, A, b, LE, maximize=True))
    best = max(c @ v for v in _vertices(A, b))
    assert sol.value == pytest.approx(best, abs=1e-10)


def test_determinism():
    rng = np.random.default_rng(3)
    lp = random_lp(rng, 8, 12, bounded=True)
    a, b = solve(lp), solve(lp)
    assert a.basis == b.basis and a.iterations == b.iterations
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


@pytest.mark.parametrize("seed", range(10))
def test_scale_covariance(seed):
    rng = np.random.default_rng(200 + seed)
    A = rng.uniform(0.1, 1.0, size=(5, 7))
    b = rng.uniform(1.0, 2.0, size=5)
    c = rng.uniform(0.1, 1.0, size=7)
    t = float(rng.uniform(0.1, 50.0))
    v1 = solve(LinearProgram.build(c, A, b, LE, maximize=True)).value
    v2 = solve(LinearProgram.build(c, A, t * b, LE, maximize=True)).value
    assert v2 == pytest.approx(t * v1, rel=1e-9)


def test_residuals_detect_perturbed_solution():
    lp = LinearProgram.build([2, 3], [[1, 1], [1, 3]], [4, 6], GE)
    sol = solve(lp)
    bad = LpSolution(OPTIMAL, sol.value, sol.x + np.array([0.0, -1e-3]), sol.y)
    r = verify_certificates(lp, bad)
    assert r.primal == pytest.approx(3e-3, rel=1e-6)  # row 2 now misses by 3e-3
    bad = LpSolution(OPTIMAL, sol.value, sol.x, sol.y + np.array([0.1, 0.0]))
    assert verify_certificates(lp, bad).max() > 1e-2


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_strong_duality_property(seed):
    rng = np.random.default_rng(seed)
    lp = random_lp(rng, int(rng.integers(1, 7)), int(rng.integers(1, 9)),
                   bounded=bool(rng.integers(2)))
    sol = solve(lp)
    if sol.status == OPTIMAL:
        r = sol.residuals
        assert r.gap <= 1e-8 and r.primal <= 1e-8 and r.dual <= 1e-8
