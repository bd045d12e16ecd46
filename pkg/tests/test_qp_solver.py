import numpy as np
import pytest

from app.models import QpBackendName, SolveStatus
from app.services.qp_solver import ActiveSetSolver, OsqpSolver, get_backend
from tests.conftest import random_spd


@pytest.fixture
def solver():
    return ActiveSetSolver()


def _assert_kkt(H, f, C, b, x, lam, tol=1e-6):
    scale = 1.0 + np.max(np.abs(lam)) + np.max(np.abs(f))
    assert np.all(C @ x <= b + tol)
    assert np.all(lam >= -tol)
    assert np.allclose(H @ x + f + C.T @ lam, 0.0, atol=tol * scale)
    assert np.allclose(lam * (b - C @ x), 0.0, atol=tol * scale)


def test_unconstrained_matches_linear_solve(solver):
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(1, 12))
        H = random_spd(rng, n)
        f = rng.normal(size=n)
        res = solver.solve(H, f, np.zeros((0, n)), np.zeros(0))
        assert res.status is SolveStatus.SOLVED
        assert res.iterations == 0
        assert np.allclose(res.x, np.linalg.solve(H, -f), rtol=1e-8, atol=1e-8)


def test_inactive_constraints_leave_unconstrained_optimum(solver):
    rng = np.random.default_rng(1)
    H = random_spd(rng, 4)
    f = rng.normal(size=4)
    C = rng.normal(size=(6, 4))
    res = solver.solve(H, f, C, np.full(6, 1e6))
    assert np.allclose(res.x, np.linalg.solve(H, -f), atol=1e-8)
    assert np.all(res.multipliers == 0.0)


@pytest.mark.parametrize("seed", range(10))
def test_box_projection(solver, seed):
    # min 1/2 |x - p|^2  s.t.  x <= u  ->  x = min(p, u), lambda = max(p - u, 0)
    rng = np.random.default_rng(100 + seed)
    n = 5
    p, u = rng.normal(size=n), rng.normal(size=n)
    res = solver.solve(np.eye(n), -p, np.eye(n), u)
    assert res.status is SolveStatus.SOLVED
    assert np.allclose(res.x, np.minimum(p, u), atol=1e-6)
    assert np.allclose(res.multipliers, np.maximum(p - u, 0.0), atol=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_halfspace_projection(solver, seed):
    # min 1/2 |x - p|^2  s.t.  a'x <= beta
    rng = np.random.default_rng(200 + seed)
    n = 4
    p, a = rng.normal(size=n), rng.normal(size=n)
    beta = float(a @ p) - 1.0
    res = solver.solve(np.eye(n), -p, a.reshape(1, -1), np.array([beta]))
    step = (a @ p - beta) / (a @ a)
    assert np.allclose(res.x, p - step * a, atol=1e-6)
    assert res.multipliers[0] == pytest.approx(step, abs=1e-6)


def test_two_variable_kkt_point(solver):
    # min x1^2 + x2^2  s.t.  x1 + x2 >= 1
    H = 2.0 * np.eye(2)
    res = solver.solve(H, np.zeros(2), np.array([[-1.0, -1.0]]), np.array([-1.0]))
    assert np.allclose(res.x, [0.5, 0.5], atol=1e-9)
    assert res.multipliers[0] == pytest.approx(1.0)
    assert res.objective == pytest.approx(0.5)


def test_random_constrained_problems_satisfy_kkt(solver):
    rng = np.random.default_rng(2)
    for _ in range(50):
        n, m = int(rng.integers(2, 10)), int(rng.integers(1, 20))
        H = random_spd(rng, n)
        f = rng.normal(size=n) * 5.0
        C = rng.normal(size=(m, n))
        x_feasible = rng.normal(size=n)
        b = C @ x_feasible + rng.uniform(0.0, 1.0, size=m)
        res = solver.solve(H, f, C, b)
        assert res.status is SolveStatus.SOLVED
        _assert_kkt(H, f, C, b, res.x, res.multipliers)


def test_detects_infeasibility(solver):
    # x <= -1 and x >= 1
    res = solver.solve(np.eye(1), np.zeros(1), np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]))
    assert res.status is SolveStatus.INFEASIBLE


def test_iteration_cap(solver):
    p = np.array([1.0, 1.0, 1.0])
    res = solver.solve(np.eye(3), -p, np.eye(3), np.zeros(3), max_iter=1)
    assert res.status is SolveStatus.MAX_ITER
    assert res.iterations == 1


def test_osqp_agrees_with_active_set(solver):
    pytest.importorskip("osqp")
    rng = np.random.default_rng(3)
    osqp_solver = OsqpSolver()
    for _ in range(10):
        n, m = 6, 10
        H = random_spd(rng, n)
        f = rng.normal(size=n) * 5.0
        C = rng.normal(size=(m, n))
        b = C @ rng.normal(size=n) + rng.uniform(0.0, 1.0, size=m)
        exact = solver.solve(H, f, C, b)
        approx = osqp_solver.solve(H, f, C, b, tol=1e-9, max_iter=20000)
        assert approx.status is SolveStatus.SOLVED
        assert np.allclose(approx.x, exact.x, atol=1e-4)
        assert approx.objective == pytest.approx(exact.objective, rel=1e-4, abs=1e-6)


def test_osqp_warm_start_accepts_previous_solution(solver):
    pytest.importorskip("osqp")
    rng = np.random.default_rng(4)
    H, f = random_spd(rng, 3), rng.normal(size=3)
    C, b = np.eye(3), np.full(3, 0.1)
    exact = solver.solve(H, f, C, b)
    res = OsqpSolver().solve(H, f, C, b, tol=1e-9, max_iter=20000, x0=exact.x)
    assert res.status is SolveStatus.SOLVED
    assert np.allclose(res.x, exact.x, atol=1e-4)


def test_get_backend():
    assert isinstance(get_backend("active_set"), ActiveSetSolver)
    assert isinstance(get_backend(QpBackendName.OSQP), OsqpSolver)
    with pytest.raises(ValueError):
        get_backend("simplex")
