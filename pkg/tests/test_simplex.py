import numpy as np
import pytest
from scipy.optimize import linprog

from latdec.errors import CertificationInconclusive
from latdec.simplex import solve_lp


def test_textbook_example():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
    res = solve_lp(np.array([3.0, 5.0]), np.array([[1.0, 0], [0, 2], [3, 2]]), np.array([4.0, 12, 18]))
    assert res.status == "optimal"
    assert res.value == pytest.approx(36)
    assert np.allclose(res.x, [2, 6])


def test_infeasible():
    # x + y <= -1 with x, y >= 0
    res = solve_lp(np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([-1.0]))
    assert res.status == "infeasible"


def test_unbounded():
    res = solve_lp(np.array([1.0, 0.0]), np.array([[-1.0, 1.0]]), np.array([1.0]))
    assert res.status == "unbounded"


def test_negative_rhs_needs_phase_one():
    # x >= 2 written as -x <= -2; max -x -> x = 2
    res = solve_lp(np.array([-1.0]), np.array([[-1.0], [1.0]]), np.array([-2.0, 5.0]))
    assert res.status == "optimal" and res.x[0] == pytest.approx(2)


def test_iteration_cap():
    with pytest.raises(CertificationInconclusive):
        solve_lp(np.array([3.0, 5.0]), np.array([[1.0, 0], [0, 2], [3, 2]]), np.array([4.0, 12, 18]), max_iter=1)


def test_against_scipy(rng):
    mismatches = 0
    for _ in range(200):
        m, n = int(rng.integers(2, 9)), int(rng.integers(2, 6))
        A = rng.normal(size=(m, n))
        b = rng.normal(size=m) + 0.5
        c = rng.normal(size=n)
        ours = solve_lp(c, A, b)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
        want = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
        if ours.status != want:
            mismatches += 1
        elif want == "optimal" and not np.isclose(ours.value, -ref.fun, atol=1e-7):
            mismatches += 1
    assert mismatches == 0
