"""Dense two-phase tableau simplex for small LPs: max c.x s.t. A x <= b, x >= 0.

Bland's rule keeps it cycle-free in exact arithmetic; the iteration cap guards
against floating-point stalling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from latdec.errors import CertificationInconclusive

PIVOT_TOL = 1e-10


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: np.ndarray | None = None
    value: float | None = None
    iterations: int = 0


def _pivot(T, basis, r, c):
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    basis[r] = c


def _run(T, basis, obj_row, allowed, max_iter, it0):
    """Minimize the objective row T[obj_row] over columns ``allowed``; return (status, iters)."""
    m = len(basis)
    it = it0
    while True:
        costs = T[obj_row, :-1]
        entering = next((j for j in allowed if costs[j] < -PIVOT_TOL), None)
        if entering is None:
            return "optimal", it
        col = T[:m, entering]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if len(rows) == 0:
            return "unbounded", it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        leave = min(ties, key=lambda r: basis[r])
        _pivot(T, basis, leave, entering)
        it += 1
        if it > max_iter:
            raise CertificationInconclusive(f"simplex exceeded {max_iter} iterations")


def solve_lp(c, A, b, max_iter=5000) -> LPResult:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    neg = b < 0
    n_art = int(neg.sum())
    # columns: x (n) | slack (m) | artificial (n_art) | rhs
    T = np.zeros((m + 2, n + m + n_art + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[:m][neg] *= -1
    basis = np.arange(n, n + m)
    for k, r in enumerate(np.flatnonzero(neg)):
        T[r, n + m + k] = 1.0
        basis[r] = n + m + k
    # row m: phase-2 objective (minimize -c.x); row m+1: phase-1 (sum of artificials)
    T[m, :n] = -c
    if n_art:
        T[m + 1] = -T[:m][neg].sum(axis=0)
        T[m + 1, n + m:n + m + n_art] = 0.0
        status, it = _run(T, basis, m + 1, range(n + m + n_art), max_iter, 0)
        if T[m + 1, -1] < -1e-9:
            return LPResult("infeasible", iterations=it)
        # drive remaining artificials out of the basis
        for r in range(m):
            if basis[r] >= n + m:
                nz = np.flatnonzero(np.abs(T[r, :n + m]) > PIVOT_TOL)
                if len(nz):
                    _pivot(T, basis, r, nz[0])
    else:
        it = 0
    status, it = _run(T, basis, m, range(n + m), max_iter, it)
    if status == "unbounded":
        return LPResult("unbounded", iterations=it)
    x = np.zeros(n + m + n_art)
    x[basis] = T[:m, -1]
    return LPResult("optimal", x[:n], float(c @ x[:n]), it)
