"""Dense two-phase simplex for the small LPs of degree-distribution design.

Problems have at most a few dozen variables and a few hundred constraints,
so a full tableau with Bland's anti-cycling rule is adequate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import Infeasible, NumericalFailure, Unbounded

TOL = 1e-9


@dataclass
class LpResult:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(T: np.ndarray, row: int, col: int):
    T[row] /= T[row, col]
    others = np.arange(T.shape[0]) != row
    T[others] -= np.outer(T[others, col], T[row])


def _run(T: np.ndarray, basis: list[int], n_cols: int, max_iter: int) -> int:
    """Maximise the objective held (negated) in the last row of T over columns < n_cols."""
    it = 0
    while True:
        reduced = -T[-1, :n_cols]
        entering = np.flatnonzero(reduced > TOL)
        if len(entering) == 0:
            return it
        col = int(entering[0])
        column = T[:-1, col]
        rows = np.flatnonzero(column > TOL)
        if len(rows) == 0:
            raise Unbounded("objective is unbounded above")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise NumericalFailure("simplex did not terminate")


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, max_iter: int = 50000) -> LpResult:
    """Maximise c @ x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    m_ub, m_eq = len(b_ub), len(b_eq)
    m = m_ub + m_eq

    # columns: x | slacks | artificials | rhs
    A = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    slack = np.vstack([np.eye(m_ub), np.zeros((m_eq, m_ub))])
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    slack = slack * sign[:, None]
    b = b * sign
    needs_art = [i for i in range(m) if not (i < m_ub and sign[i] > 0)]
    art = np.zeros((m, len(needs_art)))
    for k, i in enumerate(needs_art):
        art[i, k] = 1.0
    n_art = len(needs_art)
    T = np.zeros((m + 1, n + m_ub + n_art + 1))
    T[:m, :n] = A
    T[:m, n:n + m_ub] = slack
    T[:m, n + m_ub:n + m_ub + n_art] = art
    T[:m, -1] = b
    basis = [0] * m
    for i in range(m):
        basis[i] = n + i if (i < m_ub and sign[i] > 0) else n + m_ub + needs_art.index(i)
    iterations = 0

    if n_art:
        # phase 1: maximise -sum(artificials)
        T[-1, n + m_ub:n + m_ub + n_art] = 1.0
        for i in needs_art:
            T[-1] -= T[i]
        iterations += _run(T, basis, n + m_ub + n_art, max_iter)
        if T[-1, -1] < -1e-7 * max(1.0, np.abs(b).max()):
            raise Infeasible("constraints admit no non-negative solution")
        # drive remaining artificials out of the basis
        for r, var in enumerate(basis):
            if var >= n + m_ub:
                cols = np.flatnonzero(np.abs(T[r, :n + m_ub]) > TOL)
                if len(cols):
                    _pivot(T, r, int(cols[0]))
                    basis[r] = int(cols[0])
        keep = [r for r, var in enumerate(basis) if var < n + m_ub]
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[r] for r in keep]
        T = np.delete(T, np.s_[n + m_ub:n + m_ub + n_art], axis=1)

    # phase 2
    T[-1] = 0.0
    T[-1, :n] = -c
    for r, var in enumerate(basis):
        if abs(T[-1, var]) > 0:
            T[-1] -= T[-1, var] * T[r]
    iterations += _run(T, basis, n + m_ub, max_iter)
    x = np.zeros(n + m_ub)
    for r, var in enumerate(basis):
        x[var] = T[r, -1]
    x = np.maximum(x[:n], 0.0)
    return LpResult(x, float(c @ x), iterations)
