"""Scalar recursions behind threshold-oriented LP design.

``h_eps`` is the lower-bound recursion for the probability of a full-size
VTC message when M > q/2; ``f_eps`` is the usual BEC recursion.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import ValidationError
from ..ldpc import DegreeDistribution


def _check_unit(name, v):
    a = np.asarray(v, dtype=float)
    if np.any(a < 0) or np.any(a > 1):
        raise ValidationError(f"{name} must lie in [0, 1]")
    return a


def g_fn(dd: DegreeDistribution, x):
    """g(x) = rho(1-x) + x rho'(1-x)."""
    x = np.asarray(x, dtype=float)
    return dd.rho(1 - x) + x * dd.rho_prime(1 - x)


def full_set_probability(dd: DegreeDistribution, x):
    """1 - g(x), the chance that at least two of a check's other inputs are full."""
    # clipped: g(x) can exceed 1 by rounding near x = 0
    return np.clip(1.0 - g_fn(dd, x), 0.0, 1.0)


def h_eps(dd: DegreeDistribution, epsilon, x):
    _check_unit("epsilon", epsilon)
    _check_unit("x", x)
    return epsilon * dd.lam(full_set_probability(dd, x))


def f_eps(dd: DegreeDistribution, epsilon, x):
    _check_unit("epsilon", epsilon)
    _check_unit("x", x)
    return epsilon * dd.lam(1 - dd.rho(1 - np.asarray(x, dtype=float)))


def _max_gap(curve, dd, eps, grid):
    """max over x in (0, 1) of curve(x) - x, refined around the best grid point."""
    vals = curve(dd, eps, grid) - grid
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda x: -(curve(dd, eps, x) - x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return max(vals[k], -res.fun)


def _fixed_point_free(curve, dd, eps, grid) -> bool:
    # below 1 only: at x = 1, curve = eps which equals 1 only at eps = 1
    return _max_gap(curve, dd, eps, grid) < 0.0


def _sup_eps(curve, dd, tol, grid_n):
    if tol < 1e-5:
        raise ValidationError("tol must be at least 1e-5")
    grid = np.linspace(0.0, 1.0, grid_n + 1)[1:-1]
    lo, hi = 0.0, 1.0
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if _fixed_point_free(curve, dd, mid, grid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def epsilon_star(dd: DegreeDistribution, tol: float = 1e-5, grid_n: int = 10000) -> float:
    """Largest eps for which x = h_eps(x) has no solution in (0, 1)."""
    return _sup_eps(h_eps, dd, tol, grid_n)


def bec_threshold(dd: DegreeDistribution, tol: float = 1e-5, grid_n: int = 10000) -> float:
    """Largest eps for which x = f_eps(x) has no solution in (0, 1)."""
    return _sup_eps(f_eps, dd, tol, grid_n)


def iterate_limit(curve, dd: DegreeDistribution, eps: float, iterations: int = 10000) -> float:
    """curve^l(eps) after ``iterations`` compositions."""
    x = eps
    for _ in range(iterations):
        x = float(curve(dd, eps, x))
    return x
