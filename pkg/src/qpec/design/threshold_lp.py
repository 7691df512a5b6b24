"""Rate-maximising LPs for lambda and the outer loop that hits a target threshold."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field as dc_field

import numpy as np

from ..errors import BracketFailure, Infeasible, ValidationError
from ..ldpc import DegreeDistribution, design_rate
from ..density_evolution.threshold import threshold
from .curves import full_set_probability
from .simplex import linprog_max

log = logging.getLogger(__name__)

GRID_N = 200
CHECK_FACTOR = 10
SLACK_TOL = 1e-9


@dataclass
class LpDesign:
    dd: DegreeDistribution
    rate: float
    epsilon: float
    cuts: int = 0


def _inner(mode: str, rho_dd: DegreeDistribution, x: np.ndarray) -> np.ndarray:
    if mode == "qpec_star":
        return full_set_probability(rho_dd, x)
    return 1.0 - rho_dd.rho(1.0 - x)


def _rows(mode, rho_dd, eps, degrees, x):
    y = _inner(mode, rho_dd, x)
    return eps * y[:, None] ** (np.array(degrees)[None, :] - 1)


def _solve(mode: str, rho: dict[int, float], eps: float, d_v: int, grid_n: int) -> LpDesign:
    if grid_n < 50:
        raise ValidationError("grid_n must be at least 50")
    if not 0.0 <= eps < 1.0:
        raise ValidationError("epsilon must lie in [0, 1)")
    if d_v < 2:
        raise ValidationError("d_v must be at least 2")
    rho_dd = DegreeDistribution({2: 1.0}, rho)
    degrees = list(range(2, d_v + 1))
    grid = np.arange(1, grid_n + 1) / grid_n
    fine = np.arange(1, CHECK_FACTOR * grid_n + 1) / (CHECK_FACTOR * grid_n)
    c = np.array([1.0 / i for i in degrees])
    points = grid
    cuts = 0
    while True:
        A = _rows(mode, rho_dd, eps, degrees, points)
        b = points.copy()
        if mode == "bec":
            # x -> 0 limit of the same constraint: eps * lambda_2 * rho'(1) <= 1
            stab = np.zeros(len(degrees))
            stab[0] = eps * rho_dd.rho_prime(1.0)
            A = np.vstack([A, stab])
            b = np.append(b, 1.0)
        try:
            res = linprog_max(c, A, b, np.ones((1, len(degrees))), [1.0])
        except Infeasible:
            slack = b[: len(points)] - A[: len(points)].min(axis=1)
            raise Infeasible(f"no lambda with d_v={d_v} satisfies the constraint at eps={eps:.6f}",
                             binding_point=float(points[int(np.argmin(slack))])) from None
        lam = res.x / res.x.sum()
        viol = _rows(mode, rho_dd, eps, degrees, fine) @ lam - fine
        bad = viol > SLACK_TOL
        if not bad.any():
            break
        # cutting plane: add the violated fine-grid points and re-solve
        cuts += 1
        points = np.union1d(points, fine[bad])
        if cuts > 50:
            raise Infeasible("fine-grid verification keeps failing",
                             binding_point=float(fine[int(np.argmax(viol))]))
    coeffs = {i: float(v) for i, v in zip(degrees, lam) if v > 1e-12}
    dd = DegreeDistribution(coeffs, rho)
    return LpDesign(dd, design_rate(dd), eps, cuts)


def qpec_star_lp(rho: dict[int, float], epsilon_star: float, d_v: int, grid_n: int = GRID_N) -> LpDesign:
    """Max-rate lambda with h_{eps*}(x) <= x on the grid.

    Violations found on a 10x finer grid are added as constraints and the LP is re-solved.
    """
    return _solve("qpec_star", rho, epsilon_star, d_v, grid_n)


def bec_lp(rho: dict[int, float], epsilon_th: float, d_v: int, grid_n: int = GRID_N) -> LpDesign:
    """Max-rate lambda with f_eps(x) <= x, the classical erasure-channel LP."""
    return _solve("bec", rho, epsilon_th, d_v, grid_n)


@dataclass
class DesignResult:
    dd: DegreeDistribution
    parameter: float
    achieved: float
    rate: float
    trajectory: list[tuple[float, float]] = dc_field(default_factory=list)

    def log_lines(self) -> list[str]:
        return [json.dumps({"step": k, "parameter": p, "achieved": a})
                for k, (p, a) in enumerate(self.trajectory)]


def design_iterate(target: float, rho: dict[int, float], d_v: int, q: int, M: int,
                   model: str = "union", mode: str = "qpec_star", tol: float = 0.002,
                   threshold_tol: float = 2e-4, start: tuple[float, float] | None = None,
                   max_steps: int = 30, grid_n: int = GRID_N) -> DesignResult:
    """Adjust the LP parameter (eps* or the BEC threshold) until the
    cardinality-DE threshold of the designed ensemble is within ``tol`` of ``target``.

    Uses secant steps, switching to the Illinois variant of false position
    once the target is bracketed.
    """
    if mode not in ("qpec_star", "bec"):
        raise ValidationError("mode must be 'qpec_star' or 'bec'")
    solve = qpec_star_lp if mode == "qpec_star" else bec_lp
    if start is None:
        start = (target + 0.10, target + 0.13) if mode == "qpec_star" else (target - 0.22, target - 0.19)
    trajectory: list[tuple[float, float]] = []
    designs: dict[float, LpDesign] = {}

    def measure(p: float) -> float:
        p = float(np.clip(p, 1e-4, 0.999))
        design = solve(rho, p, d_v, grid_n)
        achieved = threshold(design.dd, q, M, model, threshold_tol).value
        trajectory.append((p, achieved))
        designs[p] = design
        log.info("design %s: parameter=%.5f achieved=%.5f rate=%.4f", mode, p, achieved, design.rate)
        return achieved

    def finish(p: float, a: float) -> DesignResult:
        d = designs[p]
        return DesignResult(d.dd, p, a, d.rate, trajectory)

    p0, p1 = start
    f0 = measure(p0) - target
    if abs(f0) < tol:
        return finish(trajectory[-1][0], f0 + target)
    f1 = measure(p1) - target
    if abs(f1) < tol:
        return finish(trajectory[-1][0], f1 + target)
    p0, p1 = trajectory[0][0], trajectory[1][0]
    bracket = None
    if f0 * f1 < 0:
        bracket = [(p0, f0), (p1, f1)]
    side = 0
    for _ in range(max_steps):
        if bracket is None:
            if f1 == f0:
                raise BracketFailure("achieved threshold does not respond to the LP parameter")
            p2 = p1 - f1 * (p1 - p0) / (f1 - f0)
            p2 = float(np.clip(p2, p1 - 0.1, p1 + 0.1))
        else:
            (pa, fa), (pb, fb) = bracket
            p2 = pb - fb * (pb - pa) / (fb - fa)
        f2 = measure(p2) - target
        p2 = trajectory[-1][0]
        if abs(f2) < tol:
            return finish(p2, f2 + target)
        if bracket is None:
            if f2 * f1 < 0:
                bracket = [(p1, f1), (p2, f2)]
            p0, f0, p1, f1 = p1, f1, p2, f2
        else:
            (pa, fa), (pb, fb) = bracket
            if f2 * fb < 0:
                bracket = [(pb, fb), (p2, f2)]
                side = 0
            else:
                # Illinois: halve the retained endpoint's value when it repeats
                side += 1
                bracket = [(pa, fa / 2 if side >= 1 else fa), (p2, f2)]
    raise BracketFailure(f"design did not reach {target} within {max_steps} steps")
