"""Perturbation LP that shortens the union-model DE horizon to a target p_e."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field

import numpy as np

from ..channel import QpecParams
from ..errors import NoHorizon, ValidationError
from ..gf import make_field
from ..ldpc import DegreeDistribution, design_rate
from ..density_evolution.cardinality import cardinality_de_run, variable_update
from .simplex import linprog_max

log = logging.getLogger(__name__)

DEFAULT_DELTA = 0.05
DEFAULT_P_TAR = 1e-6
DEFAULT_D_V = 10


@dataclass
class Horizon:
    L: int
    p_e: np.ndarray           # p_e^(0..L)
    A: np.ndarray             # A[l-1, i-2] for l = 1..L, i = 2..d_v
    degrees: list[int]


def horizon(dd: DegreeDistribution, q: int, M: int, eps: float, p_tar: float = DEFAULT_P_TAR,
            d_v: int = DEFAULT_D_V, model: str = "union", max_l: int = 2000) -> Horizon:
    """Union-model DE trajectory up to the first L with p_e^(L) <= p_tar, plus A_{l,i}."""
    params = QpecParams(make_field(q), M, eps)
    trace = cardinality_de_run(dd, params, model, max_l, p_target=p_tar)
    p_e = np.array(trace.p_e)
    hits = np.flatnonzero(p_e <= p_tar)
    if len(hits) == 0 or hits[0] == 0:
        raise NoHorizon(f"p_e does not reach {p_tar} within {max_l} iterations at eps={eps}")
    L = int(hits[0])
    degrees = list(range(2, max(d_v, dd.dv) + 1))
    A = np.zeros((L, len(degrees)))
    for l in range(1, L + 1):
        W = trace.W[l]
        for k, i in enumerate(degrees):
            Z = variable_update(W, DegreeDistribution({i: 1.0}, dd.rho_coeffs), q, M, eps)
            A[l - 1, k] = 1.0 - Z[0]
    return Horizon(L, p_e[: L + 1], A, degrees)


@dataclass
class UnionStep:
    dd: DegreeDistribution
    G: float
    L_before: int
    predicted_p_e: np.ndarray


def union_lp_step(dd: DegreeDistribution, q: int, M: int, eps: float, p_tar: float = DEFAULT_P_TAR,
                  delta: float = DEFAULT_DELTA, d_v: int = DEFAULT_D_V, keep_rate: bool = True,
                  model: str = "union", hz: Horizon | None = None) -> UnionStep:
    """One LP step: the lambda minimising the linearised iteration count G.

    Constraints per iteration l <= L: the predicted p_e^(l) may not exceed
    p_e^(l-1), and may move by at most ``delta`` times the one-step progress.
    ``keep_rate`` adds sum(lambda_i / i) = const so the design rate is preserved.
    """
    if not 0 < delta < 1:
        raise ValidationError("delta must lie in (0, 1)")
    hz = hz or horizon(dd, q, M, eps, p_tar, d_v, model)
    p = hz.p_e
    progress = np.maximum(p[:-1] - p[1:], 1e-300)
    A = hz.A
    cost = (A / progress[:, None]).sum(axis=0)
    c = -cost
    A_ub = np.vstack([A, A, -A])
    b_ub = np.concatenate([p[:-1], p[1:] + delta * progress, -(p[1:] - delta * progress)])
    A_eq = [np.ones(len(hz.degrees))]
    b_eq = [1.0]
    if keep_rate:
        inv = np.array([1.0 / i for i in hz.degrees])
        A_eq.append(inv)
        b_eq.append(sum(v / i for i, v in dd.lambda_coeffs.items()))
    res = linprog_max(c, A_ub, b_ub, np.array(A_eq), b_eq)
    lam = res.x / res.x.sum()
    coeffs = {i: float(v) for i, v in zip(hz.degrees, lam) if v > 1e-12}
    G = float(cost @ lam - (p[1:] / progress).sum())
    return UnionStep(DegreeDistribution(coeffs, dd.rho_coeffs), G, hz.L, A @ lam)


@dataclass
class UnionDesign:
    dd: DegreeDistribution
    rounds: int
    horizons: list[int] = dc_field(default_factory=list)
    rates: list[float] = dc_field(default_factory=list)
    disagreements: list[float] = dc_field(default_factory=list)


def _l1(a: DegreeDistribution, b: DegreeDistribution) -> float:
    keys = set(a.lambda_coeffs) | set(b.lambda_coeffs)
    return sum(abs(a.lambda_coeffs.get(k, 0.0) - b.lambda_coeffs.get(k, 0.0)) for k in keys)


def prediction_gap(step: UnionStep, measured: Horizon) -> float:
    """Largest relative gap between the linearised and re-measured p_e over common iterations."""
    k = min(len(step.predicted_p_e), len(measured.p_e) - 1)
    pred = step.predicted_p_e[:k]
    true = measured.p_e[1:k + 1]
    return float(np.max(np.abs(pred - true) / np.maximum(true, 1e-300))) if k else 0.0


def union_lp_design(dd: DegreeDistribution, q: int, M: int, eps: float, p_tar: float = DEFAULT_P_TAR,
                    delta: float = DEFAULT_DELTA, max_rounds: int = 50, d_v: int = DEFAULT_D_V,
                    keep_rate: bool = True, model: str = "union") -> UnionDesign:
    """Repeat :func:`union_lp_step` until lambda moves by less than 1e-4 in L1.

    A step whose true horizon (re-measured by DE) is longer than before is
    rejected and retried with half the trust radius ``delta``.
    """
    hz = horizon(dd, q, M, eps, p_tar, d_v, model)
    out = UnionDesign(dd, 0, [hz.L], [design_rate(dd)])
    for r in range(1, max_rounds + 1):
        step_delta = delta
        while True:
            step = union_lp_step(dd, q, M, eps, p_tar, step_delta, d_v, keep_rate, model, hz)
            try:
                new_hz = horizon(step.dd, q, M, eps, p_tar, d_v, model)
            except NoHorizon:
                new_hz = None
            if new_hz is not None and new_hz.L <= hz.L:
                break
            step_delta /= 2
            if step_delta < 1e-6:
                log.info("union LP: no improving step at round %d", r)
                return out
        moved = _l1(step.dd, dd)
        gap = prediction_gap(step, new_hz)
        out.disagreements.append(gap)
        if gap > 0.1:
            log.info("union LP round %d: linearised p_e off by %.0f%% from DE", r, 100 * gap)
        dd, hz = step.dd, new_hz
        out.dd, out.rounds = dd, r
        out.horizons.append(hz.L)
        out.rates.append(design_rate(dd))
        log.info("union LP round %d: L=%d rate=%.4f moved=%.2e", r, hz.L, out.rates[-1], moved)
        if moved < 1e-4:
            break
    return out
