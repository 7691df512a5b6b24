"""Density evolution over message-set cardinalities.

The check side sums over multisets of incoming VTC cardinalities (weighted by
their multinomial counts) with a P_m model.  The variable side uses that
intersecting with a uniform random set of given size keeps the result uniform
given its size, so the intersection of the channel set with i - 1 CTV sets
is a Markov chain on cardinalities with hypergeometric steps.  That chain is
identical to summing Q_m over multisets; :func:`variable_update_qm` is the
literal form kept for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import comb

import numpy as np

from ..channel import QpecParams
from ..errors import ValidationError
from ..ldpc import DegreeDistribution
from .combinatorics import multiset_weights, multisets, q_m
from .pm_models import model_name, p_m

DEFAULT_MAX_L = 2000


@lru_cache(maxsize=None)
def hypergeometric_steps(q: int) -> np.ndarray:
    """H[a-1, b-1, c-1]: P(|A n B| = c) for |A| = a, |B| = b, both containing 0."""
    H = np.zeros((q, q, q))
    for a in range(1, q + 1):
        for b in range(1, q + 1):
            denom = comb(q - 1, b - 1)
            for c in range(1, min(a, b) + 1):
                H[a - 1, b - 1, c - 1] = comb(a - 1, c - 1) * comb(q - a, b - c) / denom
    H.flags.writeable = False
    return H


@lru_cache(maxsize=None)
def check_tables(model: str, q: int, M: int, size: int) -> np.ndarray:
    """P_m for every multiset of ``size`` VTC cardinalities from 1..M, shape (n_multisets, q)."""
    _, _, tuples = multisets(size, M)
    out = np.array([p_m(model, t, q) for t in tuples])
    out.flags.writeable = False
    return out


def check_update(Z: np.ndarray, dd: DegreeDistribution, model: str, q: int, M: int) -> np.ndarray:
    """CTV cardinality distribution W from the VTC distribution Z (supported on 1..M)."""
    W = np.zeros(q)
    zm = np.asarray(Z[:M], dtype=float)
    for i, r in dd.rho_coeffs.items():
        weights = multiset_weights(zm, i - 1)
        W += r * (weights @ check_tables(model, q, M, i - 1))
    return W / W.sum()


def variable_update(W: np.ndarray, dd: DegreeDistribution, q: int, M: int, eps: float) -> np.ndarray:
    T = np.einsum("b,abc->ac", W, hypergeometric_steps(q))
    Z = np.zeros(q)
    state = np.zeros(q)
    state[M - 1] = 1.0
    for i in range(2, dd.dv + 1):
        state = state @ T
        Z += dd.lambda_coeffs.get(i, 0.0) * state
    Z *= eps
    Z[0] += 1 - eps
    return Z / Z.sum()


def variable_update_qm(W: np.ndarray, dd: DegreeDistribution, q: int, M: int, eps: float) -> np.ndarray:
    """Same as :func:`variable_update`, summing Q_m over CTV cardinality multisets."""
    Z = np.zeros(q)
    for i, lam in dd.lambda_coeffs.items():
        weights = multiset_weights(W, i - 1)
        _, _, tuples = multisets(i - 1, q)
        Q = np.array([q_m(t, M, q) for t in tuples])
        Z += lam * (weights @ Q)
    Z *= eps
    Z[0] += 1 - eps
    return Z


@dataclass
class CardinalityTrace:
    q: int
    M: int
    model: str
    W: list[np.ndarray] = dc_field(default_factory=list)
    Z: list[np.ndarray] = dc_field(default_factory=list)
    p_e: list[float] = dc_field(default_factory=list)
    stop_reason: str = "max_l"
    monotone_violations: list[int] = dc_field(default_factory=list)

    @property
    def final_p_e(self) -> float:
        return self.p_e[-1]


def cardinality_de_run(dd: DegreeDistribution, params: QpecParams, model: str,
                       max_l: int = DEFAULT_MAX_L, p_target: float = 0.0,
                       stagnation: float = 1e-14, patience: int = 10) -> CardinalityTrace:
    """Iterate the cardinality DE.

    Entry 0 holds the channel initialisation Z_1 = 1 - eps, Z_M = eps.  Stops at
    ``max_l`` iterations, once p_e < ``p_target`` (reason "target"), or when
    p_e moved less than ``stagnation`` for ``patience`` iterations
    ("stagnation").  Iterations where p_e increased are listed in
    ``monotone_violations``.
    """
    model = model_name(model)
    if max_l < 0:
        raise ValidationError("max_l must be non-negative")
    q, M, eps = params.q, params.M, params.epsilon
    Z = np.zeros(q)
    Z[0] = 1 - eps
    Z[M - 1] += eps
    trace = CardinalityTrace(q, M, model)
    trace.W.append(np.zeros(q))
    trace.Z.append(Z)
    trace.p_e.append(1.0 - Z[0])
    if trace.p_e[0] < p_target:
        trace.stop_reason = "target"
        return trace
    still = 0
    for l in range(1, max_l + 1):
        W = check_update(Z, dd, model, q, M)
        Z = variable_update(W, dd, q, M, eps)
        p_e = max(0.0, 1.0 - Z[0])
        prev = trace.p_e[-1]
        if p_e > prev + 1e-12:
            trace.monotone_violations.append(l)
        still = still + 1 if abs(p_e - prev) < stagnation else 0
        trace.W.append(W)
        trace.Z.append(Z)
        trace.p_e.append(p_e)
        if p_e < p_target:
            trace.stop_reason = "target"
            break
        if still >= patience:
            trace.stop_reason = "stagnation"
            break
    return trace
