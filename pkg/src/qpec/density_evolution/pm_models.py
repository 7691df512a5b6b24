"""Check-node output cardinality models P_m.

Given the cardinalities of the incoming sets, each model returns a length-q
vector whose entry ``m - 1`` is the probability that the outgoing sumset has
m elements:

* ``max``: point mass at the upper bound B_U (yields a lower bound on the threshold);
* ``min``: point mass at the lower bound B_L (yields an upper bound on the threshold);
* ``balls``: occupancy of q bins after N single balls;
* ``union``: occupancy after N / kappa groups of kappa distinct balls;
* ``exact``: enumeration of uniform sets containing 0 (small q only).

All but ``exact`` put every mass on q when two incoming sizes exceed q together.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, prod

import numpy as np

from ..errors import ComplexityCapExceeded, SingularMatrix, ValidationError
from ..symbol_sets import popcount_table, sumset_table
from ..channel import super_symbol_masks
from .combinatorics import _cards, _k, sumset_bounds

MODELS = ("exact", "min", "max", "balls", "union")
ALIASES = {"lower_bound": "min", "upper_bound": "max"}
EXACT_MAX_Q = 5
EXACT_MAX_SUMS = 10**6
EULER_GAMMA = 0.5772156649015329


def model_name(model: str) -> str:
    name = ALIASES.get(model, model)
    if name not in MODELS:
        raise ValidationError(f"unknown P_m model {model!r}; choose from {', '.join(MODELS)}")
    return name


@lru_cache(maxsize=None)
def gamma_balls_exact(q: int) -> tuple[tuple[Fraction, ...], ...]:
    rows = []
    for m in range(q + 1):
        row = [Fraction(0)] * (q + 1)
        row[m] = Fraction(m, q)
        if m < q:
            row[m + 1] = 1 - Fraction(m, q)
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def gamma_union_exact(q: int, kappa: int) -> tuple[tuple[Fraction, ...], ...]:
    """Transition matrix of |A u B| for |A| = m and a uniform kappa-set B."""
    if not 1 <= kappa <= q:
        raise ValidationError(f"kappa must lie in [1, {q}]")
    rows = []
    for m in range(q + 1):
        row = [Fraction(0)] * (q + 1)
        denom = comb(q, m) * comb(q, kappa)
        lo_card, hi_card = sorted((m, kappa))
        for inter in range(max(0, m + kappa - q), lo_card + 1):
            row[m + kappa - inter] = Fraction(_k((lo_card, hi_card), q, inter), denom)
        rows.append(tuple(row))
    return tuple(rows)


@lru_cache(maxsize=None)
def gamma_balls(q: int) -> np.ndarray:
    out = np.array(gamma_balls_exact(q), dtype=float)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def gamma_union(q: int, kappa: int) -> np.ndarray:
    out = np.array(gamma_union_exact(q, kappa), dtype=float)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=4096)
def occupancy(q: int, kappa: int, steps: int) -> np.ndarray:
    """First row of Gamma_union(kappa)^steps (kappa = 1 is balls and bins)."""
    G = gamma_balls(q) if kappa == 1 else gamma_union(q, kappa)
    row = np.linalg.matrix_power(G, steps)[0].copy()
    row.flags.writeable = False
    return row


def expected_absorption(q: int, kappa: int) -> float:
    """Expected number of balls until all q bins are occupied, groups of kappa."""
    if not 1 <= kappa <= q:
        raise ValidationError(f"kappa must lie in [1, {q}]")
    G = gamma_balls(q) if kappa == 1 else gamma_union(q, kappa)
    Qm = G[:q, :q]
    A = np.eye(q) - Qm
    try:
        phi_one = np.linalg.solve(A, np.ones(q))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("I - Q is singular; the chain is not absorbing") from exc
    if not np.all(np.isfinite(phi_one)):
        raise SingularMatrix("fundamental matrix is not finite")
    return kappa * float(phi_one[0])


def absorption_approx(q: int) -> float:
    return q * np.log(q) + q * EULER_GAMMA


def _point(q: int, m: int) -> np.ndarray:
    out = np.zeros(q)
    out[m - 1] = 1.0
    return out


@lru_cache(maxsize=None)
def exact_sumset_counts(q: int, cards: tuple[int, ...]) -> tuple[int, ...]:
    """Counts, over uniform sets containing 0, of each sumset cardinality 1..q."""
    if q > EXACT_MAX_Q:
        raise ComplexityCapExceeded(f"exact P_m is limited to q <= {EXACT_MAX_Q}")
    if prod(cards) > EXACT_MAX_SUMS:
        raise ComplexityCapExceeded(f"exact P_m is limited to at most {EXACT_MAX_SUMS} sums")
    table = sumset_table(q)
    n = 1 << q
    dist = np.zeros(n, dtype=object)
    dist[1] = 1
    for c in cards:
        sets = super_symbol_masks(q, c, 0) if c > 1 else np.array([1])
        new = np.zeros(n, dtype=object)
        for a in np.flatnonzero(dist):
            for b in sets:
                new[table[a, b]] += dist[a]
        dist = new
    pc = popcount_table(q)
    out = [0] * q
    for mask in np.flatnonzero(dist):
        out[pc[mask] - 1] += int(dist[mask])
    return tuple(out)


def p_m_exact(cards, q: int) -> list[Fraction]:
    cards = _cards(cards)
    counts = exact_sumset_counts(q, cards)
    total = sum(counts)
    return [Fraction(c, total) for c in counts]


@lru_cache(maxsize=None)
def _p_m(model: str, cards: tuple[int, ...], q: int) -> np.ndarray:
    if model == "exact":
        out = np.array([float(x) for x in p_m_exact(cards, q)])
    else:
        lower, upper, qcond = sumset_bounds(cards, q)
        if qcond:
            out = _point(q, q)
        elif model == "max":
            out = _point(q, upper)
        elif model == "min":
            out = _point(q, lower)
        else:
            N = prod(cards)
            if model == "balls":
                g = occupancy(q, 1, N)
            else:
                kappa = cards[-1]
                g = occupancy(q, kappa, N // kappa)
            g = g[1:].copy()
            g[: lower - 1] = 0.0
            total = g.sum()
            if total <= 0:
                out = _point(q, lower)
            else:
                out = g / total
    out.flags.writeable = False
    return out


def p_m(model: str, cards, q: int) -> np.ndarray:
    """Cardinality distribution of the check-node sumset under ``model``."""
    cards = _cards(cards)
    if any(not 1 <= c <= q for c in cards):
        raise ValidationError(f"cardinalities must lie in [1, {q}]")
    return _p_m(model_name(model), cards, q)
