"""Closed-form counts for set intersections and sumset cardinality bounds."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial, prod

import numpy as np

from ..errors import ValidationError
from ..gf import smallest_prime_factor


def _cards(cards) -> tuple[int, ...]:
    out = tuple(sorted(int(c) for c in cards))
    if not out:
        raise ValidationError("at least one cardinality is required")
    return out


def k_intersections(cards, q: int, m: int) -> int:
    """Number of realizations of sets with sizes ``cards`` whose intersection has exactly m elements.

    Inclusion-exclusion over the elements forced into the intersection.
    """
    cards = _cards(cards)
    mu = cards[0]
    if not 0 <= m <= mu:
        raise ValidationError(f"m must lie in [0, {mu}], got {m}")
    return _k(cards, q, m)


@lru_cache(maxsize=None)
def _k(cards: tuple[int, ...], q: int, m: int) -> int:
    mu = cards[0]
    total = 0
    for s in range(mu - m + 1):
        j = m + s
        upsilon = comb(q, j) * prod(comb(q - j, c - j) for c in cards)
        total += (-1) ** s * upsilon * comb(j, m)
    return total


def k_vector(cards, q: int) -> list[int]:
    """[K_0, ..., K_mu]."""
    cards = _cards(cards)
    return [_k(cards, q, m) for m in range(cards[0] + 1)]


@lru_cache(maxsize=None)
def _q_m_exact(cards: tuple[int, ...], M: int, q: int) -> tuple[Fraction, ...]:
    full = tuple(sorted(cards + (M,)))
    out = [Fraction(0)] * q
    if full[0] == 1:
        out[0] = Fraction(1)
        return tuple(out)
    reduced = tuple(c - 1 for c in full)
    denom = prod(comb(q - 1, c) for c in reduced)
    for m in range(1, full[0] + 1):
        out[m - 1] = Fraction(_k(reduced, q - 1, m - 1), denom)
    return tuple(out)


def q_m(cards, M: int, q: int, exact: bool = False):
    """Distribution of the VTC cardinality given incoming CTV cardinalities.

    All sets, including the channel set of size M, contain the transmitted
    symbol and are otherwise uniform.  Returns a length-q vector indexed by
    m - 1 (floats, or Fractions when ``exact``).
    """
    cards = tuple(int(c) for c in cards)
    if any(not 1 <= c <= q for c in cards):
        raise ValidationError(f"cardinalities must lie in [1, {q}]")
    if not 1 <= M <= q:
        raise ValidationError(f"M must lie in [1, {q}]")
    res = _q_m_exact(tuple(sorted(cards)), M, q)
    if exact:
        return list(res)
    return np.array([float(x) for x in res])


def sumset_bounds(cards, q: int) -> tuple[int, int, bool]:
    """(B_L, B_U, q_condition) for a sumset of sets with the given sizes."""
    cards = _cards(cards)
    if any(not 1 <= c <= q for c in cards):
        raise ValidationError(f"cardinalities must lie in [1, {q}]")
    p = smallest_prime_factor(q)
    d = len(cards)
    kappa = cards[-1]
    lower = max(kappa, min(p, sum(cards) - d + 1))
    upper = min(q, prod(cards))
    q_condition = d >= 2 and cards[-1] + cards[-2] > q
    return lower, upper, q_condition


# -- multiset enumeration shared by the DE recursions --

@lru_cache(maxsize=None)
def multisets(size: int, top: int) -> tuple[np.ndarray, np.ndarray, tuple[tuple[int, ...], ...]]:
    """All multisets of ``size`` values from 1..top.

    Returns (counts, multinomial, tuples): ``counts[k, c-1]`` is how often
    value c occurs in multiset k; ``multinomial[k]`` is the number of ordered
    lists that collapse to it.
    """
    tuples = tuple(combinations_with_replacement(range(1, top + 1), size))
    counts = np.zeros((len(tuples), top), dtype=np.int64)
    mult = np.empty(len(tuples))
    for k, t in enumerate(tuples):
        c = Counter(t)
        for v, n in c.items():
            counts[k, v - 1] = n
        mult[k] = factorial(size) // prod(factorial(n) for n in c.values())
    counts.flags.writeable = False
    mult.flags.writeable = False
    return counts, mult, tuples


def multiset_weights(probs: np.ndarray, size: int) -> np.ndarray:
    """Probability of each multiset when ``size`` values are drawn iid from ``probs``."""
    probs = np.asarray(probs, dtype=float)
    counts, mult, _ = multisets(size, len(probs))
    return mult * np.prod(probs[None, :] ** counts, axis=1)
