from fractions import Fraction
from itertools import combinations, product
from math import comb, prod

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qpec.density_evolution.combinatorics import (
    k_intersections,
    k_vector,
    multiset_weights,
    multisets,
    q_m,
    sumset_bounds,
)
from qpec.errors import ValidationError


def _k_brute(cards, q):
    counts = [0] * (min(cards) + 1)
    families = [list(combinations(range(q), c)) for c in cards]
    for sets in product(*families):
        inter = set(range(q))
        for s in sets:
            inter &= set(s)
        counts[len(inter)] += 1
    return counts


def test_k_examples():
    assert k_intersections([1, 1, 1], 3, 1) == 3
    assert k_intersections([1, 1, 1], 3, 0) == 24
    assert k_vector([3], 5) == [0, 0, 0, comb(5, 3)]


@pytest.mark.parametrize("cards,q", [((2, 2), 4), ((2, 3, 3), 5), ((1, 2, 4), 5), ((3, 3, 3, 4), 6), ((2, 2, 2, 2), 4)])
def test_k_brute_force(cards, q):
    assert k_vector(cards, q) == _k_brute(cards, q)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 30), st.data())
def test_k_total_count(q, data):
    cards = data.draw(st.lists(st.integers(1, q), min_size=1, max_size=5))
    assert sum(k_vector(cards, q)) == prod(comb(q, c) for c in cards)


def test_q_m_examples():
    assert q_m([2, 2], 2, 4, exact=True)[:2] == [Fraction(8, 9), Fraction(1, 9)]
    assert q_m([4], 2, 4, exact=True)[1] == 1
    assert q_m([1, 3], 3, 5, exact=True)[0] == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 40), st.data())
def test_q_m_is_distribution(q, data):
    M = data.draw(st.integers(1, q))
    cards = data.draw(st.lists(st.integers(1, q), min_size=1, max_size=4))
    v = q_m(cards, M, q)
    assert v.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(v >= 0)
    assert np.all(v[min(cards + [M]):] == 0)


def test_sumset_bounds_examples():
    assert sumset_bounds([2, 2], 5) == (3, 4, False)
    assert sumset_bounds([2, 2], 4)[:2] == (2, 4)
    assert sumset_bounds([3, 3], 4)[2] is True
    assert sumset_bounds([1, 1, 1], 8) == (1, 1, False)


def test_multisets():
    counts, mult, tuples = multisets(3, 2)
    assert tuples == ((1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 2, 2))
    assert mult.tolist() == [1, 3, 3, 1]
    assert counts.sum(axis=1).tolist() == [3, 3, 3, 3]
    w = multiset_weights(np.array([0.25, 0.75]), 3)
    assert w.sum() == pytest.approx(1.0)
    assert w[1] == pytest.approx(3 * 0.25**2 * 0.75)


def test_validation():
    with pytest.raises(ValidationError):
        q_m([0], 2, 4)
    with pytest.raises(ValidationError):
        k_intersections([2, 3], 5, 3)
