from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from qpec.errors import EmptySet, ZeroScalar
from qpec.gf import make_field
from qpec.symbol_sets import (
    SymbolSet,
    index_arrays,
    index_of,
    mask_from_index,
    mask_index,
    mask_scale,
    mask_sumset,
    members,
    popcount,
    render,
    scale,
    set_of,
    sumset,
    sumset_table,
)


def test_gf4_indices():
    assert mask_from_index(4, 1) == 0b0001
    assert members(mask_from_index(4, 5)) == [0, 1]
    assert members(mask_from_index(4, 6)) == [0, 2]
    assert mask_from_index(4, 15) == 0b1111


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8])
def test_index_ordering(q):
    sizes = [popcount(mask_from_index(q, t)) for t in range(1, 1 << q)]
    assert sizes == sorted(sizes)
    start = 1
    for k in range(1, q + 1):
        block = [tuple(members(mask_from_index(q, t))) for t in range(start, start + comb(q, k))]
        assert block == sorted(block)
        start += comb(q, k)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 40), st.data())
def test_index_round_trip(q, data):
    t = data.draw(st.integers(1, (1 << q) - 1))
    assert mask_index(q, mask_from_index(q, t)) == t


def test_index_arrays_consistent():
    by_index, by_mask = index_arrays(5)
    for t in range(1, 32):
        assert by_mask[by_index[t]] == t


def test_empty_set_has_no_index():
    with pytest.raises(EmptySet):
        index_of(SymbolSet(0, make_field(4)))


def test_zero_scalar_rejected():
    f = make_field(4)
    with pytest.raises(ZeroScalar):
        scale(SymbolSet.of(f, [0, 1]), 0)


def test_render():
    f = make_field(4)
    assert render(SymbolSet.of(f, [0, 1, 2])) == "{0,a^0,a^1}"


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 4, 5, 7, 8, 9]), st.data())
def test_sumset_properties(q, data):
    f = make_field(q)
    a = data.draw(st.integers(1, (1 << q) - 1))
    b = data.draw(st.integers(1, (1 << q) - 1))
    h = data.draw(st.integers(1, q - 1))
    s = mask_sumset(f, a, b)
    assert s == mask_sumset(f, b, a)
    assert popcount(s) >= max(popcount(a), popcount(b))
    # scaling distributes over sumsets
    assert mask_scale(f, s, h) == mask_sumset(f, mask_scale(f, a, h), mask_scale(f, b, h))
    assert popcount(mask_scale(f, a, h)) == popcount(a)


def test_sumset_table_matches_direct():
    f = make_field(4)
    table = sumset_table(4)
    for a in range(1, 16):
        for b in range(1, 16):
            assert table[a, b] == mask_sumset(f, a, b)


def test_set_wrappers():
    f = make_field(4)
    a = set_of(f, 5)
    assert index_of(a) == 5
    assert (a + a).members == [0, 1]  # characteristic 2
    assert (a & set_of(f, 6)).members == [0]
    assert index_of(sumset(a, set_of(f, 6))) == 15
