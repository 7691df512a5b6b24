import pytest
from hypothesis import given, settings, strategies as st

from qpec.errors import DivisionByZero, NotPrimePower
from qpec.gf import factorize, make_field, smallest_prime_factor

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 64]


@pytest.mark.parametrize("q", [q for q in ORDERS if q <= 16])
def test_field_axioms_exhaustive_small(q):
    f = make_field(q)
    for a in f.elements():
        assert f.add(a, 0) == a
        assert f.mul(a, 1) == a
        assert f.add(a, f.neg(a)) == 0
        if a:
            assert f.mul(a, f.inv(a)) == 1
        for b in f.elements():
            assert f.add(a, b) == f.add(b, a)
            assert f.mul(a, b) == f.mul(b, a)
            for c in f.elements():
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(ORDERS), st.data())
def test_field_axioms_random(q, data):
    f = make_field(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
    assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
    assert f.mul(f.add(a, b), c) == f.add(f.mul(a, c), f.mul(b, c))
    assert f.sub(f.add(a, b), b) == a


@pytest.mark.parametrize("q", ORDERS)
def test_characteristic(q):
    f = make_field(q)
    for x in f.elements():
        acc = 0
        for _ in range(f.p):
            acc = f.add(acc, x)
        assert acc == 0


@pytest.mark.parametrize("q", ORDERS)
def test_alpha_is_primitive(q):
    f = make_field(q)
    powers = {f.alpha_power(j) for j in range(q - 1)}
    assert powers == set(range(1, q))
    for a in f.nonzero():
        assert f.alpha_power(f.log_alpha(a)) == a


def test_gf4_tables():
    f = make_field(4)
    # x^2 + x + 1: a^2 = a + 1, encoded a=2, a+1=3
    assert f.reduction_polynomial == (1, 1, 1)
    assert f.mul(2, 2) == 3
    assert f.add(2, 3) == 1


def test_not_prime_power():
    with pytest.raises(NotPrimePower):
        make_field(6)
    with pytest.raises(NotPrimePower):
        make_field(12)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        make_field(5).inv(0)


def test_factorize():
    assert factorize(72) == {2: 3, 3: 2}
    assert smallest_prime_factor(9) == 3
    assert smallest_prime_factor(16) == 2


def test_field_cache_shared():
    assert make_field(8) is make_field(8)
