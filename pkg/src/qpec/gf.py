"""Arithmetic over GF(q) for prime and prime-power q.

Elements are plain integers in ``[0, q)``.  An element of GF(p^k) is the
polynomial ``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` over GF(p) and is encoded
as the base-p integer ``sum(c_i * p**i)``.  This integer order is the
canonical element order used everywhere else (subset indexing, rendering).

The reduction polynomial for each (p, k) is the monic irreducible polynomial
of degree k with the smallest base-p encoding (coefficient of x^k most
significant), and the designated primitive element ``alpha`` is the smallest
integer encoding that generates the multiplicative group.  Both choices are
fixed so that every run builds the same field.

    GF(4)  = GF(2)[x] / (x^2 + x + 1),     alpha = x      (encoding 2)
    GF(8)  = GF(2)[x] / (x^3 + x + 1),     alpha = x
    GF(9)  = GF(3)[x] / (x^2 + 1),         alpha = x + 1  (encoding 4)
    GF(16) = GF(2)[x] / (x^4 + x + 1),     alpha = x
"""

from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from .errors import DivisionByZero, NotPrimePower, ValidationError

MAX_ORDER = 1 << 16
# q x q lookup tables are built only up to this order.
TABLE_MAX_ORDER = 256


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValidationError(f"field order must be >= 2, got {q}")
    factors = factorize(q)
    if len(factors) != 1:
        raise NotPrimePower(f"{q} is not a prime power (factors {sorted(factors)})")
    ((p, k),) = factors.items()
    return p, k


# Polynomials over GF(p) are coefficient lists, lowest degree first.

def _poly_trim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv_lead % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _poly_trim(a[:dm] if dm > 0 else [0])


def _is_irreducible(f: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1 .. deg(f) // 2."""
    k = len(f) - 1
    for d in range(1, k // 2 + 1):
        for low in product(range(p), repeat=d):
            g = list(low) + [1]
            if _poly_mod(f, g, p) == [0]:
                return False
    return True


def _lowest_irreducible(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for code in range(p**k, 2 * p**k):
        coeffs = [(code // p**i) % p for i in range(k + 1)]
        if coeffs[0] == 0:
            continue  # divisible by x
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({p})")


class FieldSpec:
    """GF(q) with a fixed reduction polynomial and primitive element.

    Immutable after construction.  Use :func:`make_field` rather than the
    constructor so instances are shared.
    """

    def __init__(self, q: int):
        p, k = _prime_power(q)
        if q > MAX_ORDER:
            raise ValidationError(f"field order {q} exceeds supported maximum {MAX_ORDER}")
        self.q = q
        self.p = p
        self.k = k
        self.reduction_polynomial = _lowest_irreducible(p, k)
        if k > 1 and not _is_irreducible(list(self.reduction_polynomial), p):
            raise AssertionError("reduction polynomial is reducible")
        self.alpha = self._find_primitive()
        self._exp, self._log = self._build_log_tables()

    # -- construction helpers (slow path, used only while building tables) --

    def _digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def _from_digits(self, d) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(d))

    def _slow_mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if self.p == 2:
            poly = self._from_digits(self.reduction_polynomial)
            r = 0
            while b:
                if b & 1:
                    r ^= a
                b >>= 1
                a <<= 1
                if a >> self.k:
                    a ^= poly
            return r
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        return self._from_digits(_poly_mod(prod, list(self.reduction_polynomial), self.p))

    def _slow_pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    def _find_primitive(self) -> int:
        n = self.q - 1
        if n == 1:
            return 1
        primes = list(factorize(n))
        for g in range(2, self.q):
            if all(self._slow_pow(g, n // r) != 1 for r in primes):
                return g
        raise AssertionError("multiplicative group has no generator")

    def _build_log_tables(self):
        n = self.q - 1
        exp = np.zeros(n, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for j in range(n):
            if log[x] != -1:
                raise AssertionError("alpha is not primitive")
            exp[j] = x
            log[x] = j
            x = self._slow_mul(x, self.alpha)
        if x != 1:
            raise AssertionError("alpha^(q-1) != 1")
        return exp, log

    # -- element arithmetic --

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.k == 1:
            return (a + b) % self.p
        return self._from_digits((x + y) % self.p for x, y in zip(self._digits(a), self._digits(b)))

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.k == 1:
            return -a % self.p
        return self._from_digits(-x % self.p for x in self._digits(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("0 has no multiplicative inverse")
        return int(self._exp[-self._log[a] % (self.q - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, e: int) -> int:
        if a == 0:
            return 1 if e == 0 else 0
        return int(self._exp[(self._log[a] * e) % (self.q - 1)])

    def alpha_power(self, j: int) -> int:
        """alpha^j."""
        return int(self._exp[j % (self.q - 1)])

    def log_alpha(self, a: int) -> int:
        """Discrete logarithm j with alpha^j = a."""
        if a == 0:
            raise DivisionByZero("log of 0 is undefined")
        return int(self._log[a])

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    # -- lookup tables for vectorized code --

    def _require_tables(self):
        if self.q > TABLE_MAX_ORDER:
            raise ValidationError(f"lookup tables are only built for q <= {TABLE_MAX_ORDER}")

    @cached_property
    def add_table(self) -> np.ndarray:
        self._require_tables()
        t = np.array([[self.add(a, b) for b in range(self.q)] for a in range(self.q)], dtype=np.int64)
        t.flags.writeable = False
        return t

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._require_tables()
        t = np.array([[self.mul(a, b) for b in range(self.q)] for a in range(self.q)], dtype=np.int64)
        t.flags.writeable = False
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        t = np.array([self.neg(a) for a in range(self.q)], dtype=np.int64)
        t.flags.writeable = False
        return t

    @cached_property
    def inv_table(self) -> np.ndarray:
        """inv_table[a] = a^{-1}; entry 0 is 0 as a placeholder."""
        t = np.zeros(self.q, dtype=np.int64)
        for a in range(1, self.q):
            t[a] = self.inv(a)
        t.flags.writeable = False
        return t

    # -- identity --

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.k, self.reduction_polynomial) == (
            other.p,
            other.k,
            other.reduction_polynomial,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.reduction_polynomial))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.q})"
        terms = [
            (f"{c}*" if c != 1 else "") + ("x^%d" % i if i > 1 else "x" if i == 1 else "1")
            if i > 0
            else str(c)
            for i, c in reversed(list(enumerate(self.reduction_polynomial)))
            if c
        ]
        return f"GF({self.q}) mod {' + '.join(terms)}"

    def __reduce__(self):
        return make_field, (self.q,)


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Return the (cached) field of order q.

    Raises
    ------
    NotPrimePower
        If q has two distinct prime factors.
    """
    return FieldSpec(q)


def smallest_prime_factor(q: int) -> int:
    return min(factorize(q))
