"""Subsets of GF(q) as bit masks.

Bit ``e`` of a mask is set when the element with canonical encoding ``e``
belongs to the set.  Non-empty subsets are numbered ``t = 1 .. 2^q - 1``:
first by cardinality, then lexicographically on the sorted tuple of element
encodings.  For q = 4 this gives S_1 = {0}, S_5 = {0, 1}, S_15 = GF(4).

Mask-level helpers (``mask_*``) are the hot path used by the decoder and by
density evolution; :class:`SymbolSet` wraps a mask together with its field
for the public API.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import EmptySet, ValidationError, ZeroScalar
from .gf import FieldSpec, make_field

MAX_SET_ORDER = 64
# Dense per-mask tables (2^q entries per row) are built up to this order.
TABLE_SET_ORDER = 16


def _check_order(q: int):
    if q > MAX_SET_ORDER:
        raise ValidationError(f"symbol sets are supported for q <= {MAX_SET_ORDER}, got {q}")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members(mask: int) -> list[int]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return out


def mask_of(elements) -> int:
    m = 0
    for e in elements:
        m |= 1 << int(e)
    return m


def mask_scale(field: FieldSpec, mask: int, h: int) -> int:
    if h == 0:
        raise ZeroScalar("sets can only be scaled by a nonzero element")
    return mask_of(field.mul(h, e) for e in members(mask))


def mask_translate(field: FieldSpec, mask: int, s: int) -> int:
    return mask_of(field.add(s, e) for e in members(mask))


def mask_sumset(field: FieldSpec, a: int, b: int) -> int:
    out = 0
    mb = members(b)
    for x in members(a):
        for y in mb:
            out |= 1 << field.add(x, y)
    return out


# -- subset indexing --

def _lex_rank(elems: list[int], q: int) -> int:
    k = len(elems)
    rank = 0
    prev = -1
    for i, a in enumerate(elems):
        for v in range(prev + 1, a):
            rank += comb(q - 1 - v, k - 1 - i)
        prev = a
    return rank


def _lex_unrank(rank: int, k: int, q: int) -> list[int]:
    elems = []
    v = 0
    for i in range(k):
        while True:
            c = comb(q - 1 - v, k - 1 - i)
            if rank < c:
                break
            rank -= c
            v += 1
        elems.append(v)
        v += 1
    return elems


def mask_index(q: int, mask: int) -> int:
    """Canonical index t of a non-empty mask."""
    if mask == 0:
        raise EmptySet("the empty set has no index")
    elems = members(mask)
    k = len(elems)
    return 1 + sum(comb(q, c) for c in range(1, k)) + _lex_rank(elems, q)


def mask_from_index(q: int, t: int) -> int:
    if not 1 <= t <= (1 << q) - 1:
        raise ValidationError(f"subset index must lie in [1, {(1 << q) - 1}], got {t}")
    r = t - 1
    k = 1
    while r >= comb(q, k):
        r -= comb(q, k)
        k += 1
    return mask_of(_lex_unrank(r, k, q))


@lru_cache(maxsize=None)
def index_arrays(q: int) -> tuple[np.ndarray, np.ndarray]:
    """(mask_by_index, index_by_mask) lookup arrays; slot 0 of each is unused."""
    if q > TABLE_SET_ORDER:
        raise ValidationError(f"index tables are only built for q <= {TABLE_SET_ORDER}")
    n = 1 << q
    by_index = np.zeros(n, dtype=np.int64)
    by_mask = np.zeros(n, dtype=np.int64)
    for t in range(1, n):
        m = mask_from_index(q, t)
        by_index[t] = m
        by_mask[m] = t
    return by_index, by_mask


# -- public value type --

@dataclass(frozen=True)
class SymbolSet:
    mask: int
    field: FieldSpec

    def __post_init__(self):
        _check_order(self.field.q)
        if not 0 <= self.mask < (1 << self.field.q):
            raise ValidationError(f"mask {self.mask:#x} has bits outside GF({self.field.q})")

    @classmethod
    def of(cls, field: FieldSpec, elements) -> "SymbolSet":
        elements = list(elements)
        for e in elements:
            if not 0 <= e < field.q:
                raise ValidationError(f"{e} is not an element of GF({field.q})")
        return cls(mask_of(elements), field)

    @classmethod
    def full(cls, field: FieldSpec) -> "SymbolSet":
        return cls((1 << field.q) - 1, field)

    @property
    def members(self) -> list[int]:
        return members(self.mask)

    def __len__(self):
        return popcount(self.mask)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return bool(self.mask >> x & 1)

    def __bool__(self):
        return self.mask != 0

    def __and__(self, other):
        return intersect(self, other)

    def __add__(self, other):
        return sumset(self, other)

    def __str__(self):
        return render(self)


def _same_field(a: SymbolSet, b: SymbolSet):
    if a.field != b.field:
        raise ValidationError("sets belong to different fields")


def index_of(s: SymbolSet) -> int:
    return mask_index(s.field.q, s.mask)


def set_of(field: FieldSpec, t: int) -> SymbolSet:
    _check_order(field.q)
    return SymbolSet(mask_from_index(field.q, t), field)


def scale(s: SymbolSet, h: int) -> SymbolSet:
    """{h * x : x in s} for nonzero h."""
    return SymbolSet(mask_scale(s.field, s.mask, h), s.field)


def sumset(a: SymbolSet, b: SymbolSet) -> SymbolSet:
    """Minkowski sum {x + y : x in a, y in b}."""
    _same_field(a, b)
    return SymbolSet(mask_sumset(a.field, a.mask, b.mask), a.field)


def intersect(a: SymbolSet, b: SymbolSet) -> SymbolSet:
    _same_field(a, b)
    return SymbolSet(a.mask & b.mask, a.field)


def element_name(field: FieldSpec, e: int) -> str:
    return "0" if e == 0 else f"a^{field.log_alpha(e)}"


def render(s: SymbolSet) -> str:
    """Text form such as ``{0,a^0,a^1}``, elements in canonical order."""
    return "{" + ",".join(element_name(s.field, e) for e in s.members) + "}"


# -- dense tables for vectorized code (q <= 16) --

@lru_cache(maxsize=None)
def scale_table(q: int) -> np.ndarray:
    """scale_table[h, mask] = h * mask; row 0 maps everything to 0."""
    if q > TABLE_SET_ORDER:
        raise ValidationError(f"dense set tables are only built for q <= {TABLE_SET_ORDER}")
    field = make_field(q)
    n = 1 << q
    masks = np.arange(n, dtype=np.int64)
    out = np.zeros((q, n), dtype=np.int64)
    for h in range(1, q):
        for e in range(q):
            bit = (masks >> e) & 1
            out[h] |= bit << field.mul(h, e)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def translate_table(q: int) -> np.ndarray:
    """translate_table[s, mask] = s + mask."""
    if q > TABLE_SET_ORDER:
        raise ValidationError(f"dense set tables are only built for q <= {TABLE_SET_ORDER}")
    field = make_field(q)
    n = 1 << q
    masks = np.arange(n, dtype=np.int64)
    out = np.zeros((q, n), dtype=np.int64)
    for s in range(q):
        for e in range(q):
            bit = (masks >> e) & 1
            out[s] |= bit << field.add(s, e)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def sumset_table(q: int) -> np.ndarray:
    """sumset_table[a, b] = a + b for all mask pairs (q <= 8 only)."""
    if q > 8:
        raise ValidationError("pairwise sumset tables are only built for q <= 8")
    tr = translate_table(q)
    n = 1 << q
    out = np.zeros((n, n), dtype=np.int64)
    for s in range(q):
        has = ((np.arange(n) >> s) & 1).astype(bool)
        out[has] |= tr[s][None, :]
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def popcount_table(q: int) -> np.ndarray:
    n = 1 << q
    masks = np.arange(n, dtype=np.int64)
    out = np.zeros(n, dtype=np.int64)
    for e in range(q):
        out += (masks >> e) & 1
    return out
