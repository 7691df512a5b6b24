"""Exact density evolution over subset distributions (small q only).

The recursion is run conditioned on the transmitted symbol 0, so every
message set contains 0.  Distributions are kept internally over masks
(length 2^q, slot 0 unused) and exported over subset indices t.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from math import comb

import numpy as np

from ..channel import QpecParams, super_symbol_masks
from ..errors import ComplexityCapExceeded, EmptyIntersection, ValidationError
from ..gf import FieldSpec
from ..ldpc import DegreeDistribution
from ..symbol_sets import (index_arrays, mask_from_index, mask_index, mask_scale, mask_sumset,
                           popcount_table, scale_table, sumset_table)

EXACT_MAX_Q = 5
EXACT_MAX_LIST = 5
EXACT_MAX_DC = 6


def _guard(q: int, length: int):
    if q > EXACT_MAX_Q:
        raise ComplexityCapExceeded(f"exact subset distributions are limited to q <= {EXACT_MAX_Q}")
    if length > EXACT_MAX_LIST:
        raise ComplexityCapExceeded(f"at most {EXACT_MAX_LIST} incoming sets are supported")


def chi_distribution(field: FieldSpec, incoming) -> dict[int, Fraction]:
    """Distribution of the CTV index produced by incoming VTC indices.

    Enumerates all labels of the incoming edges and of the outgoing edge.
    """
    q = field.q
    incoming = [int(t) for t in incoming]
    _guard(q, len(incoming))
    masks = [mask_from_index(q, t) for t in incoming]
    counts: dict[int, int] = {}
    labels = range(1, q)
    for hs in product(labels, repeat=len(masks) + 1):
        target = hs[-1]
        acc = 1
        for m, h in zip(masks, hs[:-1]):
            acc = mask_sumset(field, acc, mask_scale(field, m, field.neg(h)))
        t = mask_index(q, mask_scale(field, acc, field.inv(target)))
        counts[t] = counts.get(t, 0) + 1
    total = (q - 1) ** (len(masks) + 1)
    return {t: Fraction(c, total) for t, c in sorted(counts.items())}


def eta_distribution(field: FieldSpec, M: int, incoming, reference: int | None = None) -> dict[int, Fraction]:
    """Distribution of the VTC index given incoming CTV indices.

    The channel set is uniform over the M-sets containing ``reference``,
    which defaults to the smallest element common to all incoming sets.
    """
    q = field.q
    incoming = [int(t) for t in incoming]
    _guard(q, len(incoming))
    if not 1 <= M <= q:
        raise ValidationError(f"M must lie in [1, {q}]")
    common = (1 << q) - 1
    for t in incoming:
        common &= mask_from_index(q, t)
    if reference is None:
        if common == 0:
            raise EmptyIntersection("incoming sets share no element")
        reference = (common & -common).bit_length() - 1
    elif not common >> reference & 1:
        raise EmptyIntersection("reference symbol is missing from an incoming set")
    channel_sets = super_symbol_masks(q, M, reference) if M > 1 else np.array([1 << reference])
    counts: dict[int, int] = {}
    for y in channel_sets:
        t = mask_index(q, int(y) & common)
        counts[t] = counts.get(t, 0) + 1
    total = len(channel_sets)
    return {t: Fraction(c, total) for t, c in sorted(counts.items())}


# -- the recursion --

class _Tables:
    def __init__(self, q: int):
        n = 1 << q
        self.q = q
        self.n = n
        a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        self.sum_pairs = sumset_table(q).ravel()
        self.and_pairs = (a & b).ravel()
        self.scale = scale_table(q)
        self.popcount = popcount_table(q)

    def convolve(self, x, y, pairs):
        return np.bincount(pairs, weights=np.outer(x, y).ravel(), minlength=self.n)

    def label_average(self, z):
        """Distribution of h * S for uniform nonzero h."""
        out = np.zeros(self.n)
        for h in range(1, self.q):
            np.add.at(out, self.scale[h], z)
        return out / (self.q - 1)


def initial_vtc(params: QpecParams) -> np.ndarray:
    """z^(0) over masks, from the channel with transmitted symbol 0."""
    q, M, eps = params.q, params.M, params.epsilon
    z = np.zeros(1 << q)
    z[1] = 1 - eps
    sets = super_symbol_masks(q, M, 0)
    z[sets] += eps / len(sets)
    return z


def initial_vtc_closed_form(params: QpecParams) -> np.ndarray:
    q, M, eps = params.q, params.M, params.epsilon
    pc = popcount_table(q)
    masks = np.arange(1 << q)
    z = np.where(masks == 1, 1 - eps, 0.0)
    z = z + np.where((pc == M) & (masks & 1 == 1), eps / comb(q - 1, M - 1), 0.0)
    z[0] = 0.0
    return z


@dataclass
class ExactTrace:
    """Per-iteration CTV and VTC distributions (over subset indices) and p_e."""
    q: int
    w: list[np.ndarray] = dc_field(default_factory=list)
    z: list[np.ndarray] = dc_field(default_factory=list)
    p_e: list[float] = dc_field(default_factory=list)

    def cardinality_marginals(self, which: str = "z") -> np.ndarray:
        """(L, q) array of the cardinality marginals of ``z`` or ``w``."""
        by_index, _ = index_arrays(self.q)
        cards = popcount_table(self.q)[by_index[1:]]
        rows = self.z if which == "z" else self.w
        out = np.zeros((len(rows), self.q))
        for k, r in enumerate(rows):
            np.add.at(out[k], cards - 1, r)
        return out


def _to_index(q: int, dist: np.ndarray) -> np.ndarray:
    by_index, _ = index_arrays(q)
    return dist[by_index[1:]].copy()


def exact_de_run(dd: DegreeDistribution, params: QpecParams, max_l: int, p_target: float = 0.0,
                 stagnation: float = 1e-14, patience: int = 10) -> ExactTrace:
    """Iterate the exact subset DE for up to ``max_l`` iterations.

    Entry 0 of the trace holds the channel initialisation (no CTV message).
    Stops early once p_e < ``p_target`` or when p_e moved by less than
    ``stagnation`` for ``patience`` consecutive iterations.
    """
    q = params.q
    if q > EXACT_MAX_Q:
        raise ComplexityCapExceeded(f"exact density evolution is limited to q <= {EXACT_MAX_Q}")
    if dd.dc > EXACT_MAX_DC:
        raise ComplexityCapExceeded(f"exact density evolution is limited to d_c <= {EXACT_MAX_DC}")
    tab = _Tables(q)
    eps = params.epsilon
    channel = np.zeros(tab.n)
    sets = super_symbol_masks(q, params.M, 0)
    channel[sets] = 1.0 / len(sets)
    z = initial_vtc(params)
    trace = ExactTrace(q)
    trace.w.append(np.zeros((1 << q) - 1))
    trace.z.append(_to_index(q, z))
    trace.p_e.append(1.0 - z[1])
    still = 0
    for _ in range(max_l):
        zt = tab.label_average(z)
        w = np.zeros(tab.n)
        acc = np.zeros(tab.n)
        acc[1] = 1.0
        for i in range(2, dd.dc + 1):
            acc = tab.convolve(acc, zt, tab.sum_pairs)
            w += dd.rho_coeffs.get(i, 0.0) * acc
        # the map amplifies mass drift by about (dv-1)(dc-1)eps per step
        w /= w.sum()
        z_new = np.zeros(tab.n)
        acc = channel
        for i in range(2, dd.dv + 1):
            acc = tab.convolve(acc, w, tab.and_pairs)
            z_new += dd.lambda_coeffs.get(i, 0.0) * acc
        z_new *= eps
        z_new[1] += 1 - eps
        if z_new[0] > 1e-12:
            raise EmptyIntersection("exact DE produced an empty VTC set")
        z_new[0] = 0.0
        z = z_new / z_new.sum()
        p_e = max(0.0, 1.0 - z[1])
        trace.w.append(_to_index(q, w))
        trace.z.append(_to_index(q, z))
        still = still + 1 if abs(p_e - trace.p_e[-1]) < stagnation else 0
        trace.p_e.append(p_e)
        if p_e < p_target or still >= patience:
            break
    return trace
