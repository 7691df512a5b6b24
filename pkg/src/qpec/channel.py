"""The q-ary partial erasure channel.

With probability ``1 - epsilon`` the output is the singleton ``{x}``; otherwise
it is one of the ``C(q-1, M-1)`` sets of size M that contain x, chosen
uniformly.  All entropies and capacities are in q-ary units unless noted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb, log

import numpy as np

from .errors import BadDistribution, BadOutputCardinality, ValidationError
from .gf import FieldSpec
from .symbol_sets import SymbolSet, mask_of, popcount


@dataclass(frozen=True)
class QpecParams:
    field: FieldSpec
    M: int
    epsilon: float

    def __post_init__(self):
        if not 2 <= self.M <= self.field.q:
            raise ValidationError(f"M must satisfy 2 <= M <= q={self.field.q}, got {self.M}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n_super_symbols(self) -> int:
        """Number of erased outputs per input symbol, C(q-1, M-1)."""
        return comb(self.q - 1, self.M - 1)


def transition_prob(params: QpecParams, x: int, y: SymbolSet) -> float:
    size = len(y)
    if size not in (1, params.M):
        raise BadOutputCardinality(f"output sets have size 1 or M={params.M}, got {size}")
    if x not in y:
        return 0.0
    if size == 1:
        return 1.0 - params.epsilon
    return params.epsilon / params.n_super_symbols


@lru_cache(maxsize=None)
def super_symbol_masks(q: int, M: int, x: int = 0) -> np.ndarray:
    """Masks of all M-sets containing x, in increasing mask order."""
    others = [e for e in range(q) if e != x]
    masks = sorted(mask_of((x, *rest)) for rest in combinations(others, M - 1))
    out = np.array(masks, dtype=np.int64)
    out.flags.writeable = False
    return out


def sample_output(params: QpecParams, x: int, rng: np.random.Generator) -> SymbolSet:
    if rng.random() >= params.epsilon:
        return SymbolSet(1 << x, params.field)
    others = np.array([e for e in range(params.q) if e != x])
    picked = rng.choice(others, size=params.M - 1, replace=False)
    return SymbolSet.of(params.field, [x, *picked.tolist()])


def sample_output_masks(params: QpecParams, shape, rng: np.random.Generator) -> np.ndarray:
    """Vectorized draw of channel-output masks for transmitted symbol 0."""
    erased = rng.random(shape) < params.epsilon
    table = super_symbol_masks(params.q, params.M, 0)
    out = np.ones(shape, dtype=np.int64)
    n_erased = int(erased.sum())
    if n_erased:
        out[erased] = table[rng.integers(0, len(table), size=n_erased)]
    return out


def capacity(params: QpecParams) -> float:
    """1 - epsilon * log_q(M), in q-ary symbols per channel use."""
    return 1.0 - params.epsilon * log(params.M) / log(params.q)


def _xlogx(p: float) -> float:
    return p * log(p) if p > 0 else 0.0


def conditional_entropy(params: QpecParams) -> float:
    eps = params.epsilon
    nats = -_xlogx(1 - eps)
    if eps > 0:
        nats -= eps * log(eps / params.n_super_symbols)
    return nats / log(params.q)


def output_entropy(params: QpecParams, px) -> float:
    """H(Y) for input distribution ``px`` over the field elements."""
    px = np.asarray(px, dtype=float)
    q, eps = params.q, params.epsilon
    if px.shape != (q,):
        raise BadDistribution(f"input distribution must have {q} entries")
    if np.any(px < 0) or abs(px.sum() - 1.0) > 1e-12:
        raise BadDistribution("input distribution must be non-negative and sum to 1")
    nats = -sum(_xlogx(p * (1 - eps)) for p in px)
    w = eps / params.n_super_symbols
    if w > 0:
        for subset in combinations(range(q), params.M):
            nats -= _xlogx(w * px[list(subset)].sum())
    return nats / log(q)


def transition_matrix(params: QpecParams) -> tuple[list[int], np.ndarray]:
    """(output masks, row-stochastic matrix P[x, y]) over the whole output alphabet."""
    q, M = params.q, params.M
    outputs = [1 << x for x in range(q)] + [mask_of(s) for s in combinations(range(q), M)]
    P = np.zeros((q, len(outputs)))
    for x in range(q):
        for j, m in enumerate(outputs):
            if m >> x & 1:
                P[x, j] = (1 - params.epsilon) if popcount(m) == 1 else params.epsilon / params.n_super_symbols
    return outputs, P


def bits(value_qary: float, q: int) -> float:
    """Convert a q-ary quantity to bits."""
    return value_qary * log(q, 2)
