"""Set-message iterative decoder and the brute-force ML compatibility oracle.

A check node sends each neighbour the set of values that keep its parity
equation satisfiable given the other incoming sets; a variable node sends
the intersection of its channel output with the other incoming check sets.
This module holds the readable per-instance reference; the batched Monte
Carlo engine lives in :mod:`qpec.simulation`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyIntersection, ValidationError
from .gf import FieldSpec
from .ldpc import TannerGraph
from .symbol_sets import SymbolSet, mask_scale, mask_sumset, members, popcount

DEFAULT_MAX_ITERS = 80


def _mask(s) -> int:
    return s.mask if isinstance(s, SymbolSet) else int(s)


def ctv_mask(field: FieldSpec, target_label: int, incoming) -> int:
    """(1/h_target) * sum over incoming (mask, label) of (-label) * mask."""
    acc = 1  # {0}
    for mask, h in incoming:
        acc = mask_sumset(field, acc, mask_scale(field, mask, field.neg(h)))
    return mask_scale(field, acc, field.inv(target_label))


def ctv_message(field: FieldSpec, target_label: int, incoming) -> SymbolSet:
    """Check-to-variable set.

    ``incoming`` holds ``(set, label)`` pairs for the other neighbours of the
    check; ``target_label`` labels the edge to the receiving variable.
    """
    pairs = [(_mask(s), int(h)) for s, h in incoming]
    if any(m == 0 for m, _ in pairs):
        raise ValidationError("incoming VTC sets must be non-empty")
    return SymbolSet(ctv_mask(field, int(target_label), pairs), field)


def vtc_message(channel_info: SymbolSet, incoming) -> SymbolSet:
    """Channel output intersected with every other incoming CTV set."""
    acc = channel_info.mask
    for s in incoming:
        acc &= _mask(s)
    if acc == 0:
        raise EmptyIntersection("VTC message became empty")
    return SymbolSet(acc, channel_info.field)


@dataclass
class DecodeReport:
    posterior: list[int]
    iterations_used: int
    unresolved_per_iteration: list[int]
    vtc_unresolved: int

    @property
    def resolved(self) -> np.ndarray:
        return np.array([popcount(m) == 1 for m in self.posterior])

    @property
    def values(self) -> np.ndarray:
        """Decoded symbol per variable, -1 where unresolved."""
        return np.array([members(m)[0] if popcount(m) == 1 else -1 for m in self.posterior])

    @property
    def failure(self) -> bool:
        return not bool(self.resolved.all())

    @property
    def n_unresolved(self) -> int:
        return int((~self.resolved).sum())


def decode(graph: TannerGraph, outputs, max_iters: int = DEFAULT_MAX_ITERS) -> DecodeReport:
    """Flooding-schedule decoding of one received word.

    Stops after ``max_iters`` iterations, when every posterior is a singleton,
    or when neither CTV nor VTC messages changed.  ``iterations_used`` is the
    last iteration at which some posterior shrank.
    """
    field = graph.field
    channel = [_mask(o) for o in outputs]
    if len(channel) != graph.n:
        raise ValidationError(f"expected {graph.n} channel outputs, got {len(channel)}")
    if any(m == 0 for m in channel):
        raise ValidationError("channel outputs must be non-empty")
    neg = [field.neg(int(h)) for h in graph.label]
    inv = [field.inv(int(h)) for h in graph.label]
    var = graph.var.tolist()
    vtc = [channel[v] for v in var]
    full = (1 << field.q) - 1
    ctv = [full] * graph.n_edges
    posterior = list(channel)
    unresolved = [sum(popcount(m) > 1 for m in posterior)]
    last_change = 0
    for it in range(1, max_iters + 1):
        if unresolved[-1] == 0:
            break
        new_ctv = list(ctv)
        for edges in graph.chk_edges:
            edges = edges.tolist()
            scaled = [mask_scale(field, vtc[e], neg[e]) for e in edges]
            d = len(edges)
            prefix = [1] * (d + 1)
            for j in range(d):
                prefix[j + 1] = mask_sumset(field, prefix[j], scaled[j])
            suffix = 1
            for j in range(d - 1, -1, -1):
                loo = mask_sumset(field, prefix[j], suffix)
                new_ctv[edges[j]] = mask_scale(field, loo, inv[edges[j]])
                suffix = mask_sumset(field, suffix, scaled[j])
        new_vtc = list(vtc)
        new_post = list(posterior)
        for v, edges in enumerate(graph.var_edges):
            edges = edges.tolist()
            d = len(edges)
            prefix = [channel[v]] * (d + 1)
            for j in range(d):
                prefix[j + 1] = prefix[j] & new_ctv[edges[j]]
            suffix = full
            for j in range(d - 1, -1, -1):
                new_vtc[edges[j]] = prefix[j] & suffix
                suffix &= new_ctv[edges[j]]
            new_post[v] = prefix[d]
        if any(m == 0 for m in new_post) or any(m == 0 for m in new_vtc):
            raise EmptyIntersection("a decoder message became empty")
        if new_post != posterior:
            last_change = it
        fixpoint = new_ctv == ctv and new_vtc == vtc
        ctv, vtc, posterior = new_ctv, new_vtc, new_post
        unresolved.append(sum(popcount(m) > 1 for m in posterior))
        if fixpoint:
            break
    vtc_unresolved = sum(popcount(m) > 1 for m in vtc)
    return DecodeReport(posterior, last_change, unresolved, vtc_unresolved)


def ml_compatible_set(codebook: np.ndarray, outputs) -> np.ndarray:
    """Codewords c with c_i in y_i for every position i (rows of ``codebook``)."""
    codebook = np.asarray(codebook, dtype=np.int64)
    if len(codebook) > 1 << 20:
        raise ValidationError("codebook too large for the ML oracle")
    masks = np.array([_mask(o) for o in outputs], dtype=np.int64)
    ok = ((masks[None, :] >> codebook) & 1).astype(bool).all(axis=1)
    return codebook[ok]


def ml_symbol_decisions(psi: np.ndarray) -> np.ndarray:
    """Per position, the common symbol of all compatible codewords, or -1."""
    if len(psi) == 0:
        raise ValidationError("no compatible codeword")
    agree = (psi == psi[0]).all(axis=0)
    return np.where(agree, psi[0], -1)
