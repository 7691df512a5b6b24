"""Batched finite-length Monte Carlo for the set-message decoder.

All-zero transmission is used throughout: every message set must keep
element 0, which makes any wrong resolution directly detectable.  Trials are
grouped in batches; each batch draws one Tanner graph and ``batch_size``
independent channel realizations, and decodes them together with numpy
table lookups.  Batch ``b`` of a sweep point draws from a random stream keyed
by ``(seed, n, eps, b)``, so results do not depend on the worker count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import QpecParams, sample_output_masks
from .decoder import DEFAULT_MAX_ITERS
from .errors import EmptyIntersection, ValidationError
from .gf import make_field
from .ldpc import DegreeDistribution, TannerGraph, sample_graph
from .symbol_sets import popcount_table, scale_table, sumset_table, translate_table

log = logging.getLogger(__name__)

MAX_SIM_ORDER = 16


class BatchDecoder:
    """Flooding decoder applied to many received words on one graph."""

    def __init__(self, graph: TannerGraph):
        q = graph.field.q
        if q > MAX_SIM_ORDER:
            raise ValidationError(f"batched decoding supports q <= {MAX_SIM_ORDER}")
        self.graph = graph
        self.q = q
        self.dtype = np.uint8 if q <= 8 else np.uint16
        self.full = (1 << q) - 1
        self.scale = scale_table(q).astype(self.dtype)
        self.popcount = popcount_table(q)
        if q <= 8:
            self.pair = sumset_table(q).astype(self.dtype)
        else:
            self.pair = None
            self.translate = translate_table(q).astype(self.dtype)
        field = graph.field
        neg = field.neg_table[graph.label]
        inv = field.inv_table[graph.label]
        self.check_groups = []
        degs = graph.chk_degrees()
        for d in np.unique(degs):
            checks = np.flatnonzero(degs == d)
            idx = np.stack([graph.chk_edges[c] for c in checks])
            self.check_groups.append((idx, neg[idx], inv[idx]))
        self.var_groups = []
        degs = graph.var_degrees()
        for d in np.unique(degs):
            if d == 0:
                continue
            vs = np.flatnonzero(degs == d)
            idx = np.stack([graph.var_edges[v] for v in vs])
            self.var_groups.append((vs, idx))

    def _sumset(self, a, b):
        if self.pair is not None:
            return self.pair[a, b]
        out = np.zeros_like(a)
        for s in range(self.q):
            hit = ((a >> s) & 1).astype(bool)
            out |= np.where(hit, self.translate[s][b], 0).astype(self.dtype)
        return out

    def check_update(self, vtc):
        ctv = np.empty_like(vtc)
        for idx, neg, inv in self.check_groups:
            S = self.scale[neg, vtc[:, idx]]
            d = idx.shape[1]
            if d == 1:
                ctv[:, idx[:, 0]] = 1
                continue
            prefix = [None, S[..., 0]]
            for j in range(1, d - 1):
                prefix.append(self._sumset(prefix[-1], S[..., j]))
            out = np.empty_like(S)
            out[..., d - 1] = prefix[d - 1]
            suffix = S[..., d - 1]
            for j in range(d - 2, 0, -1):
                out[..., j] = self._sumset(prefix[j], suffix)
                suffix = self._sumset(suffix, S[..., j])
            out[..., 0] = suffix
            ctv[:, idx] = self.scale[inv, out]
        return ctv

    def var_update(self, channel, ctv):
        vtc = np.empty_like(ctv)
        post = np.empty_like(channel)
        for vs, idx in self.var_groups:
            C = ctv[:, idx]
            d = idx.shape[1]
            ch = channel[:, vs]
            prefix = [ch]
            for j in range(d):
                prefix.append(prefix[-1] & C[..., j])
            out = np.empty_like(C)
            suffix = np.full_like(ch, self.full)
            for j in range(d - 1, -1, -1):
                out[..., j] = prefix[j] & suffix
                suffix = suffix & C[..., j]
            vtc[:, idx] = out
            post[:, vs] = prefix[d]
        return vtc, post

    def run(self, channel: np.ndarray, max_iters: int = DEFAULT_MAX_ITERS):
        """Decode a (B, n) array of channel masks.

        Returns ``(posterior, iterations_used)`` with the same stopping rule
        as :func:`qpec.decoder.decode`.
        """
        channel = np.asarray(channel).astype(self.dtype)
        B = channel.shape[0]
        posterior = channel.copy()
        iters = np.zeros(B, dtype=np.int64)
        vtc = channel[:, self.graph.var]
        ctv = np.full_like(vtc, self.full)
        active = np.flatnonzero((self.popcount[channel] > 1).any(axis=1))
        ch = channel[active]
        post = channel[active]
        vtc = vtc[active]
        ctv = ctv[active]
        for it in range(1, max_iters + 1):
            if len(active) == 0:
                break
            new_ctv = self.check_update(vtc)
            new_vtc, new_post = self.var_update(ch, new_ctv)
            if not new_post.all():
                raise EmptyIntersection("a decoder message became empty")
            shrunk = (new_post != post).any(axis=1)
            iters[active[shrunk]] = it
            moving = (new_ctv != ctv).any(axis=1) | (new_vtc != vtc).any(axis=1)
            unresolved = (self.popcount[new_post] > 1).any(axis=1)
            keep = moving & unresolved
            posterior[active] = new_post
            if keep.all():
                vtc, ctv, post = new_vtc, new_ctv, new_post
            else:
                active = active[keep]
                vtc, ctv, post, ch = new_vtc[keep], new_ctv[keep], new_post[keep], ch[keep]
        return posterior, iters


@dataclass
class SimResult:
    eps: float
    n: int
    trials: int
    symbol_failures: int
    word_failures: int
    iterations_total: int
    wrong_resolutions: int

    @property
    def symbol_failure_rate(self) -> float:
        return self.symbol_failures / (self.trials * self.n)

    @property
    def word_failure_rate(self) -> float:
        return self.word_failures / self.trials

    @property
    def mean_iters(self) -> float:
        return self.iterations_total / self.trials

    def merge(self, other: "SimResult") -> "SimResult":
        return SimResult(
            self.eps,
            self.n,
            self.trials + other.trials,
            self.symbol_failures + other.symbol_failures,
            self.word_failures + other.word_failures,
            self.iterations_total + other.iterations_total,
            self.wrong_resolutions + other.wrong_resolutions,
        )


def batch_stream(seed: int, n: int, eps: float, batch: int) -> np.random.Generator:
    key = (int(n), int(round(eps * 1e9)), int(batch))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _run_batch(args) -> SimResult:
    dd, q, M, eps, n, size, max_iters, seed, b = args
    rng = batch_stream(seed, n, eps, b)
    field = make_field(q)
    graph = sample_graph(n, dd, field, rng)
    params = QpecParams(field, M, eps)
    channel = sample_output_masks(params, (size, n), rng)
    posterior, iters = BatchDecoder(graph).run(channel, max_iters)
    counts = popcount_table(q)[posterior]
    unresolved = counts > 1
    wrong = ((posterior & 1) == 0) | ((counts == 1) & (posterior != 1))
    return SimResult(
        eps,
        n,
        size,
        int(unresolved.sum()),
        int(unresolved.any(axis=1).sum()),
        int(iters.sum()),
        int(wrong.any(axis=1).sum()),
    )


def worker_count() -> int:
    env = os.environ.get("QPEC_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, os.cpu_count() or 1))


def simulate(dd: DegreeDistribution, q: int, M: int, eps: float, n: int, trials: int,
             max_iters: int = DEFAULT_MAX_ITERS, seed: int = 0, batch_size: int = 500,
             workers: int | None = None) -> SimResult:
    """Word and symbol failure rates of the iterative decoder at one (eps, n)."""
    if trials < 1:
        raise ValidationError("trials must be positive")
    QpecParams(make_field(q), M, eps)
    sizes = [batch_size] * (trials // batch_size)
    if trials % batch_size:
        sizes.append(trials % batch_size)
    jobs = [(dd, q, M, eps, n, s, max_iters, seed, b) for b, s in enumerate(sizes)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_batch, jobs))
    else:
        parts = [_run_batch(j) for j in jobs]
    total = parts[0]
    for p in parts[1:]:
        total = total.merge(p)
    log.info("simulated eps=%g n=%d trials=%d wer=%g", eps, n, trials, total.word_failure_rate)
    return total
