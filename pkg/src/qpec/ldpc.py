"""Degree distributions and random labeled Tanner graphs over GF(q)."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InfeasibleDegreeSequence, ValidationError
from .gf import FieldSpec

SUM_TOL = 1e-9


def _clean(coeffs, name) -> dict[int, float]:
    out = {}
    for deg, c in coeffs.items():
        deg = int(deg)
        c = float(c)
        if deg < 2:
            raise ValidationError(f"{name} degrees must be >= 2, got {deg}")
        if c < 0:
            raise ValidationError(f"{name}_{deg} is negative ({c})")
        if c > 0:
            out[deg] = out.get(deg, 0.0) + c
    if not out:
        raise ValidationError(f"{name} has no positive coefficient")
    total = sum(out.values())
    if abs(total - 1.0) > SUM_TOL:
        raise ValidationError(f"{name} coefficients sum to {total!r}, expected 1")
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective pair: ``lambda_coeffs[i]`` is the fraction of edges
    attached to degree-i variable nodes (coefficient of x^(i-1))."""

    lambda_coeffs: dict[int, float]
    rho_coeffs: dict[int, float]

    def __post_init__(self):
        object.__setattr__(self, "lambda_coeffs", _clean(self.lambda_coeffs, "lambda"))
        object.__setattr__(self, "rho_coeffs", _clean(self.rho_coeffs, "rho"))

    @classmethod
    def regular(cls, dv: int, dc: int) -> "DegreeDistribution":
        return cls({dv: 1.0}, {dc: 1.0})

    @property
    def dv(self) -> int:
        return max(self.lambda_coeffs)

    @property
    def dc(self) -> int:
        return max(self.rho_coeffs)

    # Power-basis coefficient arrays, index j = coefficient of x^j.
    @property
    def lambda_poly(self) -> np.ndarray:
        c = np.zeros(self.dv)
        for i, v in self.lambda_coeffs.items():
            c[i - 1] = v
        return c

    @property
    def rho_poly(self) -> np.ndarray:
        c = np.zeros(self.dc)
        for i, v in self.rho_coeffs.items():
            c[i - 1] = v
        return c

    def lam(self, x):
        return P.polyval(x, self.lambda_poly)

    def rho(self, x):
        return P.polyval(x, self.rho_poly)

    def lam_prime(self, x):
        return P.polyval(x, P.polyder(self.lambda_poly))

    def rho_prime(self, x):
        return P.polyval(x, P.polyder(self.rho_poly))

    def rho_second(self, x):
        return P.polyval(x, P.polyder(self.rho_poly, 2))

    def with_lambda(self, lambda_coeffs) -> "DegreeDistribution":
        return DegreeDistribution(lambda_coeffs, self.rho_coeffs)

    def to_dict(self) -> dict:
        return {
            "lambda": {str(i): v for i, v in self.lambda_coeffs.items()},
            "rho": {str(i): v for i, v in self.rho_coeffs.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DegreeDistribution":
        try:
            return cls(d["lambda"], d["rho"])
        except KeyError as exc:
            raise ValidationError(f"degree-distribution JSON lacks key {exc}") from None

    def __str__(self):
        def poly(c):
            return " + ".join(f"{v:.4g}" + ("" if i == 1 else "x" if i == 2 else f"x^{i - 1}") for i, v in c.items())

        return f"lambda(x) = {poly(self.lambda_coeffs)}; rho(x) = {poly(self.rho_coeffs)}"


def load_dd(path) -> DegreeDistribution:
    with open(path, encoding="utf-8") as fh:
        return DegreeDistribution.from_dict(json.load(fh))


def load_rho(path) -> dict[int, float]:
    """Read a ``{"rho": {...}}`` file (a full dd file is accepted too)."""
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    if "rho" not in d:
        raise ValidationError(f"{path}: no 'rho' key")
    return _clean(d["rho"], "rho")


def save_dd(dd: DegreeDistribution, path) -> None:
    Path(path).write_text(json.dumps(dd.to_dict(), indent=2) + "\n", encoding="utf-8")


def design_rate(dd: DegreeDistribution) -> float:
    """1 - (sum rho_i / i) / (sum lambda_i / i)."""
    lam = sum(v / i for i, v in dd.lambda_coeffs.items())
    rho = sum(v / i for i, v in dd.rho_coeffs.items())
    return 1.0 - rho / lam


def node_fractions(edge_coeffs: dict[int, float]) -> dict[int, float]:
    """Node-perspective fractions from edge-perspective coefficients."""
    w = {i: v / i for i, v in edge_coeffs.items()}
    s = sum(w.values())
    return {i: v / s for i, v in w.items()}


def _largest_remainder(total: int, weights: dict[int, float]) -> dict[int, int]:
    raw = {i: total * w for i, w in weights.items()}
    out = {i: int(np.floor(r)) for i, r in raw.items()}
    short = total - sum(out.values())
    order = sorted(raw, key=lambda i: (-(raw[i] - out[i]), i))
    for i in order[:short]:
        out[i] += 1
    return out


def _fix_edge_total(counts: dict[int, int], target: int) -> dict[int, int]:
    """Adjust node counts per degree so that sum(deg * count) == target,
    changing as few nodes as possible (small exhaustive search)."""
    degrees = sorted(counts)
    diff = target - sum(d * c for d, c in counts.items())
    if diff == 0:
        return counts
    best = None
    span = range(-4, 5)
    for delta in itertools.product(span, repeat=len(degrees)):
        if sum(d * x for d, x in zip(degrees, delta)) != diff:
            continue
        if any(counts[d] + x < 0 for d, x in zip(degrees, delta)):
            continue
        cost = sum(abs(x) for x in delta)
        if best is None or cost < best[0]:
            best = (cost, delta)
    if best is None:
        raise InfeasibleDegreeSequence(f"cannot match {target} edges with check degrees {degrees}")
    return {d: counts[d] + x for d, x in zip(degrees, best[1])}


def degree_counts(n: int, dd: DegreeDistribution) -> tuple[dict[int, int], dict[int, int]]:
    """Integer node counts per degree: (variable counts, check counts)."""
    if len(dd.rho_coeffs) > 4:
        raise InfeasibleDegreeSequence("at most four distinct check degrees are supported")
    vcounts = _largest_remainder(n, node_fractions(dd.lambda_coeffs))
    edges = sum(d * c for d, c in vcounts.items())
    lam_int = sum(v / i for i, v in dd.lambda_coeffs.items())
    rho_int = sum(v / i for i, v in dd.rho_coeffs.items())
    n_checks = int(round(n * rho_int / lam_int))
    ccounts = _largest_remainder(n_checks, node_fractions(dd.rho_coeffs))
    ccounts = _fix_edge_total(ccounts, edges)
    return vcounts, ccounts


@dataclass
class TannerGraph:
    """Labeled bipartite graph.  Edge ``e`` joins variable ``var[e]`` and check
    ``chk[e]`` with nonzero label ``label[e]``; the parity equation of check c
    is ``sum_e label[e] * x[var[e]] = 0`` over its edges."""

    n: int
    m: int
    var: np.ndarray
    chk: np.ndarray
    label: np.ndarray
    field: FieldSpec
    var_edges: list[np.ndarray] = dc_field(init=False, repr=False)
    chk_edges: list[np.ndarray] = dc_field(init=False, repr=False)

    def __post_init__(self):
        self.var = np.asarray(self.var, dtype=np.int64)
        self.chk = np.asarray(self.chk, dtype=np.int64)
        self.label = np.asarray(self.label, dtype=np.int64)
        if np.any(self.label <= 0) or np.any(self.label >= self.field.q):
            raise ValidationError("edge labels must be nonzero field elements")
        pairs = self.var * self.m + self.chk
        if len(np.unique(pairs)) != len(pairs):
            raise ValidationError("graph has parallel edges")
        order = np.argsort(self.var, kind="stable")
        self.var_edges = np.split(order, np.searchsorted(self.var[order], np.arange(1, self.n)))
        order = np.argsort(self.chk, kind="stable")
        self.chk_edges = np.split(order, np.searchsorted(self.chk[order], np.arange(1, self.m)))

    @property
    def n_edges(self) -> int:
        return len(self.var)

    def var_degrees(self) -> np.ndarray:
        return np.bincount(self.var, minlength=self.n)

    def chk_degrees(self) -> np.ndarray:
        return np.bincount(self.chk, minlength=self.m)

    def empirical_dd(self) -> DegreeDistribution:
        E = self.n_edges
        vd, cd = self.var_degrees(), self.chk_degrees()
        lam = {int(d): float(d * c) / E for d, c in zip(*np.unique(vd[vd > 0], return_counts=True))}
        rho = {int(d): float(d * c) / E for d, c in zip(*np.unique(cd[cd > 0], return_counts=True))}
        return DegreeDistribution(lam, rho)

    def parity_check_matrix(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.int64)
        H[self.chk, self.var] = self.label
        return H

    @classmethod
    def from_matrix(cls, H, field: FieldSpec) -> "TannerGraph":
        H = np.asarray(H, dtype=np.int64)
        chk, var = np.nonzero(H)
        return cls(H.shape[1], H.shape[0], var, chk, H[chk, var], field)


def _remove_parallel(var, chk_sockets, m, rng, max_rounds=1000) -> bool:
    """Re-switch check endpoints in place until no (var, chk) pair repeats."""
    E = len(var)
    for _ in range(max_rounds):
        key = var * m + chk_sockets
        _, first, counts = np.unique(key, return_index=True, return_counts=True)
        if np.all(counts == 1):
            return True
        dup_mask = np.ones(E, dtype=bool)
        dup_mask[first] = False
        dups = np.flatnonzero(dup_mask)
        others = rng.integers(0, E, size=len(dups))
        existing = set(key.tolist())
        for e1, e2 in zip(dups.tolist(), others.tolist()):
            v1, c1, v2, c2 = var[e1], chk_sockets[e1], var[e2], chk_sockets[e2]
            if v1 == v2 or c1 == c2:
                continue
            k1, k2 = v1 * m + c2, v2 * m + c1
            if k1 in existing or k2 in existing:
                continue
            existing.discard(v2 * m + c2)
            existing.update((k1, k2))
            chk_sockets[e1], chk_sockets[e2] = c2, c1
    return False


def sample_graph(n: int, dd: DegreeDistribution, field: FieldSpec, rng: np.random.Generator,
                 max_resamples: int = 20) -> TannerGraph:
    """Configuration-model graph with uniform nonzero labels and no parallel edges."""
    if n < 1:
        raise ValidationError("n must be positive")
    vcounts, ccounts = degree_counts(n, dd)
    m = sum(ccounts.values())
    if m == 0 or max(dd.rho_coeffs) > n:
        raise InfeasibleDegreeSequence(f"n={n} is too small for this ensemble")
    vdeg = np.repeat(list(vcounts), list(vcounts.values()))
    cdeg = np.repeat(list(ccounts), list(ccounts.values()))
    var = np.repeat(np.arange(n), vdeg)
    chk_base = np.repeat(np.arange(m), cdeg)
    for _ in range(max_resamples):
        chk = rng.permutation(chk_base)
        if _remove_parallel(var, chk, m, rng):
            labels = rng.integers(1, field.q, size=len(var))
            return TannerGraph(n, m, var.copy(), chk, labels, field)
    raise InfeasibleDegreeSequence("could not remove parallel edges; degree sequence too dense")


# -- tiny-code encoder (Gaussian elimination over GF(q)) --

def nullspace(H: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Basis (rows) of {x : H x = 0} over GF(q)."""
    A = np.array(H, dtype=np.int64) % field.q
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        rows = np.flatnonzero(A[r:, c]) + r
        if len(rows) == 0:
            continue
        A[[r, rows[0]]] = A[[rows[0], r]]
        inv = field.inv(int(A[r, c]))
        A[r] = [field.mul(inv, int(x)) for x in A[r]]
        for i in range(m):
            if i != r and A[i, c]:
                f = int(A[i, c])
                A[i] = [field.sub(int(a), field.mul(f, int(b))) for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for j, f in enumerate(free):
        basis[j, f] = 1
        for i, pc in enumerate(pivots):
            basis[j, pc] = field.neg(int(A[i, f]))
    return basis


def encode(info, generator: np.ndarray, field: FieldSpec) -> np.ndarray:
    word = np.zeros(generator.shape[1], dtype=np.int64)
    for u, row in zip(info, generator):
        if u:
            word = np.array([field.add(int(a), field.mul(int(u), int(b))) for a, b in zip(word, row)])
    return word


def codebook(H: np.ndarray, field: FieldSpec, max_size: int = 1 << 20) -> np.ndarray:
    """All codewords of the code with parity-check matrix H (tiny codes only)."""
    G = nullspace(H, field)
    size = field.q ** len(G)
    if size > max_size:
        raise ValidationError(f"codebook of size {size} exceeds {max_size}")
    words = np.zeros((1, H.shape[1]), dtype=np.int64)
    add, mul = field.add_table, field.mul_table
    for row in G:
        shifted = [add[words, mul[u, row][None, :]] for u in range(field.q)]
        words = np.concatenate(shifted, axis=0)
    return words


def is_codeword(H: np.ndarray, word, field: FieldSpec) -> bool:
    add, mul = field.add_table, field.mul_table
    for row in H:
        acc = 0
        for h, x in zip(row, word):
            acc = add[acc, mul[h, x]]
        if acc:
            return False
    return True
