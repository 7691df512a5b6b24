from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from qpec.channel import QpecParams
from qpec.density_evolution.exact import (
    chi_distribution,
    eta_distribution,
    exact_de_run,
    initial_vtc,
    initial_vtc_closed_form,
)
from qpec.errors import ComplexityCapExceeded
from qpec.gf import make_field
from qpec.ldpc import DegreeDistribution
from qpec.symbol_sets import index_arrays, mask_index, popcount_table, scale_table, sumset_table

REG36 = DegreeDistribution.regular(3, 6)


def test_chi_singleton():
    assert chi_distribution(make_field(4), [1]) == {1: Fraction(1)}


def test_chi_q4_enumeration():
    # two-set sumsets in characteristic 2 can stay 2-sets when the labels agree
    chi = chi_distribution(make_field(4), [5, 5])
    assert chi == {5: Fraction(1, 9), 6: Fraction(1, 9), 7: Fraction(1, 9), 15: Fraction(2, 3)}


def test_chi_q3_monte_carlo():
    f = make_field(3)
    chi = chi_distribution(f, [2, 2])
    rng = np.random.default_rng(0)
    n = 100_000
    h = rng.integers(1, 3, size=(n, 3))
    scale, pair = scale_table(3), sumset_table(3)
    _, by_mask = index_arrays(3)
    sets = [int(index_arrays(3)[0][2])] * 2
    acc = np.ones(n, dtype=np.int64)
    for j, s in enumerate(sets):
        acc = pair[acc, scale[f.neg_table[h[:, j]], s]]
    out = by_mask[scale[f.inv_table[h[:, 2]], acc]]
    for t, p in chi.items():
        freq = np.mean(out == t)
        sigma = np.sqrt(float(p) * (1 - float(p)) / n)
        assert abs(freq - float(p)) <= 3 * sigma + 1e-12


def test_eta_examples():
    f = make_field(4)
    assert eta_distribution(f, 2, [6, 6]) == {1: Fraction(2, 3), 6: Fraction(1, 3)}
    # singleton incoming set pins the output
    assert eta_distribution(f, 3, [2, 15]) == {2: Fraction(1)}
    # full set incoming: the channel set itself, uniform over 3 choices
    eta = eta_distribution(f, 3, [15])
    assert sorted(eta.values()) == [Fraction(1, 3)] * 3
    assert all(popcount_table(4)[index_arrays(4)[0][t]] == 3 for t in eta)


def test_initial_vtc_closed_form():
    for q, M in ((3, 2), (4, 3), (5, 2)):
        p = QpecParams(make_field(q), M, 0.37)
        assert np.allclose(initial_vtc(p), initial_vtc_closed_form(p))
        assert initial_vtc(p).sum() == pytest.approx(1.0)


def test_eps_zero():
    trace = exact_de_run(REG36, QpecParams(make_field(4), 2, 0.0), 5)
    assert all(p == 0.0 for p in trace.p_e)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_full_erasure_matches_qec(q):
    eps = 0.42
    trace = exact_de_run(REG36, QpecParams(make_field(q), q, eps), 30)
    x = eps
    for l in range(1, len(trace.p_e)):
        x = eps * REG36.lam(1 - REG36.rho(1 - x))
        assert trace.p_e[l] == pytest.approx(x, abs=1e-12)


def _to_dict(q, vec):
    return {t: v for t, v in enumerate(vec, start=1) if v > 0}


def test_first_iteration_against_literal_sums():
    q, M, eps = 3, 2, 0.5
    f = make_field(q)
    trace = exact_de_run(REG36, QpecParams(f, M, eps), 1)
    z0 = _to_dict(q, trace.z[0])
    w1 = {}
    for lst in product(z0, repeat=5):
        weight = float(np.prod([z0[t] for t in lst]))
        for t, p in chi_distribution(f, lst).items():
            w1[t] = w1.get(t, 0.0) + weight * float(p)
    got = _to_dict(q, trace.w[1])
    assert set(got) == set(w1)
    for t in w1:
        assert got[t] == pytest.approx(w1[t], abs=1e-12)
    z1 = {1: 1 - eps}
    for lst in product(w1, repeat=2):
        weight = w1[lst[0]] * w1[lst[1]]
        for t, p in eta_distribution(f, M, lst, reference=0).items():
            z1[t] = z1.get(t, 0.0) + eps * weight * float(p)
    got = _to_dict(q, trace.z[1])
    for t in z1:
        assert got.get(t, 0.0) == pytest.approx(z1[t], abs=1e-12)


def _population_p_e(q, M, eps, iters, n, rng):
    """Sampled-tree estimate of p_e per iteration for the (3,6) ensemble."""
    f = make_field(q)
    scale, pair = scale_table(q), sumset_table(q)
    by_index, _ = index_arrays(q)
    erased_sets = [m for m in range(1 << q) if m & 1 and bin(m).count("1") == M]

    def channel():
        out = np.ones(n, dtype=np.int64)
        e = rng.random(n) < eps
        out[e] = rng.choice(erased_sets, size=int(e.sum()))
        return out

    def ctv(pop):
        acc = np.ones(n, dtype=np.int64)
        for _ in range(5):
            s = pop[rng.integers(0, n, size=n)]
            h = rng.integers(1, q, size=n)
            acc = pair[acc, scale[f.neg_table[h], s]]
        return scale[f.inv_table[rng.integers(1, q, size=n)], acc]

    pop = channel()
    out = []
    for _ in range(iters):
        pop = channel() & ctv(pop) & ctv(pop)
        out.append(float(np.mean(pop != 1)))
    return out


# near threshold the sampled trees drift in time as sampling error compounds,
# so the near-threshold point is checked early in the trajectory
@pytest.mark.parametrize("eps,l", [(0.5, 40), (0.6, 3)])
def test_exact_de_matches_sampled_trees(eps, l):
    q, M, n = 3, 2, 100_000
    sampled = _population_p_e(q, M, eps, l, n, np.random.default_rng(5))[-1]
    p_e = exact_de_run(REG36, QpecParams(make_field(q), M, eps), l).p_e
    exact = p_e[min(l, len(p_e) - 1)]
    sigma = np.sqrt(exact * (1 - exact) / n)
    assert abs(sampled - exact) <= 3 * sigma + 1e-9


def test_caps():
    with pytest.raises(ComplexityCapExceeded):
        exact_de_run(REG36, QpecParams(make_field(7), 3, 0.5), 2)
    with pytest.raises(ComplexityCapExceeded):
        exact_de_run(DegreeDistribution.regular(3, 8), QpecParams(make_field(4), 2, 0.5), 2)
    with pytest.raises(ComplexityCapExceeded):
        chi_distribution(make_field(7), [2, 2])


def test_distributions_normalised():
    trace = exact_de_run(REG36, QpecParams(make_field(4), 3, 0.55), 40)
    for z, w in zip(trace.z, trace.w[1:]):
        assert z.sum() == pytest.approx(1.0, abs=1e-9)
        assert w.sum() == pytest.approx(1.0, abs=1e-9)
