import numpy as np
import pytest

from qpec.channel import QpecParams, sample_output_masks
from qpec.decoder import ctv_message, decode, ml_compatible_set, ml_symbol_decisions, vtc_message
from qpec.errors import EmptyIntersection
from qpec.gf import make_field
from qpec.ldpc import DegreeDistribution, TannerGraph, codebook, sample_graph
from qpec.symbol_sets import SymbolSet, popcount


def _alpha_set(f, exps, zero=True):
    return SymbolSet.of(f, ([0] if zero else []) + [f.alpha_power(j) for j in exps])


@pytest.mark.parametrize("q", [4, 16])
def test_fig2a_ctv(q):
    f = make_field(q)
    a = f.alpha_power
    out = ctv_message(f, a(1), [(_alpha_set(f, [0]), a(2)), (SymbolSet.of(f, [0]), a(3))])
    assert out == _alpha_set(f, [1])


def test_fig2b_vtc():
    f = make_field(16)
    channel = _alpha_set(f, [0, 2, 3])
    out = vtc_message(channel, [_alpha_set(f, [0, 1]), _alpha_set(f, [0, 2])])
    assert out == _alpha_set(f, [0])


def test_degree_two_check_negates():
    f = make_field(5)
    s = SymbolSet.of(f, [0, 1, 3])
    out = ctv_message(f, 2, [(s, 2)])
    assert out == SymbolSet.of(f, [0, 4, 2])


def test_singletons_solve_parity():
    f = make_field(7)
    rng = np.random.default_rng(0)
    for _ in range(50):
        labels = rng.integers(1, 7, size=4)
        xs = rng.integers(0, 7, size=3)
        acc = 0
        for h, x in zip(labels[:3], xs):
            acc = f.add(acc, f.mul(int(h), int(x)))
        expect = f.div(f.neg(acc), int(labels[3]))
        out = ctv_message(f, labels[3], [(SymbolSet.of(f, [int(x)]), int(h)) for h, x in zip(labels[:3], xs)])
        assert out.members == [expect]


def test_vtc_trivial_cases():
    f = make_field(8)
    s = SymbolSet.of(f, [0, 3, 5])
    assert vtc_message(s, [s, s]) == s
    single = SymbolSet.of(f, [3])
    assert vtc_message(single, [s]) == single
    with pytest.raises(EmptyIntersection):
        vtc_message(single, [SymbolSet.of(f, [0, 5])])


def _single_check():
    f = make_field(4)
    return f, TannerGraph(2, 1, [0, 1], [0, 0], [1, 1], f)


def test_decode_no_erasures():
    f, g = _single_check()
    r = decode(g, [SymbolSet.of(f, [0]), SymbolSet.of(f, [0])])
    assert not r.failure and r.iterations_used == 0


def test_decode_single_check_resolves():
    f, g = _single_check()
    r = decode(g, [SymbolSet.of(f, [0]), SymbolSet.of(f, [0, 1])])
    assert not r.failure
    assert r.iterations_used == 1
    assert r.values.tolist() == [0, 0]


def test_decode_single_check_fails():
    f, g = _single_check()
    r = decode(g, [SymbolSet.of(f, [0, 1]), SymbolSet.of(f, [0, 1])])
    assert r.failure
    assert r.posterior == [3, 3]
    assert r.vtc_unresolved == 2


def test_ml_repetition():
    f = make_field(2)
    cb = np.array([[0, 0], [1, 1]])
    psi = ml_compatible_set(cb, [SymbolSet.of(f, [0, 1]), SymbolSet.of(f, [0])])
    assert psi.tolist() == [[0, 0]]
    assert ml_symbol_decisions(psi).tolist() == [0, 0]


def _peel(graph, erased):
    """Parallel peeling on the erasure channel: resolve every variable that is
    the only unknown neighbour of some check, once per iteration."""
    known = ~erased
    counts = [int((~known).sum())]
    while True:
        new = known.copy()
        for edges in graph.chk_edges:
            vs = graph.var[edges]
            unknown = vs[~known[vs]]
            if len(unknown) == 1:
                new[unknown[0]] = True
        if (new == known).all():
            return known, counts
        known = new
        counts.append(int((~known).sum()))


def test_full_erasure_matches_peeling():
    q = 4
    f = make_field(q)
    rng = np.random.default_rng(11)
    dd = DegreeDistribution.regular(3, 6)
    for eps in (0.3, 0.4, 0.45):
        g = sample_graph(120, dd, f, rng)
        erased = rng.random(120) < eps
        outputs = np.where(erased, (1 << q) - 1, 1)
        r = decode(g, outputs.tolist())
        known, counts = _peel(g, erased)
        resolved = r.resolved
        assert np.array_equal(resolved, known)
        assert all(m in (1, (1 << q) - 1) for m in r.posterior)
        assert r.unresolved_per_iteration[: len(counts)] == counts


def test_suboptimality_witness():
    f = make_field(4)
    H = np.array([[3, 2, 1, 2], [2, 2, 3, 2]])
    outputs = [5, 9, 9, 3]
    r = decode(TannerGraph.from_matrix(H, f), outputs)
    assert r.failure and r.posterior == outputs
    decisions = ml_symbol_decisions(ml_compatible_set(codebook(H, f), outputs))
    assert decisions.tolist() == [0, 0, 0, 0]


def test_iterative_never_beats_ml():
    f = make_field(4)
    rng = np.random.default_rng(2)
    params = QpecParams(f, 2, 0.6)
    checked = 0
    while checked < 200:
        H = rng.integers(0, 4, size=(3, 6))
        if (H != 0).sum(axis=0).min() == 0:
            continue
        cb = codebook(H, f)
        word = cb[rng.integers(len(cb))]
        y = sample_output_masks(params, (6,), rng)
        # move each set so it contains the transmitted symbol
        tr = np.array([f.add(0, int(w)) for w in word])
        y = [sum(1 << f.add(e, int(t)) for e in range(4) if m >> e & 1) for m, t in zip(y, tr)]
        r = decode(TannerGraph.from_matrix(H, f), y)
        ml = ml_symbol_decisions(ml_compatible_set(cb, y))
        res = r.resolved
        assert np.array_equal(r.values[res], ml[res])
        assert np.array_equal(r.values[res], word[res])
        checked += 1


def test_messages_keep_transmitted_symbol():
    f = make_field(8)
    rng = np.random.default_rng(4)
    g = sample_graph(96, DegreeDistribution.regular(3, 6), f, rng)
    y = sample_output_masks(QpecParams(f, 4, 0.55), (96,), rng)
    r = decode(g, y.tolist())
    assert all(m & 1 for m in r.posterior)
    assert all(b <= a for a, b in zip(r.unresolved_per_iteration, r.unresolved_per_iteration[1:]))
    assert all(popcount(m) in range(1, 5) for m in r.posterior)
