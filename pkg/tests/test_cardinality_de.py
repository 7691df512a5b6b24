import numpy as np
import pytest

from qpec.channel import QpecParams
from qpec.density_evolution.cardinality import (
    cardinality_de_run,
    check_update,
    variable_update,
    variable_update_qm,
)
from qpec.density_evolution.exact import exact_de_run
from qpec.density_evolution.threshold import ThresholdResult, converges, threshold
from qpec.gf import make_field
from qpec.ldpc import DegreeDistribution

REG36 = DegreeDistribution.regular(3, 6)
IRREG = DegreeDistribution({2: 0.3, 3: 0.4, 5: 0.3}, {5: 0.5, 6: 0.5})
MODELS = ["min", "max", "balls", "union"]


def params(q, M, eps):
    return QpecParams(make_field(q), M, eps)


@pytest.mark.parametrize("q,M", [(4, 2), (5, 3), (8, 5), (16, 9)])
def test_variable_update_matches_q_m_form(q, M):
    rng = np.random.default_rng(q * M)
    W = rng.random(q)
    W /= W.sum()
    a = variable_update(W, IRREG, q, M, 0.4)
    b = variable_update_qm(W, IRREG, q, M, 0.4)
    assert np.allclose(a, b, atol=1e-13)


@pytest.mark.parametrize("model", MODELS + ["exact"])
@pytest.mark.parametrize("q", [2, 4, 5])
def test_full_erasure_matches_qec(model, q):
    eps = 0.41
    trace = cardinality_de_run(IRREG, params(q, q, eps), model, 40)
    x = eps
    for l in range(1, len(trace.p_e)):
        x = eps * IRREG.lam(1 - IRREG.rho(1 - x))
        assert trace.p_e[l] == pytest.approx(x, abs=1e-12)


@pytest.mark.parametrize("model", MODELS)
def test_eps_zero(model):
    trace = cardinality_de_run(REG36, params(8, 4, 0.0), model, 5)
    for Z in trace.Z:
        assert Z[0] == 1.0


@pytest.mark.parametrize("model", MODELS)
def test_distributions_normalised_and_monotone(model):
    for eps in (0.45, 0.6, 0.7):
        trace = cardinality_de_run(REG36, params(8, 4, eps), model, 100)
        for Z, W in zip(trace.Z[1:], trace.W[1:]):
            assert Z.sum() == pytest.approx(1.0, abs=1e-9)
            assert W.sum() == pytest.approx(1.0, abs=1e-9)
        assert trace.monotone_violations == []


def test_exact_kind_matches_exact_de():
    p = params(4, 3, 0.55)
    card = cardinality_de_run(REG36, p, "exact", 60)
    exact = exact_de_run(REG36, p, 60)
    marg = exact.cardinality_marginals("z")
    k = min(len(card.Z), len(marg))
    assert np.max(np.abs(np.array(card.Z[:k]) - marg[:k])) < 1e-3


def test_check_update_all_singletons():
    Z = np.zeros(8)
    Z[0] = 1.0
    W = check_update(Z, REG36, "union", 8, 4)
    assert W[0] == pytest.approx(1.0)


def test_threshold_degenerate():
    for model in MODELS:
        assert threshold(REG36, 4, 4, model).value == pytest.approx(0.4294, abs=1e-3)


def test_threshold_bracket():
    res = threshold(REG36, 5, 3, "union", tol=1e-3)
    assert isinstance(res, ThresholdResult)
    assert res.hi - res.lo <= 1e-3
    assert converges(REG36, 5, 3, res.lo, "union")
    assert not converges(REG36, 5, 3, res.hi, "union")


def test_threshold_non_increasing_in_m():
    values = [threshold(REG36, 7, M, "union", 1e-3).value for M in range(2, 8)]
    assert all(b <= a + 1e-3 for a, b in zip(values, values[1:]))


def test_threshold_ordering_small_grid():
    for q, M in ((5, 3), (8, 4)):
        t = {m: threshold(REG36, q, M, m, 1e-3).value for m in MODELS}
        assert t["max"] <= t["union"] + 1e-3 <= t["min"] + 2e-3
        assert t["max"] <= t["balls"] + 1e-3 <= t["min"] + 2e-3


def test_exact_de_threshold_agrees():
    a = threshold(REG36, 3, 2, "exact-de", 1e-3).value
    b = threshold(REG36, 3, 2, "exact", 1e-3).value
    assert a == pytest.approx(b, abs=1e-3)
