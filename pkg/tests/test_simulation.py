import numpy as np
import pytest

from qpec.channel import QpecParams, sample_output_masks
from qpec.decoder import decode
from qpec.gf import make_field
from qpec.ldpc import DegreeDistribution, sample_graph
from qpec.simulation import BatchDecoder, SimResult, simulate

REG36 = DegreeDistribution.regular(3, 6)


@pytest.mark.parametrize("q,M,eps", [(4, 2, 0.6), (8, 4, 0.55), (16, 8, 0.6), (5, 3, 0.5)])
def test_batch_matches_reference(q, M, eps):
    f = make_field(q)
    rng = np.random.default_rng(q)
    dd = DegreeDistribution({2: 0.3, 3: 0.4, 5: 0.3}, {6: 0.5, 7: 0.5})
    g = sample_graph(70, dd, f, rng)
    y = sample_output_masks(QpecParams(f, M, eps), (12, 70), rng)
    post, iters = BatchDecoder(g).run(y, 80)
    for b in range(12):
        r = decode(g, y[b].tolist())
        assert post[b].tolist() == r.posterior
        assert iters[b] == r.iterations_used


def test_deterministic_across_workers():
    a = simulate(REG36, 8, 4, 0.55, 96, 300, seed=3, batch_size=100, workers=1)
    b = simulate(REG36, 8, 4, 0.55, 96, 300, seed=3, batch_size=100, workers=2)
    assert a == b


def test_seed_changes_result():
    a = simulate(REG36, 8, 4, 0.55, 96, 200, seed=1, batch_size=100, workers=1)
    b = simulate(REG36, 8, 4, 0.55, 96, 200, seed=2, batch_size=100, workers=1)
    assert a != b


def test_failure_rates_ordered_in_eps():
    lo = simulate(REG36, 8, 4, 0.45, 256, 400, seed=0, workers=1)
    hi = simulate(REG36, 8, 4, 0.70, 256, 400, seed=0, workers=1)
    assert lo.word_failure_rate < hi.word_failure_rate
    assert lo.wrong_resolutions == hi.wrong_resolutions == 0
    assert hi.word_failure_rate > 0.9


def test_merge():
    a = SimResult(0.5, 10, 3, 4, 1, 9, 0)
    b = SimResult(0.5, 10, 2, 1, 1, 4, 0)
    m = a.merge(b)
    assert (m.trials, m.symbol_failures, m.word_failures) == (5, 5, 2)
    assert m.symbol_failure_rate == pytest.approx(5 / 50)
    assert m.mean_iters == pytest.approx(13 / 5)


def test_threads_env(monkeypatch):
    from qpec.simulation import worker_count

    monkeypatch.setenv("QPEC_THREADS", "1")
    assert worker_count() == 1
