import numpy as np
import pytest

from ibmap.citests import BayesianTest, TestCache
from ibmap.graph import Structure, Triplet
from ibmap.gsmn import gsmn_learn
from ibmap.metrics import edge_hamming
from ibmap.synth import (
    W_HI,
    W_LO,
    PairwiseModel,
    exact_pair_agreement,
    gibbs_sample,
    random_parameters,
    random_structure,
)


def test_structure_small_and_errors():
    assert random_structure(2, 1, 0).edges() == [(0, 1)]
    with pytest.raises(ValueError):
        random_structure(4, 4, 0)
    with pytest.raises(ValueError):
        random_structure(4, 0, 0)


def test_structure_degrees():
    degrees = []
    for seed in range(1000):
        g = random_structure(12, 1, seed)
        deg = [g.degree(v) for v in range(12)]
        assert min(deg) >= 1
        degrees.append(np.mean(deg))
    assert 1 <= np.mean(degrees) <= 2


def test_structure_deterministic():
    assert random_structure(10, 2, 42) == random_structure(10, 2, 42)


def test_weight_bounds():
    for seed in range(1000):
        m = random_parameters(random_structure(5, 1, seed), seed)
        assert all(W_LO <= abs(w) <= W_HI for w in m.weights.values())


def test_weights_roundtrip_and_validation():
    g = random_structure(6, 2, 1)
    m = random_parameters(g, 1)
    assert PairwiseModel.loads(g, m.dumps_weights()) == m
    with pytest.raises(ValueError):
        PairwiseModel(g, {})


def test_sample_shape_and_determinism():
    m = random_parameters(random_structure(5, 1, 3), 3)
    a = gibbs_sample(m, 200, 7, burn_in=50)
    assert a.N == 200 and a.arities == (2,) * 5
    assert a == gibbs_sample(m, 200, 7, burn_in=50)
    assert set(np.unique(a.rows)) <= {0, 1}


def test_empty_graph_uniform_marginals():
    m = random_parameters(Structure(4), 0)
    ok = 0
    for seed in range(10):
        d = gibbs_sample(m, 10000, seed, burn_in=100, thin=1)
        means = d.rows.mean(axis=0)
        ok += bool(np.all((means >= 0.48) & (means <= 0.52)))
    assert ok >= 9


def test_empty_graph_pairwise_independence():
    m = random_parameters(Structure(3), 0)
    ok = 0
    for seed in range(10):
        test = BayesianTest(gibbs_sample(m, 5000, seed, burn_in=100, thin=2))
        ok += test(Triplet(0, 1)).posterior_independent > 0.5
    assert ok >= 9


@pytest.mark.parametrize("w", [1.5, -1.5, 0.7])
def test_two_spin_agreement(w):
    m = PairwiseModel(Structure(2, [(0, 1)]), {(0, 1): w})
    d = gibbs_sample(m, 10000, 3)
    agree = float(np.mean(d.rows[:, 0] == d.rows[:, 1]))
    assert agree == pytest.approx(exact_pair_agreement(w), abs=0.02)
    # spin correlation is tanh(w)
    s = 2 * d.rows - 1
    assert float(np.mean(s[:, 0] * s[:, 1])) == pytest.approx(np.tanh(w), abs=0.04)


def test_gsmn_on_large_samples():
    errs = []
    for seed in range(10):
        g = random_structure(12, 1, seed)
        d = gibbs_sample(random_parameters(g, seed), 12000, seed)
        learned, _ = gsmn_learn(BayesianTest(d), TestCache())
        errs.append(edge_hamming(learned, g))
    assert np.mean(errs) <= 2
