import pytest

from conftest import path_separated, random_graph
from ibmap.citests import BayesianTest, OracleTest, TestCache
from ibmap.dataset import from_codes
from ibmap.graph import Structure, all_triplets
from ibmap.metrics import (
    edge_hamming,
    exhaustive_independence_hamming,
    format_mean_sd,
    independence_hamming_data,
    independence_hamming_structure,
    ratio_report,
    sample_triplets,
)
from ibmap.synth import gibbs_sample, random_parameters, random_structure


def test_sample_strata_n12():
    ts = sample_triplets(12, 2000, seed=0)
    assert len(ts) == 2000
    assert set(ts.per_cardinality) == set(range(11))
    assert set(ts.per_cardinality.values()) == {181, 182}
    assert ts.per_cardinality[0] == 182 and ts.per_cardinality[10] == 181
    for t in ts.triplets:
        assert t.x < t.y and t.x not in t.z and t.y not in t.z
    assert sample_triplets(12, 2000, seed=0) == ts


def test_sample_n3_and_errors():
    ts = sample_triplets(3, 2, seed=1)
    assert sorted(len(t.z) for t in ts.triplets) == [0, 1]
    with pytest.raises(ValueError):
        sample_triplets(2, 10)
    with pytest.raises(ValueError):
        sample_triplets(5, 3)


def test_edge_hamming_examples():
    tri = Structure(3, [(0, 1), (0, 2), (1, 2)])
    assert edge_hamming(Structure(3), tri) == 3
    g, h = random_graph(8, 0.3, 1), random_graph(8, 0.3, 2)
    assert edge_hamming(g, h) == edge_hamming(h, g)
    assert edge_hamming(g, g) == 0
    with pytest.raises(ValueError):
        edge_hamming(g, Structure(7))


@pytest.mark.parametrize("n", [4, 6, 8])
def test_structure_hi_all_triplets_is_exact(n):
    g, h = random_graph(n, 0.4, n), random_graph(n, 0.4, n + 1)
    triplets = list(all_triplets(n))
    value = independence_hamming_structure(g, h, triplets)
    brute = sum(path_separated(g, t.x, t.y, t.z) != path_separated(h, t.x, t.y, t.z) for t in triplets)
    assert value == brute / len(triplets)
    assert value == exhaustive_independence_hamming(g, h, stratified=False)
    assert 0 <= value <= 1
    assert independence_hamming_structure(g, g, triplets) == 0.0


def test_data_hi_with_oracle_and_cache_bypass():
    gstar = random_structure(7, 2, 0)
    ts = sample_triplets(7, 300, seed=0)
    two_rows = from_codes([[0] * 7, [1] * 7], arities=[2] * 7)
    assert independence_hamming_data(gstar, two_rows, ts, OracleTest(gstar)) == 0.0
    d = gibbs_sample(random_parameters(gstar, 0), 300, 0, burn_in=100, thin=2)
    test = BayesianTest(d)
    g = random_graph(7, 0.3, 5)
    cached_value = independence_hamming_data(g, d, ts, test, TestCache())
    assert cached_value == independence_hamming_data(g, d, ts, test)


def test_ratio_examples():
    r = ratio_report([3, 4, 5], [3, 4, 5])
    assert (r.mean, r.sd) == (1.0, 0.0)
    assert ratio_report([0, 0], [2, 5]).mean == 0.0
    r = ratio_report([0, 2, 1], [0, 0, 2])
    assert r.ratios == [1.0, None, 0.5] and r.undefined == 1
    assert r.mean == pytest.approx(0.75)
    with pytest.raises(ValueError):
        ratio_report([1], [1, 2])
    assert format_mean_sd(0.318, 0.225) == "0.318(0.225)"
    assert str(ratio_report([1, 3], [2, 6])) == "0.500(0.000)"
