import math

import numpy as np
import pytest

from sbpoisson import (
    GraphEnsembleSpec,
    InvariantError,
    ParameterError,
    count_copies,
    count_copies_joint,
    graph_coupling,
    mc_coupling_terms,
    mc_empirical_distance,
    rate_sweep,
    sample_gnp,
)
from sbpoisson.ersim import (
    RateSweepResult,
    SampledGraph,
    exhaustive_coupling_terms,
    exhaustive_h2_graph,
    positive_frequency,
    tail_probability,
)
from sbpoisson.errors import ResourceError
from sbpoisson.patterns import cycle_graph, parse_pattern, path_graph, single_edge

from _oracles import naive_copy_count


def test_sampled_graph_validation_and_adjacency():
    G = SampledGraph(4, [(0, 1), (2, 1)])
    assert G.adjacency[1] == {0, 2}
    with pytest.raises(ParameterError):
        SampledGraph(3, [(0, 3)])


def test_sample_gnp_is_deterministic_per_seed():
    a = sample_gnp(12, 0.3, 5)
    b = sample_gnp(12, 0.3, 5)
    c = sample_gnp(12, 0.3, 6)
    assert a.edges == b.edges
    assert a.edges != c.edges


def test_sample_gnp_edge_frequency():
    hits = 0
    m = 10 * 9 // 2
    trials = 400
    for t in range(trials):
        hits += len(sample_gnp(10, 0.25, t).edges)
    freq = hits / (trials * m)
    assert abs(freq - 0.25) < 0.02


@pytest.mark.parametrize(
    "pattern",
    [single_edge(), cycle_graph(3), cycle_graph(4), path_graph(2), path_graph(3)],
)
def test_count_copies_matches_naive_oracle(pattern):
    rng = np.random.default_rng(123)
    for _ in range(12):
        n = int(rng.integers(pattern.v, 8))
        G = sample_gnp(n, float(rng.uniform(0.2, 0.7)), rng)
        expected = naive_copy_count(n, G.edges, pattern.v, sorted(pattern.edges))
        assert count_copies(G, pattern) == expected


def test_count_copies_empty_graph():
    G = SampledGraph(5, [])
    assert count_copies(G, cycle_graph(3)) == 0
    with pytest.raises(ParameterError):
        count_copies_joint(G, (parse_pattern("complete_6"),))


def test_graph_coupling_is_increasing_and_forces_copy():
    patterns = (cycle_graph(3), cycle_graph(4))
    for seed in range(25):
        rng = np.random.default_rng(seed)
        G = sample_gnp(9, 0.2, rng)
        w = count_copies_joint(G, patterns)
        for i in range(2):
            gc = graph_coupling(G, patterns, i, rng, w=w)
            assert gc.row[i] >= 1
            for j in range(i + 1):
                assert gc.row[j] >= w[j]


def test_mc_terms_match_exhaustive_within_error():
    tri = cycle_graph(3)
    exact = exhaustive_coupling_terms(4, (tri,), 0.35)
    spec = GraphEnsembleSpec(4, 0.35, (tri,))
    mc = mc_coupling_terms(spec, 3000, 3)
    assert abs(mc.diag_terms[0] - exact.diag_terms[0]) <= 4 * mc.diag_stderr[0] + 1e-9


def test_exhaustive_identity_small():
    assert exhaustive_h2_graph(4, (single_edge(),), 0, 0.4) < 1e-12
    assert exhaustive_h2_graph(4, (cycle_graph(3),), 0, 0.3) < 1e-12


def test_exhaustive_enumeration_cap():
    with pytest.raises(ResourceError):
        exhaustive_h2_graph(8, (single_edge(),), 0, 0.5)


def test_mc_empirical_distance_fields():
    spec = GraphEnsembleSpec(8, 0.12, (cycle_graph(3),))
    dist = mc_empirical_distance(spec, 250, 9, bootstrap=50)
    assert dist.dw >= 0
    assert dist.dtv <= dist.dw + dist.truncation_budget + 1e-9
    assert dist.dw_se > 0
    assert dist.trials == 250
    assert dist.truncation_budget < 1e-6


def test_fit_slope_recovers_power_law():
    ns = [10, 20, 40, 80]
    values = [5.0 * n**-1.3 for n in ns]
    slope, se = RateSweepResult.fit_slope(ns, values)
    assert slope == pytest.approx(-1.3, abs=1e-9)
    assert se == pytest.approx(0.0, abs=1e-7)


def test_rate_sweep_requires_three_points():
    with pytest.raises(ParameterError):
        rate_sweep((cycle_graph(3),), 1.0, 1.0, [10, 20], 10, 0)


def test_rate_sweep_rows_are_consistent():
    result = rate_sweep((cycle_graph(3),), 1.0, 1.0, [8, 12, 16], 150, 2)
    assert [r.n for r in result.rows] == [8, 12, 16]
    for row in result.rows:
        assert row.p == pytest.approx(1.0 / row.n)
        assert row.dw >= 0 and row.bracket > 0 and row.bound_t4 > 0


def test_tail_probability_and_positive_frequency():
    freq, cheb = tail_probability(single_edge(), 30, 0.2, 300, 1, eps=0.5)
    assert 0 <= freq <= 1 and cheb > 0
    assert positive_frequency(cycle_graph(3), 20, 0.5, 50, 1) == 1.0
