import math

import pytest

from sbpoisson import ParameterError, parse_pattern, parse_pattern_list
from sbpoisson.patterns import (
    PatternGraph,
    automorphism_count,
    are_isomorphic,
    complete_graph,
    copy_count,
    cycle_graph,
    density_and_balance,
    enumerate_copies,
    gamma_eta,
    is_strictly_balanced,
    labeled_copies,
    overlap_table,
    path_graph,
    shared_edge_stats,
    single_edge,
    star_graph,
)


KNOWN_AUTOMORPHISMS = [
    (single_edge(), 2),
    (cycle_graph(3), 6),
    (cycle_graph(4), 8),
    (cycle_graph(5), 10),
    (path_graph(2), 2),
    (path_graph(3), 2),
    (complete_graph(4), 24),
    (star_graph(3), 6),
]


@pytest.mark.parametrize("H,expected", KNOWN_AUTOMORPHISMS)
def test_automorphism_counts(H, expected):
    assert automorphism_count(H) == expected


@pytest.mark.parametrize("H,_", KNOWN_AUTOMORPHISMS)
def test_labeled_copy_count_identity(H, _):
    assert len(labeled_copies(H)) == math.factorial(H.v) // automorphism_count(H)


def test_pattern_validation():
    with pytest.raises(ParameterError):
        PatternGraph(3, frozenset([(0, 1)]))  # isolated vertex
    with pytest.raises(ParameterError):
        PatternGraph(2, frozenset())
    with pytest.raises(ParameterError):
        PatternGraph(2, frozenset([(1, 0)]))  # unsorted pair


def test_parse_builtins_and_edge_lists():
    assert are_isomorphic(parse_pattern("triangle"), cycle_graph(3))
    assert are_isomorphic(parse_pattern("cycle_4"), cycle_graph(4))
    assert are_isomorphic(parse_pattern("path_2"), path_graph(2))
    custom = parse_pattern("v=4; edges=1-2,2-3,3-4,4-1")
    assert are_isomorphic(custom, cycle_graph(4))
    both = parse_pattern_list("triangle,edge")
    assert len(both) == 2
    with pytest.raises(ParameterError):
        parse_pattern("hexagon")
    with pytest.raises(ParameterError):
        parse_pattern("v=3; edges=1-1")


def test_copy_count_matches_enumeration():
    for H in (single_edge(), cycle_graph(3), cycle_graph(4), path_graph(2)):
        for n in (H.v, H.v + 1, H.v + 2):
            copies = enumerate_copies(H, n)
            assert len(copies) == copy_count(H, n)
            assert len(set(copies)) == len(copies)


def test_density_and_balance():
    dens, balanced, witness = density_and_balance(cycle_graph(4))
    assert dens == pytest.approx(1.0)
    assert balanced
    # A triangle with a pendant edge has a denser proper subgraph (the triangle).
    paw = parse_pattern("v=4; edges=1-2,2-3,1-3,3-4")
    dens, balanced, witness = density_and_balance(paw)
    assert dens == pytest.approx(1.0)
    assert not balanced
    assert are_isomorphic(witness, cycle_graph(3))
    assert is_strictly_balanced(single_edge())


def test_overlap_table_pair_count_identity():
    cases = [
        (cycle_graph(3), cycle_graph(3)),
        (cycle_graph(3), cycle_graph(4)),
        (path_graph(2), path_graph(2)),
        (single_edge(), cycle_graph(3)),
    ]
    for H_i, H_j in cases:
        table = overlap_table(H_i, H_j)
        for n in (H_i.v + H_j.v, H_i.v + H_j.v + 2):
            assert table.total_pairs(n) == copy_count(H_i, n) * copy_count(H_j, n)


def test_overlap_table_identical_pair_entry():
    tri = cycle_graph(3)
    table = overlap_table(tri, tri)
    assert table.identical_k == 3
    # The identical pair is the only way two triangle copies share 3 edges.
    assert table.entries[(3, 3)] == len(labeled_copies(tri)) * 1


def test_shared_edge_stats_triangle_self():
    tri = cycle_graph(3)
    stats = shared_edge_stats(tri, tri)
    assert stats.M == 1
    assert stats.K == frozenset({1})
    assert stats.ell == {1: 2}
    full = shared_edge_stats(tri, tri, include_identical=True)
    assert full.K == frozenset({1, 3})
    assert full.ell[3] == 3


def test_shared_edge_stats_triangle_square():
    stats = shared_edge_stats(cycle_graph(3), cycle_graph(4))
    assert stats.K == frozenset({1, 2})
    assert stats.ell == {1: 2, 2: 3}
    assert stats.M == 2


def test_gamma_eta_triangle():
    ge = gamma_eta(cycle_graph(3), 1.0)
    # Proper subgraphs with edges: one edge (2 - 1) and two edges (3 - 2).
    assert ge.gamma_subgraph == pytest.approx(1.0)
    assert ge.gamma_overlap == pytest.approx(2 - 1 / 1.0)
    assert ge.gamma_overlap_full == pytest.approx(min(1.0, 3 - 3 / 1.0))
    assert ge.eta == pytest.approx(0.0)


def test_gamma_eta_supercritical_direction():
    ge = gamma_eta(cycle_graph(3), 0.5)  # denser-than-critical scaling
    assert ge.eta == pytest.approx(3 * (1.0 / 0.5 - 1.0))
    assert ge.eta > 0
