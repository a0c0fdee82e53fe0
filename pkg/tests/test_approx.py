import math

import pytest

from secluded.approx import (
    AlgorithmTag,
    approx_secluded_path,
    approx_secluded_steiner,
    approx_secluded_steiner_all,
    klein_ravi_node_weighted_steiner,
    min_degcost_path,
    node_weighted_dijkstra,
    spanning_tree_pruned,
    steiner_2approx_edges,
    steiner_ratio_bound,
)
from secluded.errors import InfeasibleError, UnsupportedError
from secluded.generators import gen_degcost_gap_instance, random_graph
from secluded.graph import Graph, cost, cycle_graph, path_graph, star_graph, validate_path, validate_steiner
from secluded.oracle import exact_secluded_path, exact_secluded_steiner

from corpus import bounded_degree_corpus


def test_degcost_path_examples():
    g = cycle_graph(5)
    assert min_degcost_path(g, 0, 2).nodes == (0, 1, 2)
    out = approx_secluded_path(g, 0, 2)
    assert out.algorithm_tag is AlgorithmTag.DEGCOST_PATH
    assert out.exposure == 5


def test_degcost_path_avoids_hub():
    # 0 - hub - 1 is short but the hub has many leaves; the detour is cheaper
    g = Graph(9, [(0, 2), (2, 1), (2, 3), (2, 4), (2, 5), (2, 6), (0, 7), (7, 8), (8, 1)])
    assert min_degcost_path(g, 0, 1).nodes == (0, 7, 8, 1)


def test_node_weighted_dijkstra_skips_source_weight():
    dist, pred = node_weighted_dijkstra(path_graph(3), [0], [1, 2, 3])
    assert dist == {0: 0, 1: 2, 2: 5}
    assert pred[2] == 1


def test_path_ratio_within_guarantee():
    for g in bounded_degree_corpus(40, max_n=9, seed=9):
        bound = math.sqrt(g.max_degree()) + 3
        for t in range(1, g.n):
            out = approx_secluded_path(g, 0, t)
            assert validate_path(g, out.solution)[0]
            assert out.exposure <= bound * exact_secluded_path(g, 0, t).exposure


def test_path_infeasible():
    with pytest.raises(InfeasibleError):
        approx_secluded_path(Graph(3, [(0, 1)]), 0, 2)


def test_steiner_constituents_are_valid_trees():
    g = random_graph(12, "gnp", 5, p=0.35)
    term = [0, 3, 7]
    outs = approx_secluded_steiner_all(g, term)
    assert set(outs) == {AlgorithmTag.STEINER_2APPROX, AlgorithmTag.SPANNING, AlgorithmTag.SQRT2N,
                         AlgorithmTag.KR_DEGCOST}
    for out in outs.values():
        assert validate_steiner(g, out.solution)[0]
    best = approx_secluded_steiner(g, term)
    assert best.algorithm_tag is AlgorithmTag.BEST_OF
    assert best.exposure == min(o.exposure for o in outs.values())


def test_steiner_ratio_bound_menu():
    g = star_graph(8)
    assert steiner_ratio_bound(g, 4) == min(8, 9 / 4, math.sqrt(18))


def test_steiner_best_within_min_bound():
    for seed in range(30):
        g = random_graph(9, "gnp", seed, p=0.4)
        term = [0, 4, 8]
        try:
            opt = exact_secluded_steiner(g, term).exposure
        except InfeasibleError:
            continue
        out = approx_secluded_steiner(g, term)
        assert out.exposure <= min(g.max_degree(), g.n / 3, math.sqrt(2 * g.n)) * opt


def test_kr_on_gap_instance_finds_the_cheap_tree():
    gi = gen_degcost_gap_instance(4, 5)
    tree = klein_ravi_node_weighted_steiner(gi.graph, [gi.graph.degree(u) for u in range(gi.graph.n)],
                                            gi.terminals)
    assert validate_steiner(gi.graph, tree)[0]


def test_two_approx_and_spanning_on_path():
    g = path_graph(6)
    assert steiner_2approx_edges(g, [1, 4]).nodes == frozenset({1, 2, 3, 4})
    assert spanning_tree_pruned(g, [1, 4]).nodes == frozenset({1, 2, 3, 4})


def test_directed_steiner_unsupported():
    with pytest.raises(UnsupportedError):
        approx_secluded_steiner(Graph(2, [(0, 1)], directed=True), [0, 1])
