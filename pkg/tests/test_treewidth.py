import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secluded.errors import BudgetError, InfeasibleError, ParseError, UnsupportedError
from secluded.generators import random_graph
from secluded.graph import Graph, closed_neighborhood, complete_graph, cost, cycle_graph, path_graph, reachable, tree_from_nodes
from secluded.oracle import exact_secluded_steiner
from secluded.treewidth import (
    BagConfiguration,
    TreeDecomposition,
    compatible,
    emit_td,
    enumerate_legal_configurations,
    min_fill_tree_decomposition,
    normalize_decomposition,
    parse_td,
    run_treewidth_dp,
    separation_terms,
    solve_treewidth_secluded_steiner,
    validate_decomposition,
)

from corpus import treewidth_corpus


def test_min_fill_widths():
    assert min_fill_tree_decomposition(path_graph(6)).width == 1
    assert min_fill_tree_decomposition(cycle_graph(4)).width == 2
    assert min_fill_tree_decomposition(complete_graph(4)).width == 3


def test_min_fill_on_disconnected_graph_is_valid():
    g = Graph(5, [(0, 1), (2, 3)])
    td = min_fill_tree_decomposition(g)
    assert validate_decomposition(td, g)[0]


def test_validate_reasons():
    g = path_graph(3)
    good = TreeDecomposition([frozenset({0, 1}), frozenset({1, 2})], [(0, 1)], 0)
    assert validate_decomposition(good, g)[0]
    missing = TreeDecomposition([frozenset({0, 1})], [], 0)
    assert validate_decomposition(missing, g) == (False, "vertex missing from every bag")
    uncovered = TreeDecomposition([frozenset({0, 1}), frozenset({2})], [(0, 1)], 0)
    assert validate_decomposition(uncovered, g) == (False, "edge (1,2) not covered")
    broken = TreeDecomposition(
        [frozenset({0, 1}), frozenset({2}), frozenset({1, 2})], [(0, 1), (1, 2)], 0)
    assert validate_decomposition(broken, g) == (False, "bags holding 1 are not connected")


def test_normalize_makes_binary_and_roots_at_terminal():
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    star = TreeDecomposition(
        [frozenset({0}), frozenset({0, 1}), frozenset({0, 2}), frozenset({0, 3})],
        [(0, 1), (0, 2), (0, 3)], 0)
    nice = normalize_decomposition(star, g, [3])
    assert validate_decomposition(nice, g)[0]
    assert all(len(ch) <= 2 for ch in nice.children())
    assert 3 in nice.bags[nice.root]


def test_normalize_keeps_chain():
    g = path_graph(4)
    chain = TreeDecomposition([frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3})], [(0, 1), (1, 2)], 0)
    nice = normalize_decomposition(chain, g, [0])
    assert sorted(nice.bags) == sorted(chain.bags)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6), st.floats(0.1, 0.7))
def test_normalized_heuristic_output_is_valid(n, seed, p):
    g = random_graph(n, "gnp", seed, p=p)
    td = min_fill_tree_decomposition(g)
    assert validate_decomposition(td, g)[0]
    nice = normalize_decomposition(td, g, [0])
    assert validate_decomposition(nice, g)[0]
    assert all(len(ch) <= 2 for ch in nice.children())


def test_configurations_terminal_singleton():
    cfgs = enumerate_legal_configurations({4}, {4}, 2)
    assert [c.colors for c in cfgs] == [(1,)]


def test_configurations_free_pair():
    cfgs = enumerate_legal_configurations({0, 1}, set(), 3, path_graph(3).subgraph([0, 2])[0])
    # each vertex untouched, exposed or in the tree; two tree vertices may share a component
    assert len(cfgs) == 3 * 3 - 1 + 2
    assert len({c.colors for c in cfgs}) == len(cfgs)
    assert (1, 2) in {c.colors for c in cfgs} and (2, 1) not in {c.colors for c in cfgs}


def test_configurations_l2():
    g = path_graph(2)
    cfgs = {c.colors for c in enumerate_legal_configurations({0, 1}, set(), 3, g)}
    assert (1, 0) not in cfgs and (0, 1) not in cfgs
    assert (1, 2) not in cfgs  # adjacent tree vertices share a component
    assert (1, 1) in cfgs


def test_compatible_examples():
    g = path_graph(3)
    cfg = BagConfiguration((0, 1), (1, 1), 3)
    assert compatible(cfg, cfg, g=g)
    # child puts 1 in the tree, parent leaves its neighbour 2 untouched
    child = BagConfiguration((0, 1), (1, 1), 3)
    parent = BagConfiguration((1, 2), (1, 0), 3)
    assert not compatible(parent, child, g=g)
    # two child components merged in the parent with no edge to support it
    h = Graph(3, [(0, 2), (1, 2)])
    child = BagConfiguration((0, 1, 2), (1, 2, 0), 4)
    parent = BagConfiguration((0, 1), (1, 1), 3)
    assert not compatible(parent, child, g=h)


def _tree_oracle(g, terminals):
    """Exposure of the minimal subtree spanning ``terminals`` of a tree graph."""
    nodes = set(range(g.n))
    return cost(g, tree_from_nodes(g, nodes, terminals, prune=True).nodes).exposure


def test_examples():
    assert solve_treewidth_secluded_steiner(path_graph(5), [0, 4]).exposure == 5
    g = Graph(3, [(0, 1), (1, 2)], weights=[10, 1, 10])
    res = solve_treewidth_secluded_steiner(g, [0, 2])
    assert res.exposure == 21 and res.algorithm == "dp-treewidth"


def test_tree_graphs_match_minimal_subtree():
    for seed in range(30):
        g = random_graph(10, "tree", seed)
        for term in [(0, 9), (1, 5, 7), (2, 3, 6, 8)]:
            assert solve_treewidth_secluded_steiner(g, term).exposure == _tree_oracle(g, term)


def test_matches_oracle():
    for g, sets in treewidth_corpus(30, max_n=10, seed=21):
        for term in sets:
            res = solve_treewidth_secluded_steiner(g, term)
            assert res.exposure == exact_secluded_steiner(g, term).exposure


def test_weights_override():
    g = path_graph(3)
    assert solve_treewidth_secluded_steiner(g, [0, 2], weights=[1, 5, 1]).exposure == 7


def test_backtracked_forest_agrees_with_configuration():
    # omega marks a vertex exposed in the final tree; its tree neighbour may sit above
    # the bag, so only N[F] within the subtree being active is checked, not equality
    for g, sets in treewidth_corpus(15, max_n=9, seed=22):
        dp = run_treewidth_dp(g, sets[1])
        for i in range(len(dp.td.bags)):
            for cfg in dp.configurations(i)[:8]:
                roles = dp.backtrack(i, cfg.colors)
                forest = {u for u, r in roles.items() if r == 1}
                for u, r in roles.items():
                    if r == 0:
                        assert not any(v in forest for v in g.neighbors(u))
                assert cfg.value == sum(dp.weights[u] for u, r in roles.items() if r != 0)
                comps = {}
                for u in forest:
                    comps[u] = min(reachable(g, [u], forest))
                by_color = {}
                for u, c in zip(cfg.bag, cfg.colors):
                    if 0 < c < cfg.omega:
                        assert u in forest
                        by_color.setdefault(c, set()).add(comps[u])
                assert all(len(v) == 1 for v in by_color.values())
                assert len(set(comps.values())) == len(by_color)


def test_separation_additivity():
    g = cycle_graph(6)
    a, b, s = {0, 1, 2, 3}, {3, 4, 5, 0}, {0, 3}
    for r in range(1, 7):
        for nodes in itertools.combinations(range(6), r):
            if len(reachable(g, [nodes[0]], set(nodes))) != r:
                continue
            terms = separation_terms(g, nodes, a, b, s)
            assert sum(terms) == cost(g, nodes).exposure


def test_separation_rejects_non_separation():
    with pytest.raises(Exception):
        separation_terms(cycle_graph(6), [0], {0, 1, 2}, {3, 4, 5}, set())


def test_td_format_roundtrip():
    td = min_fill_tree_decomposition(cycle_graph(7))
    back = parse_td(emit_td(td))
    assert back.bags == td.bags and sorted(back.edges) == sorted(td.edges)
    with pytest.raises(ParseError):
        parse_td("td v2\n")


def test_guards():
    with pytest.raises(UnsupportedError):
        solve_treewidth_secluded_steiner(Graph(2, [(0, 1)], directed=True), [0, 1])
    with pytest.raises(BudgetError):
        solve_treewidth_secluded_steiner(complete_graph(10), [0, 1])
    with pytest.raises(InfeasibleError):
        solve_treewidth_secluded_steiner(Graph(3, [(0, 1)]), [0, 2])
