"""Polynomial approximations for secluded paths and Steiner trees.

* ``approx_secluded_path``: the minimum-DegCost path, within ``sqrt(D)+3``
  of the optimal exposure on unweighted undirected graphs (``D`` = max degree).
* ``approx_secluded_steiner``: best of four constructions, covering the ratio
  menu ``min{D, n/k, sqrt(2n), O(log k (k + sqrt D))}``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InfeasibleError, InputError, UnsupportedError
from .graph import (
    CostReport,
    Graph,
    Number,
    PathSeq,
    SteinerSolution,
    cost,
    reachable,
    tree_from_nodes,
)


class AlgorithmTag(str, Enum):
    DEGCOST_PATH = "DEGCOST_PATH"
    STEINER_2APPROX = "STEINER_2APPROX"
    SPANNING = "SPANNING"
    SQRT2N = "SQRT2N"
    KR_DEGCOST = "KR_DEGCOST"
    BEST_OF = "BEST_OF"


# Deterministic preference when several constituents tie on exposure.
_TAG_ORDER = [
    AlgorithmTag.STEINER_2APPROX,
    AlgorithmTag.SPANNING,
    AlgorithmTag.SQRT2N,
    AlgorithmTag.KR_DEGCOST,
]


@dataclass(frozen=True)
class ApproxOutcome:
    solution: PathSeq | SteinerSolution
    report: CostReport
    algorithm_tag: AlgorithmTag
    claimed_ratio: str
    ratio_bound: float

    @property
    def exposure(self) -> Number:
        return self.report.exposure


def _require_plain(g: Graph) -> None:
    if g.directed or g.weighted:
        raise UnsupportedError("ratio guarantees hold only for unweighted undirected graphs")


def _check_terminals(g: Graph, terminals: Iterable[int], allowed=None) -> list[int]:
    term = sorted({g.check_node(u) for u in terminals})
    if len(term) < 2:
        raise InputError("need at least two terminals")
    if not set(term) <= reachable(g, [term[0]], allowed):
        raise InfeasibleError("terminals are not mutually connected")
    return term


def node_weighted_dijkstra(
    g: Graph, sources: Iterable[int], weight: Sequence[Number], allowed=None
) -> tuple[dict[int, Number], dict[int, int | None]]:
    """Shortest paths where a path pays the weight of every node it enters.

    Sources start at distance 0 (their own weight is not charged).  Ties in
    distance keep the predecessor with the smaller id.
    """
    dist: dict[int, Number] = {}
    pred: dict[int, int | None] = {}
    heap = []
    for s in sources:
        dist[s] = 0
        pred[s] = None
        heap.append((0, s))
    heapq.heapify(heap)
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in g.neighbors(u):
            if allowed is not None and v not in allowed:
                continue
            nd = d + weight[v]
            if v in done:
                continue
            if v not in dist or nd < dist[v] or (
                nd == dist[v] and pred[v] is not None and u < pred[v]
            ):
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def _trace(pred: dict[int, int | None], v: int) -> list[int]:
    out = [v]
    while pred[out[-1]] is not None:
        out.append(pred[out[-1]])
    return out


def min_degcost_path(g: Graph, s: int, t: int) -> PathSeq:
    """``s``-``t`` path minimizing the sum of node degrees (endpoints included)."""
    g.check_node(s)
    g.check_node(t)
    if s == t:
        raise InputError("source and target must differ")
    deg = [g.degree(u) for u in range(g.n)]
    dist, pred = node_weighted_dijkstra(g, [s], deg)
    if t not in dist:
        raise InfeasibleError(f"node {t} is unreachable from {s}")
    return PathSeq(tuple(reversed(_trace(pred, t))))


def approx_secluded_path(g: Graph, s: int, t: int) -> ApproxOutcome:
    _require_plain(g)
    p = min_degcost_path(g, s, t)
    d = g.max_degree()
    return ApproxOutcome(
        p, cost(g, p.nodes), AlgorithmTag.DEGCOST_PATH, "sqrt(D)+3", math.sqrt(d) + 3
    )


# -- Steiner constructions ------------------------------------------------


def steiner_2approx_edges(g: Graph, terminals: Iterable[int], allowed=None) -> SteinerSolution:
    """Metric-closure (Kou-Markowsky-Berman) tree with unit edge costs.

    At most twice the minimum Steiner edge count.  ``allowed`` restricts the
    search to an induced subgraph.
    """
    import networkx as nx
    from networkx.algorithms.approximation import steiner_tree

    term = _check_terminals(g, terminals, allowed)
    h = g.to_networkx()
    if allowed is not None:
        h = h.subgraph(sorted(allowed)).copy()
    h = h.subgraph(nx.node_connected_component(h, term[0])).copy()
    tree = steiner_tree(h, term, method="kou")
    nodes = set(tree.nodes) | set(term)
    return SteinerSolution(frozenset(nodes), frozenset(tree.edges), frozenset(term))


def spanning_tree_pruned(g: Graph, terminals: Iterable[int]) -> SteinerSolution:
    """BFS tree from the smallest terminal, pruned to the terminals."""
    term = _check_terminals(g, terminals)
    comp = reachable(g, [term[0]])
    return tree_from_nodes(g, comp, term, prune=True)


def approx_steiner_sqrt2n(g: Graph, terminals: Iterable[int]) -> ApproxOutcome:
    """Try every degree threshold; keep the best 2-approximate tree.

    For threshold ``gss`` all nodes of degree ``>= gss`` are deleted (terminals
    included); thresholds that disconnect the terminals are skipped.
    """
    _require_plain(g)
    term = _check_terminals(g, terminals)
    best = None
    for gss in range(1, g.n + 1):
        allowed = {u for u in range(g.n) if g.degree(u) < gss}
        if not set(term) <= allowed:
            continue
        if not set(term) <= reachable(g, [term[0]], allowed):
            continue
        sol = steiner_2approx_edges(g, term, allowed)
        rep = cost(g, sol.nodes)
        if best is None or rep.exposure < best[1].exposure:
            best = (sol, rep)
    if best is None:
        raise InfeasibleError("terminals are not mutually connected")
    return ApproxOutcome(
        best[0], best[1], AlgorithmTag.SQRT2N, "sqrt(2n)", math.sqrt(2 * g.n)
    )


def klein_ravi_node_weighted_steiner(
    g: Graph, weights: Sequence[Number], terminals: Iterable[int]
) -> SteinerSolution:
    """Greedy spider merging for node-weighted Steiner trees.

    Each round picks a center ``v`` and ``j >= 2`` current components
    minimizing ``(w(v) + sum of path weights to the components) / j``; nodes
    already in a component are free.  Ties go to the smaller center id, then
    the smaller ``j``.
    """
    if g.directed:
        raise UnsupportedError("node-weighted Steiner expects an undirected graph")
    term = _check_terminals(g, terminals)
    if any(w < 0 for w in weights):
        raise InputError("weights must be nonnegative")
    comp_of = {u: i for i, u in enumerate(term)}
    components: dict[int, set[int]] = {i: {u} for i, u in enumerate(term)}

    while len(components) > 1:
        eff = [0 if u in comp_of else weights[u] for u in range(g.n)]
        searches = {}
        for cid, members in components.items():
            dist, pred = node_weighted_dijkstra(g, members, eff)
            searches[cid] = (dist, pred)
        best = None
        for v in range(g.n):
            legs = []
            for cid in components:
                dist, _ = searches[cid]
                if v in dist:
                    # dist charges v itself; the center is paid once, below
                    d = dist[v] - eff[v]
                    legs.append((d, cid))
            if len(legs) < 2:
                continue
            legs.sort()
            total = eff[v]
            for j, (d, _) in enumerate(legs, 1):
                total += d
                if j < 2:
                    continue
                key = (Fraction(total) / j, v, j)
                if best is None or key < best[0]:
                    best = (key, v, [cid for _, cid in legs[:j]])
        if best is None:
            raise InfeasibleError("terminals are not mutually connected")
        _, v, chosen = best
        merged = {v}
        for cid in chosen:
            _, pred = searches[cid]
            merged.update(_trace(pred, v))
            merged |= components.pop(cid)
        new_id = min(chosen)
        # the center or its legs may touch components that were not chosen
        for cid in [c for c, mem in components.items() if mem & merged]:
            merged |= components.pop(cid)
        components[new_id] = merged
        for u in merged:
            comp_of[u] = new_id
    (nodes,) = components.values()
    return tree_from_nodes(g, nodes, term, prune=True)


def min_degcost_steiner_approx(g: Graph, terminals: Iterable[int]) -> SteinerSolution:
    """O(log k)-approximate minimum-DegCost tree: node-weighted Steiner with W = degree."""
    return klein_ravi_node_weighted_steiner(g, [g.degree(u) for u in range(g.n)], terminals)


def steiner_ratio_bound(g: Graph, k: int) -> float:
    """``min(D, n/k, sqrt(2n))``: the hard part of the Steiner ratio menu."""
    return min(g.max_degree(), g.n / k, math.sqrt(2 * g.n))


def approx_secluded_steiner_all(g: Graph, terminals: Iterable[int]) -> dict[AlgorithmTag, ApproxOutcome]:
    """Every constituent construction, keyed by tag."""
    _require_plain(g)
    term = _check_terminals(g, terminals)
    out = {}
    two = steiner_2approx_edges(g, term)
    out[AlgorithmTag.STEINER_2APPROX] = ApproxOutcome(
        two, cost(g, two.nodes), AlgorithmTag.STEINER_2APPROX, "D", g.max_degree()
    )
    span = spanning_tree_pruned(g, term)
    out[AlgorithmTag.SPANNING] = ApproxOutcome(
        span, cost(g, span.nodes), AlgorithmTag.SPANNING, "n/k", g.n / len(term)
    )
    out[AlgorithmTag.SQRT2N] = approx_steiner_sqrt2n(g, term)
    kr = min_degcost_steiner_approx(g, term)
    out[AlgorithmTag.KR_DEGCOST] = ApproxOutcome(
        kr, cost(g, kr.nodes), AlgorithmTag.KR_DEGCOST, "O(log k (k+sqrt(D)))", math.inf
    )
    return out


def approx_secluded_steiner(g: Graph, terminals: Iterable[int]) -> ApproxOutcome:
    outcomes = approx_secluded_steiner_all(g, terminals)
    pick = min(_TAG_ORDER, key=lambda tag: (outcomes[tag].exposure, _TAG_ORDER.index(tag)))
    chosen = outcomes[pick]
    k = len(chosen.solution.terminals)
    return ApproxOutcome(
        chosen.solution,
        chosen.report,
        AlgorithmTag.BEST_OF,
        "min{D, n/k, sqrt(2n), O(log k (k+sqrt(D)))}",
        steiner_ratio_bound(g, k),
    )
