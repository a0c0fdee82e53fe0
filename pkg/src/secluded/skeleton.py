"""Exact secluded Steiner trees for max degree <= 3 and at most 3 terminals.

An optimal tree is guessed through its skeleton: terminals plus branch nodes
(skeleton degree >= 3), with every maximal branch-free path contracted to an
edge.  Each skeleton edge is then realized either as a short concrete path or
as a concrete prefix and suffix joined by an *imaginary* edge.  Imaginary
edges are filled in last by an exact secluded path computed in the graph with
the rest of the extended skeleton deleted.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import BudgetError, InfeasibleError, InputError, UnsupportedError
from .graph import Graph, SteinerSolution, cost, exposure, reachable, tree_from_nodes
from .oracle import OptResult
from .suffix_dp import secluded_path_bounded_degree

# Concrete skeleton edges have at most this many edges; longer ones keep
# STUB_EDGES edges at each end around an imaginary middle.
DIRECT_MAX_EDGES = 9
STUB_EDGES = 4


@dataclass(frozen=True)
class Skeleton:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    branch: tuple[int, ...]


def _labeled_trees(m: int) -> Iterator[list[tuple[int, int]]]:
    import networkx as nx

    if m == 1:
        yield []
        return
    if m == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(m), repeat=m - 2):
        yield list(nx.from_prufer_sequence(list(seq)).edges)


def skeleton_count_bound(n: int, k: int) -> int:
    """Upper bound on the skeletons of ``k`` terminals in an ``n``-node graph."""
    total = 0
    for b in range(0, max(k - 2, 0) + 1):
        m = k + b
        total += math.comb(n, b) * max(m, 1) ** max(m - 2, 0)
    return total


def enumerate_skeletons(g: Graph, terminals: Iterable[int]) -> Iterator[Skeleton]:
    """Trees on terminals plus up to ``k - 2`` branch nodes whose leaves are terminals."""
    term = sorted(set(terminals))
    k = len(term)
    pool = [u for u in range(g.n) if u not in term and g.degree(u) >= 3]
    for b in range(0, max(k - 2, 0) + 1):
        for branch in itertools.combinations(pool, b):
            labels = term + list(branch)
            m = len(labels)
            for tree in _labeled_trees(m):
                deg = [0] * m
                for x, y in tree:
                    deg[x] += 1
                    deg[y] += 1
                if any(deg[i] < 3 for i in range(k, m)):
                    continue
                edges = tuple(sorted(tuple(sorted((labels[x], labels[y]))) for x, y in tree))
                yield Skeleton(tuple(sorted(labels)), edges, tuple(branch))


class _Search:
    def __init__(self, g, term, incumbent, budget, direct_max, stub):
        self.g = g
        self.term = term
        self.best_val, self.best_nodes = incumbent
        self.budget = budget
        self.direct_max = direct_max
        self.stub = stub
        self.evaluated = 0
        self.path_cache: dict = {}

    def _paths(self, x, used, max_edges, exact_edges=None, end=None):
        """Simple paths from ``x`` avoiding ``used``, each as its list of new nodes."""
        g = self.g
        path = [x]
        on = {x}

        def rec():
            u = path[-1]
            edges = len(path) - 1
            if end is not None and u == end:
                yield path[1:-1]
                return
            if end is None and edges == exact_edges:
                yield path[1:]
                return
            if edges == max_edges:
                return
            for v in g.neighbors(u):
                if v in on:
                    continue
                if v in used and v != end:
                    continue
                path.append(v)
                on.add(v)
                yield from rec()
                on.discard(v)
                path.pop()

        yield from rec()

    def run(self, sk: Skeleton) -> None:
        used = set(sk.nodes)
        self._extend(list(sk.edges), 0, used, [])

    def _bound(self, used) -> bool:
        return exposure(self.g, used | set(self.term)) < self.best_val

    def _extend(self, edges, i, used, imaginary):
        if not self._bound(used):
            return
        if i == len(edges):
            self._finish(used, imaginary)
            return
        x, y = edges[i]
        for inner in self._paths(x, used, self.direct_max, end=y):
            self._extend(edges, i + 1, used | set(inner), imaginary)
        for pre in self._paths(x, used | {y}, self.stub, exact_edges=self.stub):
            used1 = used | set(pre)
            if not self._bound(used1):
                continue
            for suf in self._paths(y, used1, self.stub, exact_edges=self.stub):
                z, w = pre[-1], suf[-1]
                self._extend(edges, i + 1, used1 | set(suf), imaginary + [(z, w)])

    def _finish(self, used, imaginary):
        self.evaluated += 1
        if self.evaluated > self.budget:
            raise BudgetError(
                f"more than {self.budget} extended skeletons", partial=self.best_nodes
            )
        nodes = set(used)
        for z, w in imaginary:
            removed = frozenset(used - {z, w})
            key = (removed, z, w)
            if key not in self.path_cache:
                self.path_cache[key] = self._fill(removed, z, w)
            filled = self.path_cache[key]
            if filled is None:
                return
            nodes |= filled
        val = exposure(self.g, nodes)
        if val < self.best_val:
            self.best_val, self.best_nodes = val, frozenset(nodes)

    def _fill(self, removed, z, w):
        keep = [u for u in range(self.g.n) if u not in removed]
        sub, old_to_new, new_to_old = self.g.subgraph(keep)
        if old_to_new[w] not in reachable(sub, [old_to_new[z]]):
            return None
        res = secluded_path_bounded_degree(sub, old_to_new[z], old_to_new[w])
        return {new_to_old[u] for u in res.solution.nodes}


def secluded_steiner_fixed_k(
    g: Graph,
    terminals: Iterable[int],
    max_k: int = 3,
    degree_guard: int = 3,
    budget: int = 10**6,
    direct_max_edges: int = DIRECT_MAX_EDGES,
    stub_edges: int = STUB_EDGES,
    warm_start: bool = True,
) -> OptResult:
    """Minimum-exposure Steiner tree by skeleton enumeration.

    With ``warm_start`` the search is seeded with the best approximate tree
    and only keeps strictly better candidates, so the result is never worse
    than it.
    """
    from .approx import approx_secluded_steiner

    if g.directed or g.weighted:
        raise UnsupportedError("skeleton search needs an unweighted undirected graph")
    term = sorted({g.check_node(u) for u in terminals})
    if len(term) < 2:
        raise InputError("need at least two terminals")
    if len(term) > max_k:
        raise BudgetError(f"{len(term)} terminals exceed the limit {max_k}")
    if g.max_degree() > degree_guard:
        raise BudgetError(f"max degree {g.max_degree()} exceeds the guard {degree_guard}")
    if not set(term) <= reachable(g, [term[0]]):
        raise InfeasibleError("terminals are not mutually connected")

    incumbent = (math.inf, None)
    if warm_start:
        seed = approx_secluded_steiner(g, term)
        incumbent = (seed.exposure, seed.solution.nodes)
    search = _Search(g, term, incumbent, budget, direct_max_edges, stub_edges)
    for sk in enumerate_skeletons(g, term):
        search.run(sk)
    sol: SteinerSolution = tree_from_nodes(g, search.best_nodes, term, prune=True)
    return OptResult(sol, cost(g, sol.nodes), search.evaluated, True, "skeleton")
