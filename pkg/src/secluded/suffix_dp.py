"""Exact secluded paths on unweighted undirected graphs of bounded degree.

States are suffixes: the last ``L = D + 1`` nodes of a partial walk from the
source (``D`` = max degree).  Two nodes of an optimal path that share a
neighbor are at most ``D + 1`` apart along it, so the marginal exposure of a
new node only depends on the current suffix:

    f(sigma, i) = min over predecessors sigma' of
                  f(sigma', i - 1) + |N[sigma[-1]] \\ N[sigma']|

``f`` is an upper bound on the exposure of the reconstructed walk, and is
exact on suffixes of optimal paths.  Paths too short to carry an ``L``-suffix
are searched exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetError, InfeasibleError, InputError, UnsupportedError
from .graph import Graph, PathSeq, cost, reachable
from .oracle import OptResult

DEFAULT_DEGREE_GUARD = 4

SuffixState = tuple[int, ...]


@dataclass
class DpTable:
    """Per path length ``i``: ``{suffix: (f, predecessor suffix or None)}``."""

    source: int
    suffix_length: int
    layers: dict[int, dict[SuffixState, tuple[int, SuffixState | None]]]

    def value(self, sigma: SuffixState, i: int) -> float:
        entry = self.layers.get(i, {}).get(sigma)
        return float("inf") if entry is None else entry[0]

    def walk(self, sigma: SuffixState, i: int) -> list[int]:
        """The reconstructed walk ``pi(sigma, i)``; may revisit nodes."""
        tail = []
        while i > self.suffix_length:
            tail.append(sigma[-1])
            sigma = self.layers[i][sigma][1]
            i -= 1
        return list(sigma) + tail[::-1]

    def entries(self) -> Iterator[tuple[SuffixState, int, int]]:
        for i, layer in self.layers.items():
            for sigma, (f, _) in layer.items():
                yield sigma, i, f


def _paths_from(g: Graph, start: list[int], length: int) -> Iterator[tuple[int, ...]]:
    """Simple paths of exactly ``length`` nodes extending ``start``."""
    path = list(start)
    on = set(path)

    def rec():
        if len(path) == length:
            yield tuple(path)
            return
        for v in g.neighbors(path[-1]):
            if v not in on:
                path.append(v)
                on.add(v)
                yield from rec()
                on.discard(v)
                path.pop()

    yield from rec()


def enumerate_suffixes(g: Graph, length: int) -> Iterator[SuffixState]:
    """Every simple path with exactly ``length`` nodes, once per orientation."""
    if length < 2:
        raise InputError("suffix length must be at least 2")
    for u in range(g.n):
        yield from _paths_from(g, [u], length)


def next_states(g: Graph, sigma: SuffixState) -> list[SuffixState]:
    """Shift ``sigma`` left by one, appending a neighbor of its last node not in it."""
    members = set(sigma)
    return [sigma[1:] + (u,) for u in g.neighbors(sigma[-1]) if u not in members]


def loop_erase(walk: list[int]) -> list[int]:
    """Chronological loop erasure: the result is simple with the same endpoints."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for u in walk:
        if u in pos:
            cut = pos[u]
            for v in out[cut + 1 :]:
                del pos[v]
            del out[cut + 1 :]
        else:
            pos[u] = len(out)
            out.append(u)
    return out


def _check_input(g: Graph, s: int, t: int | None, guard: int) -> int:
    if g.directed or g.weighted:
        raise UnsupportedError("the suffix DP is exact only on unweighted undirected graphs")
    g.check_node(s)
    if t is not None:
        g.check_node(t)
        if s == t:
            raise InputError("source and target must differ")
    d = g.max_degree()
    if d > guard:
        raise BudgetError(f"max degree {d} exceeds the guard {guard}")
    return max(d + 1, 2)


def suffix_dp_table(
    g: Graph,
    s: int,
    suffix_length: int | None = None,
    target: int | None = None,
    guard: int = DEFAULT_DEGREE_GUARD,
) -> DpTable:
    """Fill the table layer by layer up to path length ``n``.

    With ``target`` set, states whose value already exceeds the best value
    found at ``target`` are dropped; ``f`` never decreases along a chain, so
    this leaves the answer unchanged.
    """
    length = _check_input(g, s, target, guard)
    if suffix_length is not None:
        length = suffix_length
    layer: dict[SuffixState, tuple[int, SuffixState | None]] = {}
    for sigma in _paths_from(g, [s], length):
        layer[sigma] = (cost(g, sigma).exposure, None)
    layers = {length: layer}
    best = min((f for sig, (f, _) in layer.items() if sig[-1] == target), default=None)
    nbhd_cache: dict[SuffixState, frozenset[int]] = {}

    def nbhd(sigma: SuffixState) -> frozenset[int]:
        out = nbhd_cache.get(sigma)
        if out is None:
            out = frozenset().union(*(g.closed(u) for u in sigma))
            nbhd_cache[sigma] = out
        return out

    for i in range(length + 1, g.n + 1):
        prev, layer = layer, {}
        for sp in sorted(prev):
            fp = prev[sp][0]
            if best is not None and fp >= best:
                continue
            around = nbhd(sp)
            for sigma in next_states(g, sp):
                val = fp + len(g.closed(sigma[-1]) - around)
                old = layer.get(sigma)
                # predecessors arrive in increasing order, so strict < keeps the smaller one
                if old is None or val < old[0]:
                    layer[sigma] = (val, sp)
        if not layer:
            break
        layers[i] = layer
        if target is not None:
            here = min((f for sig, (f, _) in layer.items() if sig[-1] == target), default=None)
            if here is not None and (best is None or here < best):
                best = here
    return DpTable(s, length, layers)


def _short_paths(g: Graph, s: int, t: int, max_nodes: int) -> Iterator[tuple[int, ...]]:
    path = [s]
    on = {s}

    def rec():
        u = path[-1]
        if u == t:
            yield tuple(path)
            return
        if len(path) == max_nodes:
            return
        for v in g.neighbors(u):
            if v not in on:
                path.append(v)
                on.add(v)
                yield from rec()
                on.discard(v)
                path.pop()

    yield from rec()


def secluded_path_bounded_degree(
    g: Graph, s: int, t: int, guard: int = DEFAULT_DEGREE_GUARD
) -> OptResult:
    """Minimum-exposure ``s``-``t`` path in ``O(n^(D+3))`` time."""
    length = _check_input(g, s, t, guard)
    if t not in reachable(g, [s]):
        raise InfeasibleError(f"node {t} is unreachable from {s}")

    candidates = []
    for p in _short_paths(g, s, t, length - 1):
        candidates.append((cost(g, p).exposure, len(p), p))

    table = suffix_dp_table(g, s, target=t, guard=guard)
    explored = 0
    for i, layer in table.layers.items():
        explored += len(layer)
        for sigma, (f, _) in layer.items():
            if sigma[-1] == t:
                candidates.append((f, i, sigma, "dp"))
    if not candidates:
        raise InfeasibleError(f"node {t} is unreachable from {s}")
    best = min(candidates, key=lambda c: c[:3])
    if len(best) == 4:
        path = tuple(loop_erase(table.walk(best[2], best[1])))
    else:
        path = best[2]
    return OptResult(PathSeq(path), cost(g, path), explored, True, "dp-degree")
