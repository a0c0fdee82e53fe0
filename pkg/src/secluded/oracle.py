"""Brute-force exact solvers used as ground truth at desk scale.

Both searches rely on one monotonicity fact: exposure never decreases when
nodes are added, so the exposure of ``prefix + {target}`` (or of
``partial set + all terminals``) bounds every completion from below.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BudgetError, InfeasibleError, InputError, ParseError, UnsupportedError
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

DEFAULT_BUDGET = 10**7


@dataclass(frozen=True)
class OptResult:
    solution: PathSeq | SteinerSolution
    report: CostReport
    nodes_explored: int
    proven_optimal: bool
    algorithm: str = "oracle"

    @property
    def exposure(self) -> Number:
        return self.report.exposure


class _Cover:
    """Multiset of closed neighborhoods with a running exposure total."""

    __slots__ = ("g", "count", "total")

    def __init__(self, g: Graph):
        self.g = g
        self.count = [0] * g.n
        self.total: Number = 0

    def add(self, u: int) -> None:
        g, count = self.g, self.count
        for v in g.closed(u):
            if count[v] == 0:
                self.total += g.weight(v)
            count[v] += 1

    def remove(self, u: int) -> None:
        g, count = self.g, self.count
        for v in g.closed(u):
            count[v] -= 1
            if count[v] == 0:
                self.total -= g.weight(v)

    def extra(self, u: int) -> Number:
        """Exposure ``u`` would add."""
        g, count = self.g, self.count
        return sum((g.weight(v) for v in g.closed(u) if count[v] == 0), 0)


def _seed_path(g: Graph, s: int, t: int) -> list[int]:
    """Cheap feasible path: each node costs the weight of its closed neighborhood."""
    from .approx import _trace, node_weighted_dijkstra

    w = [g.weight_of(g.closed(u)) for u in range(g.n)]
    _, pred = node_weighted_dijkstra(g, [s], w)
    return _trace(pred, t)[::-1]


def _seed_tree(g: Graph, term: list[int]) -> set[int]:
    from .approx import klein_ravi_node_weighted_steiner

    w = [g.weight_of(g.closed(u)) for u in range(g.n)]
    return set(klein_ravi_node_weighted_steiner(g, w, term).nodes)


def exact_secluded_path(
    g: Graph,
    s: int,
    t: int,
    budget: int | None = DEFAULT_BUDGET,
    prune: bool = True,
    warm_start: Sequence[int] | None = None,
) -> OptResult:
    """Minimum-exposure simple ``s``-``t`` path by pruned depth-first search.

    Among equal exposures the shortest path wins, then the lexicographically
    smallest node sequence; neighbors are tried in increasing id order so the
    first path found for a given (exposure, length) is the smallest one.

    ``warm_start`` is a known feasible path; its exposure caps the search
    without affecting which optimum is returned.
    """
    g.check_node(s)
    g.check_node(t)
    if s == t:
        raise InputError("source and target must differ")
    if t not in reachable(g, [s]):
        raise InfeasibleError(f"node {t} is unreachable from {s}")

    fallback = list(warm_start) if warm_start is not None else None
    bound: Number = math.inf
    if prune:
        seeds = [_seed_path(g, s, t)] + ([fallback] if fallback else [])
        for p in seeds:
            e = cost(g, p).exposure
            if e < bound:
                bound, fallback = e, p

    cover = _Cover(g)
    cover.add(s)
    closed_w = [g.weight_of(g.closed(u)) for u in range(g.n)]
    path = [s]
    on_path = [False] * g.n
    on_path[s] = True
    best_key: tuple | None = None
    best_path: tuple[int, ...] | None = None
    explored = 1
    exhausted = False

    stack = [iter(g.neighbors(s))]
    while stack:
        try:
            v = next(stack[-1])
        except StopIteration:
            stack.pop()
            u = path.pop()
            on_path[u] = False
            cover.remove(u)
            continue
        if on_path[v]:
            continue
        if v == t:
            key = (cover.total + cover.extra(t), len(path) + 1)
            if best_key is None or key < best_key:
                best_key, best_path = key, tuple(path) + (t,)
            continue
        if budget is not None and explored >= budget:
            exhausted = True
            break
        # O(1) screen before touching the cover: N[v] alone already exceeds the cap
        if prune and (
            closed_w[v] > bound or (best_key is not None and closed_w[v] > best_key[0])
        ):
            continue
        cover.add(v)
        explored += 1
        if prune:
            lb = (cover.total + cover.extra(t), len(path) + 2)
            if lb[0] > bound or (best_key is not None and lb >= best_key):
                cover.remove(v)
                continue
        path.append(v)
        on_path[v] = True
        stack.append(iter(g.neighbors(v)))

    if best_path is None:
        if fallback is not None:
            return OptResult(PathSeq(tuple(fallback)), cost(g, fallback), explored, False)
        raise BudgetError("search budget exhausted before any path was found")
    return OptResult(PathSeq(best_path), cost(g, best_path), explored, not exhausted)


def exact_secluded_steiner(
    g: Graph,
    terminals: Iterable[int],
    budget: int | None = DEFAULT_BUDGET,
    prune: bool = True,
    warm_start: Iterable[int] | None = None,
) -> OptResult:
    """Minimum-exposure tree spanning ``terminals``.

    Exposure depends only on the node set, so the search enumerates connected
    node sets containing the smallest terminal (each exactly once, by
    include/exclude branching on the frontier) and returns a spanning tree of
    the best one.  Ties: fewer nodes, then the smaller sorted node tuple.
    """
    if g.directed:
        raise UnsupportedError("secluded Steiner trees are defined for undirected graphs")
    term = sorted({g.check_node(u) for u in terminals})
    if len(term) < 2:
        raise InputError("need at least two terminals")
    seed = term[0]
    if not set(term) <= reachable(g, [seed]):
        raise InfeasibleError("terminals are not mutually connected")
    term_set = frozenset(term)

    fallback = set(warm_start) if warm_start is not None else None
    bound: Number = math.inf
    if prune:
        seeds = [_seed_tree(g, term)] + ([fallback] if fallback else [])
        for nodes in seeds:
            e = cost(g, nodes).exposure
            if e < bound:
                bound, fallback = e, nodes

    # The cover always holds N[S ∪ terminals]; its total is the lower bound.
    cover = _Cover(g)
    for u in term:
        cover.add(u)
    members = {seed}
    closed_w = [g.weight_of(g.closed(u)) for u in range(g.n)]
    forbidden: set[int] = set()
    best: list = [None, None]  # key, node tuple
    explored = [0]
    exhausted = [False]

    def missing_terminals_reachable() -> bool:
        todo = term_set - members
        if not todo:
            return True
        allowed = set(range(g.n)) - forbidden
        return todo <= reachable(g, members, allowed)

    def rec(ext: list[int]) -> None:
        explored[0] += 1
        if budget is not None and explored[0] > budget:
            exhausted[0] = True
            return
        lb = (cover.total, len(members | term_set))
        if prune:
            if lb[0] > bound or (best[0] is not None and lb > best[0]):
                return
        if term_set <= members:
            key = lb + (tuple(sorted(members)),)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, tuple(sorted(members))
            return
        if prune and not missing_terminals_reachable():
            return
        added_forbidden = []
        ext_set = set(ext)
        for i, v in enumerate(ext):
            fresh = [
                u
                for u in g.neighbors(v)
                if u not in members and u not in forbidden and u not in ext_set
            ]
            hopeless = prune and (
                closed_w[v] > bound or (best[0] is not None and closed_w[v] > best[0][0])
            )
            if not hopeless:
                members.add(v)
                if v not in term_set:
                    cover.add(v)
                rec(ext[i + 1 :] + fresh)
                if v not in term_set:
                    cover.remove(v)
                members.discard(v)
            if exhausted[0]:
                break
            forbidden.add(v)
            added_forbidden.append(v)
            if v in term_set:
                break
        for v in added_forbidden:
            forbidden.discard(v)

    rec(list(g.neighbors(seed)))

    if best[1] is None:
        if fallback is not None:
            sol = tree_from_nodes(g, fallback, term_set, prune=False)
            return OptResult(sol, cost(g, fallback), explored[0], False)
        if exhausted[0]:
            raise BudgetError("search budget exhausted before any tree was found")
        raise InfeasibleError("no tree spans the terminals")
    nodes = best[1]
    sol = tree_from_nodes(g, nodes, term_set, prune=False)
    return OptResult(sol, cost(g, nodes), explored[0], not exhausted[0])


def min_node_weight_steiner(g: Graph, terminals: Iterable[int], weights: Sequence[Number]):
    """Exact minimum node-weight connected set spanning ``terminals``.

    Plain enumeration of connected supersets of the terminals; intended for
    checking the node-weighted Steiner heuristic on graphs with n <= 12.
    Returns ``(weight, sorted node tuple)``.
    """
    term = frozenset(terminals)
    others = [u for u in range(g.n) if u not in term]
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = term | set(extra)
            if reachable(g, [min(term)], nodes) != nodes:
                continue
            key = (sum((weights[u] for u in nodes), 0), len(nodes), tuple(sorted(nodes)))
            if best is None or key < best:
                best = key
    if best is None:
        raise InfeasibleError("no tree spans the terminals")
    return best[0], best[2]


VC_GUARD = 24


def exact_vertex_cover(g: Graph) -> list[int]:
    """Minimum vertex cover; the lexicographically smallest among the minimum ones."""
    if g.directed:
        raise UnsupportedError("vertex cover expects an undirected graph")
    if g.n > VC_GUARD:
        raise BudgetError(f"vertex cover oracle limited to {VC_GUARD} nodes")
    edges = g.edges()
    if not edges:
        return []
    for k in range(1, g.n + 1):
        for combo in itertools.combinations(range(g.n), k):
            chosen = set(combo)
            if all(u in chosen or v in chosen for u, v in edges):
                return list(combo)
    raise AssertionError("unreachable: the full node set is a cover")


# -- red-blue set cover --------------------------------------------------


@dataclass(frozen=True)
class RbscInstance:
    """Blue ids ``0..blue_count-1``, red ids ``0..red_count-1``; each set is (blues, reds)."""

    blue_count: int
    red_count: int
    sets: tuple[tuple[frozenset[int], frozenset[int]], ...] = field(default=())

    def __post_init__(self):
        sets = tuple((frozenset(b), frozenset(r)) for b, r in self.sets)
        object.__setattr__(self, "sets", sets)
        for b, r in sets:
            if any(not 0 <= x < self.blue_count for x in b):
                raise InputError("set references an unknown blue element")
            if any(not 0 <= x < self.red_count for x in r):
                raise InputError("set references an unknown red element")
        covered = set().union(*(b for b, _ in sets)) if sets else set()
        if covered != set(range(self.blue_count)):
            raise InfeasibleError("some blue element lies in no set")

    def sets_containing(self, blue: int) -> list[int]:
        return [j for j, (b, _) in enumerate(self.sets) if blue in b]


RBSC_GUARD = 20


def exact_rbsc(inst: RbscInstance) -> tuple[list[int], int]:
    """Subfamily covering every blue while touching the fewest reds.

    Ties: fewer sets, then the lexicographically smallest id list.
    """
    m = len(inst.sets)
    if m > RBSC_GUARD:
        raise BudgetError(f"RBSC oracle limited to {RBSC_GUARD} sets")
    all_blue = frozenset(range(inst.blue_count))
    best = None
    for r in range(1, m + 1):
        for combo in itertools.combinations(range(m), r):
            blues = frozenset().union(*(inst.sets[j][0] for j in combo))
            if blues != all_blue:
                continue
            reds = len(frozenset().union(*(inst.sets[j][1] for j in combo)))
            key = (reds, r, combo)
            if best is None or key < best:
                best = key
    if best is None:
        raise InfeasibleError("blue elements cannot be covered")
    return list(best[2]), best[0]


def emit_rbsc(inst: RbscInstance) -> str:
    lines = ["rbsc v1", f"b {inst.blue_count} r {inst.red_count} s {len(inst.sets)}"]
    for j, (b, r) in enumerate(inst.sets):
        items = [f"b{x}" for x in sorted(b)] + [f"r{x}" for x in sorted(r)]
        lines.append(f"set {j} : " + " ".join(items))
    return "\n".join(lines) + "\n"


def parse_rbsc(text: str) -> RbscInstance:
    rows = [
        (i, line.split("#", 1)[0].strip())
        for i, line in enumerate(text.splitlines(), 1)
    ]
    rows = [(i, line) for i, line in rows if line]
    if not rows or rows[0][1] != "rbsc v1":
        raise ParseError("missing header 'rbsc v1'", rows[0][0] if rows else 1)
    if len(rows) < 2:
        raise ParseError("missing size line", rows[0][0] + 1)
    lineno, line = rows[1]
    tok = line.split()
    if len(tok) != 6 or tok[0::2] != ["b", "r", "s"]:
        raise ParseError("expected 'b <count> r <count> s <count>'", lineno)
    try:
        nb, nr, ns = (int(x) for x in tok[1::2])
    except ValueError:
        raise ParseError("counts must be integers", lineno) from None
    sets: list[tuple[set[int], set[int]] | None] = [None] * ns
    for lineno, line in rows[2:]:
        tok = line.split()
        if len(tok) < 3 or tok[0] != "set" or tok[2] != ":":
            raise ParseError("expected 'set <id> : b<i>... r<j>...'", lineno)
        try:
            sid = int(tok[1])
        except ValueError:
            raise ParseError("set id must be an integer", lineno) from None
        if not 0 <= sid < ns or sets[sid] is not None:
            raise ParseError(f"bad or repeated set id {sid}", lineno)
        blues, reds = set(), set()
        for item in tok[3:]:
            kind, num = item[:1], item[1:]
            if kind not in ("b", "r") or not num.isdigit():
                raise ParseError(f"bad element {item!r}", lineno)
            x = int(num)
            if kind == "b":
                if x >= nb:
                    raise ParseError(f"unknown blue element {x}", lineno)
                blues.add(x)
            else:
                if x >= nr:
                    raise ParseError(f"unknown red element {x}", lineno)
                reds.add(x)
        sets[sid] = (blues, reds)
    if any(s is None for s in sets):
        raise ParseError("missing set lines", rows[-1][0])
    return RbscInstance(nb, nr, tuple(sets))
