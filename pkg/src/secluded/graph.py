"""Graph data model and the neighborhood/cost primitives every solver shares.

Exposure of a node set ``S`` is the total weight of its closed neighborhood
``N[S]``: the nodes of ``S`` together with everything adjacent to them.  In a
directed graph only out-neighbors count, so a node is exposed when an arc
leaves ``S`` towards it.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError, ParseError

Number = int | Fraction

FORMAT_HEADER = "secluded-graph v1"


class Graph:
    """Immutable simple graph on nodes ``0..n-1`` with optional node weights.

    ``weights=None`` means every node weighs 1; exposures are then plain
    integers.  Weighted graphs keep exact :class:`~fractions.Fraction`
    weights so optimality comparisons never touch floating point.
    """

    __slots__ = ("_n", "_directed", "_weights", "_adj", "_closed", "_edges")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        directed: bool = False,
        weights: Sequence[Number | str] | None = None,
    ):
        if n < 0:
            raise InputError("node count must be nonnegative")
        adj: list[set[int]] = [set() for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u}, {v}) references an unknown node")
            if u == v:
                raise InputError(f"self-loop at node {u}")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                raise InputError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            adj[u].add(v)
            if not directed:
                adj[v].add(u)
        if weights is not None:
            if len(weights) != n:
                raise InputError("weights must list one value per node")
            ws = tuple(Fraction(w) for w in weights)
            if any(w < 0 for w in ws):
                raise InputError("weights must be nonnegative")
            self._weights: tuple[Fraction, ...] | None = ws
        else:
            self._weights = None
        self._n = n
        self._directed = bool(directed)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._closed = tuple(frozenset(a) | {u} for u, a in enumerate(self._adj))
        self._edges = tuple(sorted(seen))

    # -- basic accessors -------------------------------------------------
    @property
    def n(self) -> int:
        return self._n

    @property
    def directed(self) -> bool:
        return self._directed

    @property
    def weighted(self) -> bool:
        return self._weights is not None

    @property
    def weights(self) -> tuple[Fraction, ...] | None:
        return self._weights

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    def nodes(self) -> range:
        return range(self._n)

    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges sorted; undirected edges are reported once as ``(min, max)``."""
        return self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    def closed(self, u: int) -> frozenset[int]:
        """``N[u]``: ``u`` and its (out-)neighbors."""
        return self._closed[u]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._closed[u] and u != v

    def degree(self, u: int) -> int:
        return len(self._adj[u])

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def weight(self, u: int) -> Number:
        return 1 if self._weights is None else self._weights[u]

    def weight_of(self, nodes: Iterable[int]) -> Number:
        if self._weights is None:
            return sum(1 for _ in nodes)
        w = self._weights
        return sum((w[u] for u in nodes), Fraction(0))

    def check_node(self, u: int) -> int:
        if not isinstance(u, int) or not 0 <= u < self._n:
            raise InputError(f"unknown node id {u!r}")
        return u

    # -- derived graphs --------------------------------------------------
    def with_weights(self, weights: Sequence[Number] | None) -> "Graph":
        return Graph(self._n, self._edges, self._directed, weights)

    def subgraph(self, keep: Iterable[int]) -> tuple["Graph", dict[int, int], list[int]]:
        """Induced subgraph on ``keep``.

        Returns ``(sub, old_to_new, new_to_old)``; new ids follow the sorted
        order of the kept original ids.
        """
        new_to_old = sorted(set(keep))
        old_to_new = {u: i for i, u in enumerate(new_to_old)}
        edges = [
            (old_to_new[u], old_to_new[v])
            for u, v in self._edges
            if u in old_to_new and v in old_to_new
        ]
        ws = None
        if self._weights is not None:
            ws = [self._weights[u] for u in new_to_old]
        return Graph(len(new_to_old), edges, self._directed, ws), old_to_new, new_to_old

    def to_networkx(self):
        import networkx as nx

        h = nx.DiGraph() if self._directed else nx.Graph()
        h.add_nodes_from(range(self._n))
        h.add_edges_from(self._edges)
        return h

    def digest(self) -> str:
        return hashlib.sha256(emit_graph(self).encode()).hexdigest()[:16]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._n == other._n
            and self._directed == other._directed
            and self._weights == other._weights
            and self._edges == other._edges
        )

    def __hash__(self) -> int:
        return hash((self._n, self._directed, self._weights, self._edges))

    def __repr__(self) -> str:
        kind = "directed" if self._directed else "undirected"
        w = ", weighted" if self.weighted else ""
        return f"Graph(n={self._n}, m={len(self._edges)}, {kind}{w})"


# -- solution types ------------------------------------------------------


@dataclass(frozen=True)
class PathSeq:
    nodes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def first(self) -> int:
        return self.nodes[0]

    @property
    def last(self) -> int:
        return self.nodes[-1]

    def subpath(self, x: int, y: int) -> "PathSeq":
        i, j = self.nodes.index(x), self.nodes.index(y)
        if i > j:
            raise InputError(f"{x} does not precede {y} on the path")
        return PathSeq(self.nodes[i : j + 1])

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class SteinerSolution:
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]
    terminals: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(
            self, "edges", frozenset((min(u, v), max(u, v)) for u, v in self.edges)
        )
        object.__setattr__(self, "terminals", frozenset(self.terminals))


@dataclass(frozen=True)
class CostReport:
    exposure: Number
    deg_cost: Number
    neighborhood: tuple[int, ...] = field(default=())


# -- primitives ----------------------------------------------------------


def _node_set(g: Graph, s: Iterable[int]) -> set[int]:
    out = set()
    for u in s:
        out.add(g.check_node(u))
    return out


def closed_neighborhood(g: Graph, s: Iterable[int]) -> list[int]:
    """Sorted ``N[s]``."""
    out: set[int] = set()
    for u in _node_set(g, s):
        out |= g.closed(u)
    return sorted(out)


def exposure(g: Graph, s: Iterable[int]) -> Number:
    """Weight of ``N[s]`` without building a report (``0`` for empty ``s``)."""
    return g.weight_of(closed_neighborhood(g, s))


def cost(g: Graph, s: Iterable[int]) -> CostReport:
    nodes = _node_set(g, s)
    if not nodes:
        raise InputError("cost of an empty node set is undefined")
    nb = closed_neighborhood(g, nodes)
    return CostReport(
        exposure=g.weight_of(nb),
        deg_cost=sum(g.degree(u) for u in nodes),
        neighborhood=tuple(nb),
    )


def diff(g: Graph, p1: Iterable[int], p2: Iterable[int]) -> Number:
    """Weight of ``N[p1] \\ N[p2]``: what ``p1`` adds on top of ``p2``."""
    a, b = _node_set(g, p1), _node_set(g, p2)
    if not a or not b:
        raise InputError("diff needs two nonempty node sets")
    return g.weight_of(set(closed_neighborhood(g, a)) - set(closed_neighborhood(g, b)))


def validate_path(g: Graph, p: PathSeq | Sequence[int]) -> tuple[bool, str]:
    nodes = p.nodes if isinstance(p, PathSeq) else tuple(p)
    if not nodes:
        return False, "empty path"
    for u in nodes:
        if not isinstance(u, int) or not 0 <= u < g.n:
            return False, f"unknown node {u!r}"
    if len(set(nodes)) != len(nodes):
        return False, "repeated node"
    for a, b in zip(nodes, nodes[1:]):
        if b not in g.neighbors(a):
            return False, "non-adjacent step"
    return True, "ok"


def validate_steiner(g: Graph, t: SteinerSolution) -> tuple[bool, str]:
    for u in t.nodes | t.terminals:
        if not 0 <= u < g.n:
            return False, f"unknown node {u!r}"
    if not t.terminals <= t.nodes:
        return False, "terminal uncovered"
    for u, v in t.edges:
        if u not in t.nodes or v not in t.nodes:
            return False, "edge leaves the node set"
        if not (g.has_edge(u, v) or g.has_edge(v, u)):
            return False, "edge not in graph"
    if not t.nodes:
        return False, "empty tree"
    if len(t.edges) != len(t.nodes) - 1:
        if len(t.edges) >= len(t.nodes):
            return False, "cycle"
        return False, "disconnected"
    adj: dict[int, list[int]] = {u: [] for u in t.nodes}
    for u, v in t.edges:
        adj[u].append(v)
        adj[v].append(u)
    start = next(iter(t.nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    if len(seen) != len(t.nodes):
        return False, "disconnected"
    return True, "ok"


def reachable(g: Graph, sources: Iterable[int], allowed=None) -> set[int]:
    """Nodes reachable from ``sources`` along (out-)arcs, staying in ``allowed``."""
    seen = set(sources)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v not in seen and (allowed is None or v in allowed):
                seen.add(v)
                queue.append(v)
    return seen


def is_connected_set(g: Graph, nodes: Iterable[int]) -> bool:
    nodes = set(nodes)
    if not nodes:
        return False
    return reachable(g, [min(nodes)], nodes) == nodes


def tree_from_nodes(
    g: Graph, nodes: Iterable[int], terminals: Iterable[int], prune: bool = True
) -> SteinerSolution:
    """BFS spanning tree of the induced subgraph on ``nodes``.

    With ``prune`` set, non-terminal leaves are stripped repeatedly; this never
    raises exposure, since the neighborhood can only shrink.
    """
    nodes = set(nodes)
    terminals = frozenset(terminals)
    if not nodes:
        raise InputError("empty node set")
    root = min(terminals & nodes) if terminals & nodes else min(nodes)
    parent = {root: None}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if v in nodes and v not in parent:
                parent[v] = u
                queue.append(v)
    if len(parent) != len(nodes):
        raise InputError("node set is not connected")
    edges = {(min(u, p), max(u, p)) for u, p in parent.items() if p is not None}
    if prune:
        deg = {u: 0 for u in nodes}
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        leaves = [u for u in nodes if deg[u] <= 1 and u not in terminals]
        while leaves and len(nodes) > 1:
            u = leaves.pop()
            if u not in nodes or u in terminals or deg[u] > 1:
                continue
            nodes.discard(u)
            for e in [e for e in edges if u in e]:
                edges.discard(e)
                w = e[0] if e[1] == u else e[1]
                deg[w] -= 1
                if deg[w] <= 1 and w not in terminals:
                    leaves.append(w)
    return SteinerSolution(frozenset(nodes), frozenset(edges), terminals)


def shortcuts(g: Graph, path: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs of non-consecutive path positions joined by an edge of ``g``."""
    pos = {u: i for i, u in enumerate(path)}
    out = []
    for i, u in enumerate(path):
        for v in g.neighbors(u):
            j = pos.get(v)
            if j is not None and j > i + 1:
                out.append((i, j))
    return out


# -- text format ---------------------------------------------------------


def _format_weight(w: Fraction) -> str:
    return str(w.numerator) if w.denominator == 1 else f"{w.numerator}/{w.denominator}"


def emit_graph(g: Graph) -> str:
    lines = [
        FORMAT_HEADER,
        f"n {g.n} directed {int(g.directed)} weighted {int(g.weighted)}",
    ]
    if g.weights is not None:
        lines += [f"w {u} {_format_weight(w)}" for u, w in enumerate(g.weights)]
    lines += [f"e {u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno) from None


def parse_graph(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line))
    if not rows or rows[0][1] != FORMAT_HEADER:
        raise ParseError(f"missing header {FORMAT_HEADER!r}", rows[0][0] if rows else 1)
    if len(rows) < 2:
        raise ParseError("missing size line", rows[0][0] + 1)
    lineno, line = rows[1]
    tok = line.split()
    if len(tok) != 6 or tok[0] != "n" or tok[2] != "directed" or tok[4] != "weighted":
        raise ParseError("expected 'n <int> directed <0|1> weighted <0|1>'", lineno)
    n = _int(tok[1], lineno)
    if n < 0 or tok[3] not in ("0", "1") or tok[5] not in ("0", "1"):
        raise ParseError("bad size line values", lineno)
    directed, weighted = tok[3] == "1", tok[5] == "1"
    weights: list[Fraction] | None = [Fraction(1)] * n if weighted else None
    edges = []
    seen_edges = False
    for lineno, line in rows[2:]:
        tok = line.split()
        if tok[0] == "w":
            if not weighted:
                raise ParseError("weight line in an unweighted graph", lineno)
            if seen_edges:
                raise ParseError("weight lines must precede edge lines", lineno)
            if len(tok) != 3:
                raise ParseError("expected 'w <node> <num>[/<den>]'", lineno)
            u = _int(tok[1], lineno)
            if not 0 <= u < n:
                raise ParseError(f"unknown node {u}", lineno)
            try:
                w = Fraction(tok[2])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad weight {tok[2]!r}", lineno) from None
            if w < 0:
                raise ParseError("negative weight", lineno)
            weights[u] = w
        elif tok[0] == "e":
            seen_edges = True
            if len(tok) != 3:
                raise ParseError("expected 'e <u> <v>'", lineno)
            u, v = _int(tok[1], lineno), _int(tok[2], lineno)
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"edge ({u}, {v}) references an unknown node", lineno)
            if u == v:
                raise ParseError(f"self-loop at node {u}", lineno)
            edges.append((u, v, lineno))
        else:
            raise ParseError(f"unknown record {tok[0]!r}", lineno)
    seen: set[tuple[int, int]] = set()
    for u, v, lineno in edges:
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge ({u}, {v})", lineno)
        seen.add(key)
    return Graph(n, [(u, v) for u, v, _ in edges], directed, weights)


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_graph(g))


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    """Center ``0`` joined to leaves ``1..leaves``."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
