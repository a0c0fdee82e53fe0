"""Instance families with known optimal exposure.

Hardness reductions (red-blue set cover and vertex cover to secluded path /
Steiner) and the DegCost gap family.  Each generator brute-forces the source
quantity (fewest red elements, vertex cover size) and records the optimum it
implies in ``expected_optimum``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import InputError, ParameterError
from .graph import Graph, Number
from .oracle import RbscInstance, exact_rbsc, exact_vertex_cover

PP = "PP"
PS = "PS"


@dataclass
class GeneratedInstance:
    graph: Graph
    problem: str
    expected_optimum: Number
    provenance: str
    params: dict[str, Any] = field(default_factory=dict)
    source: int | None = None
    target: int | None = None
    terminals: tuple[int, ...] = ()
    labels: dict[int, str] = field(default_factory=dict)

    def manifest(self) -> dict[str, Any]:
        """JSON-ready description; ``expected_optimum`` is a string when fractional."""
        opt = self.expected_optimum
        if isinstance(opt, Fraction) and opt.denominator == 1:
            opt = int(opt)
        out = {
            "schema": "instance/1",
            "problem": self.problem,
            "digest": self.graph.digest(),
            "expected_optimum": opt if isinstance(opt, int) else str(opt),
            "provenance": self.provenance,
            "params": self.params,
        }
        if self.problem == PP:
            out["source"], out["target"] = self.source, self.target
        else:
            out["terminals"] = list(self.terminals)
        return out


class _Builder:
    def __init__(self):
        self.labels: list[str] = []
        self.edges: list[tuple[int, int]] = []

    def node(self, label: str) -> int:
        self.labels.append(label)
        return len(self.labels) - 1

    def edge(self, u: int, v: int) -> None:
        self.edges.append((u, v))

    def graph(self, directed=False, weights=None) -> Graph:
        return Graph(len(self.labels), self.edges, directed=directed, weights=weights)


# -- red-blue set cover -----------------------------------------------------


def five_set_rbsc() -> RbscInstance:
    """The five-set example; the best covers, such as {S1, S5}, touch three reds."""
    sets = [
        ({0, 1, 2}, {0, 2}),
        ({3}, {3}),
        ({2}, {0, 4}),
        ({0, 2, 3}, {1, 3}),
        ({0, 1, 3, 4}, {2, 4}),
    ]
    return RbscInstance(5, 5, tuple((frozenset(b), frozenset(r)) for b, r in sets))


def _rbsc_layers(inst: RbscInstance, b: _Builder):
    s = b.node("s")
    layers = []
    for i in range(inst.blue_count):
        layers.append([(j, b.node(f"v[{i},{j}]")) for j in inst.sets_containing(i)])
    t = b.node("t")
    for _, v in layers[0]:
        b.edge(s, v)
    for lo, hi in zip(layers, layers[1:]):
        for _, u in lo:
            for _, v in hi:
                b.edge(u, v)
    for _, v in layers[-1]:
        b.edge(v, t)
    x = sum(len(layer) for layer in layers) + 2
    return s, t, layers, x


def _rbsc_build(inst: RbscInstance, m: int, h: int | None, directed: bool):
    b = _Builder()
    s, t, layers, x = _rbsc_layers(inst, b)
    supers = []
    for red in range(inst.red_count):
        supers.append([b.node(f"C{red}[{k}]") for k in range(m)])
    for layer in layers:
        for j, v in layer:
            for red in sorted(inst.sets[j][1]):
                for c in supers[red]:
                    b.edge(v, c)
    if h:
        hyper = [b.node(f"H[{k}]") for k in range(h)]
        for members in supers:
            for c in members:
                for y in hyper:
                    b.edge(c, y)
    return b, s, t, x


def _check_rbsc_params(inst: RbscInstance, m: int) -> int:
    if m < 1:
        raise ParameterError("supernode size M must be at least 1")
    if inst.blue_count < 1:
        raise ParameterError("need at least one blue element")
    return sum(len(inst.sets_containing(i)) for i in range(inst.blue_count)) + 2


def reduce_rbsc_to_pp(inst: RbscInstance, m: int, h: int | None = None) -> GeneratedInstance:
    """Layered set-choice graph with supernodes (size ``m``) and a hypernode (size ``h``).

    ``h`` defaults to ``X + |R| m + 1``, the least size that makes any path
    entering a supernode costlier than every path avoiding them.
    """
    x = _check_rbsc_params(inst, m)
    floor = x + inst.red_count * m + 1
    if h is None:
        h = floor
    if h < floor:
        raise ParameterError(f"hypernode size H must be at least X + |R|*M + 1 = {floor}")
    b, s, t, x = _rbsc_build(inst, m, h, directed=False)
    _, reds = exact_rbsc(inst)
    return GeneratedInstance(
        b.graph(),
        PP,
        x + reds * m,
        f"X + k*M with X={x}, k={reds} (exact red-blue set cover), M={m}",
        {"family": "rbsc", "M": m, "H": h, "X": x, "k": reds},
        source=s,
        target=t,
        labels=dict(enumerate(b.labels)),
    )


def reduce_rbsc_to_directed_pp(inst: RbscInstance, m: int) -> GeneratedInstance:
    """Acyclic variant: arcs run layer to layer and into supernodes; no hypernode."""
    x = _check_rbsc_params(inst, m)
    b, s, t, x = _rbsc_build(inst, m, None, directed=True)
    _, reds = exact_rbsc(inst)
    return GeneratedInstance(
        b.graph(directed=True),
        PP,
        x + reds * m,
        f"X + k*M with X={x}, k={reds} (exact red-blue set cover), M={m}",
        {"family": "rbsc-dag", "M": m, "X": x, "k": reds},
        source=s,
        target=t,
        labels=dict(enumerate(b.labels)),
    )


def random_rbsc(blue: int, red: int, sets: int, seed: int) -> RbscInstance:
    """Random instance where every blue element is covered."""
    rng = random.Random(seed)
    while True:
        family = []
        for _ in range(sets):
            bs = frozenset(i for i in range(blue) if rng.random() < 0.4)
            rs = frozenset(i for i in range(red) if rng.random() < 0.4)
            family.append((bs, rs))
        covered = set().union(*(bs for bs, _ in family))
        if len(covered) == blue:
            return RbscInstance(blue, red, tuple(family))


# -- vertex cover -----------------------------------------------------------


def _vc_base(gvc: Graph, limit: int = 24):
    if gvc.directed:
        raise InputError("vertex cover base graph must be undirected")
    if gvc.edge_count == 0:
        raise ParameterError("base graph needs at least one edge")
    if gvc.n > limit:
        raise ParameterError(f"base graph has more than {limit} vertices")
    return gvc.edges(), len(exact_vertex_cover(gvc))


def _gadgets(gvc: Graph, b: _Builder, vnode: list[int], directed: bool):
    edges = gvc.edges()
    gad = []
    for u, v in edges:
        ids = {k: b.node(f"{k}({u},{v})") for k in "UDLR"}
        if directed:
            b.edge(ids["U"], ids["L"])
            b.edge(ids["U"], ids["R"])
            b.edge(ids["L"], ids["D"])
            b.edge(ids["R"], ids["D"])
            b.edge(ids["L"], vnode[u])
            b.edge(ids["R"], vnode[v])
        else:
            b.edge(vnode[u], ids["L"])
            b.edge(ids["R"], vnode[v])
            b.edge(ids["L"], ids["U"])
            b.edge(ids["L"], ids["D"])
            b.edge(ids["U"], ids["R"])
            b.edge(ids["D"], ids["R"])
        gad.append(ids)
    return gad


def _vc_pp(gvc: Graph, directed: bool) -> GeneratedInstance:
    edges, vc = _vc_base(gvc)
    b = _Builder()
    s = b.node("s")
    t = b.node("t")
    vnode = [b.node(f"v{i}") for i in range(gvc.n)]
    heavy = [] if directed else [b.node(f"hat v{i}") for i in range(gvc.n)]
    for v, hv in zip(vnode, heavy):
        b.edge(v, hv)
    gad = _gadgets(gvc, b, vnode, directed)
    b.edge(s, gad[0]["U"])
    for g1, g2 in zip(gad, gad[1:]):
        b.edge(g1["D"], g2["U"])
    b.edge(gad[-1]["D"], t)
    m = len(edges)
    if directed:
        graph = b.graph(directed=True)
    else:
        heavy_w = gvc.n + 4 * m
        hs = set(heavy)
        graph = b.graph(weights=[heavy_w if u in hs else 1 for u in range(len(b.labels))])
    return GeneratedInstance(
        graph,
        PP,
        4 * m + vc + 2,
        f"4|E| + |VC| + 2 with |E|={m}, |VC|={vc} (brute force); +2 counts s and t",
        {"family": "vc-directed" if directed else "vc-weighted", "E": m, "V": gvc.n, "VC": vc},
        source=s,
        target=t,
        labels=dict(enumerate(b.labels)),
    )


def reduce_vc_to_weighted_pp(gvc: Graph) -> GeneratedInstance:
    """Diamond gadget per edge chained from ``s`` to ``t``; heavy pendant per vertex.

    Edges are taken in lexicographic order.  With a single edge, ``s`` and
    ``t`` attach to the same gadget.
    """
    return _vc_pp(gvc, directed=False)


def reduce_vc_to_directed_pp(gvc: Graph) -> GeneratedInstance:
    """Unweighted directed gadgets; vertex arcs point into ``V(G)``, so no pendants."""
    return _vc_pp(gvc, directed=True)


def reduce_vc_to_ps_bounded_degree(gvc: Graph) -> GeneratedInstance:
    """Binary tree over the vertices, pendant per vertex, subdivided edges.

    The tree over ``n`` leaves is heap-shaped: node ``k`` has children
    ``2k+1`` and ``2k+2``, leaves are the last ``n`` of ``2n-1`` nodes.
    """
    if gvc.directed:
        raise InputError("vertex cover base graph must be undirected")
    if gvc.n < 1:
        raise ParameterError("base graph needs a vertex")
    if gvc.n > 24:
        raise ParameterError("base graph has more than 24 vertices")
    if gvc.max_degree() > 3:
        raise ParameterError("base graph must have max degree at most 3")
    vc = len(exact_vertex_cover(gvc))
    n = gvc.n
    b = _Builder()
    tree = [b.node(f"B{k}") for k in range(2 * n - 1)]
    for k in range(1, 2 * n - 1):
        b.edge(tree[(k - 1) // 2], tree[k])
    leaves = tree[n - 1 :]
    vnode = [b.node(f"v{i}") for i in range(n)]
    for i in range(n):
        b.edge(leaves[i], vnode[i])
        b.edge(vnode[i], b.node(f"hat v{i}"))
    enodes = []
    for u, v in gvc.edges():
        e = b.node(f"e({u},{v})")
        b.edge(e, vnode[u])
        b.edge(e, vnode[v])
        enodes.append(e)
    terminals = tuple(sorted(enodes + tree))
    return GeneratedInstance(
        b.graph(),
        PS,
        len(terminals) + n + vc,
        f"|T| + |V| + |VC| with |T|={len(terminals)}, |V|={n}, |VC|={vc} (brute force)",
        {"family": "vc-steiner", "E": gvc.edge_count, "V": n, "VC": vc},
        terminals=terminals,
        labels=dict(enumerate(b.labels)),
    )


# -- DegCost gap --------------------------------------------------------------


def gen_degcost_gap_instance(delta: int, k: int) -> GeneratedInstance:
    """Terminal path ``v0 u1 .. u(k-2) v(k-1)``, a terminal pendant ``vi`` on each ``ui``,
    and ``delta - 3`` hub nodes adjacent to every ``ui``.

    Every tree exposes the whole graph (``2k + delta - 5`` nodes) while the
    cheapest tree by degree sum pays ``delta (k-2) + k``.
    """
    if not 3 < delta < k:
        raise ParameterError("need 3 < delta < k")
    b = _Builder()
    v = [b.node("v0")]
    us = [b.node(f"u{i}") for i in range(1, k - 1)]
    for i, u in enumerate(us, 1):
        v.append(b.node(f"v{i}"))
        b.edge(u, v[-1])
    v.append(b.node(f"v{k - 1}"))
    spine = [v[0]] + us + [v[-1]]
    for a, c in zip(spine, spine[1:]):
        b.edge(a, c)
    for z in range(1, delta - 2):
        hub = b.node(f"z{z}")
        for u in us:
            b.edge(hub, u)
    return GeneratedInstance(
        b.graph(),
        PS,
        2 * k + delta - 5,
        f"every tree exposes all 2k+D-5 nodes; DegCost of the optimum is D(k-2)+k = {delta * (k - 2) + k}",
        {"family": "degcost-gap", "delta": delta, "k": k, "degcost": delta * (k - 2) + k},
        terminals=tuple(sorted(v)),
        labels=dict(enumerate(b.labels)),
    )


# -- random graphs --------------------------------------------------------------


def random_graph(n: int, model: str = "gnp", seed: int = 0, p: float = 0.3, max_degree: int = 3) -> Graph:
    """Seeded random graph.

    ``gnp``: each pair independently with probability ``p``.
    ``degree_bounded``: random pairs added while both ends have degree below ``max_degree``.
    ``tree``: uniform random labeled tree (random Pruefer sequence).
    """
    if n < 1:
        raise ParameterError("n must be positive")
    rng = random.Random(seed)
    if model == "gnp":
        if not 0 <= p <= 1:
            raise ParameterError("p must lie in [0, 1]")
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    elif model == "degree_bounded":
        if max_degree < 1:
            raise ParameterError("max_degree must be positive")
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        rng.shuffle(pairs)
        deg = [0] * n
        edges = []
        for u, v in pairs:
            if deg[u] < max_degree and deg[v] < max_degree and rng.random() < p:
                edges.append((u, v))
                deg[u] += 1
                deg[v] += 1
    elif model == "tree":
        if n <= 2:
            edges = [(0, 1)] if n == 2 else []
        else:
            import networkx as nx

            seq = [rng.randrange(n) for _ in range(n - 2)]
            edges = list(nx.from_prufer_sequence(seq).edges)
    else:
        raise ParameterError(f"unknown model {model!r}")
    return Graph(n, edges)
