"""Exact secluded Steiner trees over a tree decomposition.

Every vertex gets one of three roles: in the tree, exposed (a neighbor of
the tree), or untouched.  A bag configuration records the role of each bag
vertex, and for tree vertices which partial component they belong to:

    0            untouched
    1 .. w-1     tree vertex, component color (first-occurrence canonical)
    w            exposed, not in the tree

The value of a configuration at bag ``i`` is the least weight of non-zero
vertices in ``X_i+`` (the vertices of the subtree below ``i``) over partial
solutions that agree with it.  The smallest terminal is added to every bag,
so a component can never be forgotten before it reaches the root.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import BudgetError, InfeasibleError, InputError, ParseError, UnsupportedError
from .graph import Graph, Number, SteinerSolution, cost, reachable, tree_from_nodes
from .oracle import OptResult

DEFAULT_WIDTH_GUARD = 8

UNTOUCHED = 0


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...]
    root: int = 0

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return [sorted(x) for x in adj]

    def children(self) -> list[list[int]]:
        """Children lists for the tree rooted at ``root``."""
        adj = self.neighbors()
        kids: list[list[int]] = [[] for _ in self.bags]
        seen = {self.root}
        stack = [self.root]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    kids[i].append(j)
                    stack.append(j)
        return kids

    def postorder(self) -> list[int]:
        kids = self.children()
        out = []
        stack = [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                out.append(i)
                continue
            stack.append((i, True))
            for j in reversed(kids[i]):
                stack.append((j, False))
        return out


def validate_decomposition(td: TreeDecomposition, g: Graph) -> tuple[bool, str]:
    m = len(td.bags)
    if m == 0:
        return (g.n == 0, "no bags")
    if not 0 <= td.root < m:
        return False, "root out of range"
    if len(td.edges) != m - 1:
        return False, "bag tree must have exactly bags-1 edges"
    if len(td.postorder()) != m:
        return False, "bag tree is disconnected"
    covered = set().union(*td.bags)
    if any(u not in covered for u in range(g.n)):
        return False, "vertex missing from every bag"
    if any(not 0 <= u < g.n for u in covered):
        return False, "bag holds an unknown vertex"
    for u, v in g.edges():
        if not any(u in b and v in b for b in td.bags):
            return False, f"edge ({u},{v}) not covered"
    adj = td.neighbors()
    for u in range(g.n):
        holding = [i for i, b in enumerate(td.bags) if u in b]
        seen = {holding[0]}
        stack = [holding[0]]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen and u in td.bags[j]:
                    seen.add(j)
                    stack.append(j)
        if len(seen) != len(holding):
            return False, f"bags holding {u} are not connected"
    return True, ""


def min_fill_tree_decomposition(g: Graph) -> TreeDecomposition:
    """Decomposition from the min-fill-in elimination heuristic."""
    import networkx as nx
    from networkx.algorithms.approximation import treewidth_min_fill_in

    if g.directed:
        raise UnsupportedError("tree decompositions are built on undirected graphs")
    if g.n == 0:
        return TreeDecomposition((), (), 0)
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    comps = [sorted(c) for c in nx.connected_components(h)]
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    for comp in sorted(comps):
        _, tree = treewidth_min_fill_in(h.subgraph(comp))
        order = sorted(tree.nodes, key=lambda b: sorted(b))
        index = {b: len(bags) + k for k, b in enumerate(order)}
        if bags:
            # chain components together; any bag-tree edge is fine between them
            edges.append((0, len(bags)))
        for a, b in tree.edges:
            edges.append(tuple(sorted((index[a], index[b]))))
        bags.extend(frozenset(b) for b in order)
    return TreeDecomposition(tuple(bags), tuple(sorted(edges)), 0)


def normalize_decomposition(
    td: TreeDecomposition, g: Graph, terminals: Iterable[int]
) -> TreeDecomposition:
    """Root at a bag holding the smallest terminal and make the tree binary.

    A bag with children ``c1, ..., cm`` (``m > 2``) keeps ``c1`` and gets a
    copy of itself as second child, which takes over ``c2, ..., cm``.
    """
    term = sorted({g.check_node(u) for u in terminals})
    if not term:
        raise InputError("need at least one terminal")
    root = next((i for i, b in enumerate(td.bags) if term[0] in b), None)
    if root is None:
        raise InputError(f"terminal {term[0]} is in no bag; decomposition is invalid")
    rooted = TreeDecomposition(td.bags, td.edges, root)
    kids = rooted.children()
    bags = list(td.bags)
    edges = []
    stack = [(root, root)]
    while stack:
        i, slot = stack.pop()
        ch = kids[i]
        cur = slot
        while len(ch) > 2:
            edges.append((cur, ch[0]))
            stack.append((ch[0], ch[0]))
            bags.append(td.bags[i])
            dup = len(bags) - 1
            edges.append((cur, dup))
            cur, ch = dup, ch[1:]
        for j in ch:
            edges.append((cur, j))
            stack.append((j, j))
    return TreeDecomposition(tuple(bags), tuple(sorted(tuple(sorted(e)) for e in edges)), root)


# -- configurations -------------------------------------------------------


@dataclass(frozen=True)
class BagConfiguration:
    bag: tuple[int, ...]
    colors: tuple[int, ...]
    omega: int
    value: Number | None = None

    def color(self, u: int) -> int:
        return self.colors[self.bag.index(u)]

    def active(self) -> set[int]:
        return {u for u, c in zip(self.bag, self.colors) if c != UNTOUCHED}

    def tree_vertices(self) -> set[int]:
        return {u for u, c in zip(self.bag, self.colors) if 0 < c < self.omega}


def _canonical(labels: Sequence[int], omega: int) -> tuple[int, ...]:
    ren: dict[int, int] = {}
    out = []
    for c in labels:
        if c == UNTOUCHED or c == omega:
            out.append(c)
        else:
            if c not in ren:
                ren[c] = len(ren) + 1
            out.append(ren[c])
    return tuple(out)


def _set_partitions(items: list[int]) -> Iterator[list[int]]:
    """Restricted growth strings: ``labels[k]`` is the block of ``items[k]`` (1-based)."""
    if not items:
        yield []
        return

    def rec(k, labels, top):
        if k == len(items):
            yield list(labels)
            return
        for c in range(1, top + 2):
            labels.append(c)
            yield from rec(k + 1, labels, max(top, c))
            labels.pop()

    yield from rec(0, [], 0)


def enumerate_legal_configurations(
    bag: Iterable[int], terminals: Iterable[int], omega: int, g: Graph | None = None
) -> list[BagConfiguration]:
    """All canonical colorings of ``bag`` satisfying the legality rules.

    L1: bag terminals are tree vertices.  With ``g`` given, also L2 (bag
    neighbors of tree vertices are non-zero) and: adjacent tree vertices share
    a color.
    """
    bag_t = tuple(sorted(set(bag)))
    if len(bag_t) > omega - 1:
        raise InputError("bag larger than omega - 1")
    term = set(terminals)
    out = []
    for types in itertools.product((UNTOUCHED, omega, 1), repeat=len(bag_t)):
        if any(u in term and ty != 1 for u, ty in zip(bag_t, types)):
            continue
        tree = [k for k, ty in enumerate(types) if ty == 1]
        if g is not None and any(
            types[b] == UNTOUCHED
            for a in tree
            for b in range(len(bag_t))
            if g.has_edge(bag_t[a], bag_t[b])
        ):
            continue
        for part in _set_partitions(tree):
            labels = list(types)
            for k, c in zip(tree, part):
                labels[k] = c
            if g is not None and any(
                labels[a] != labels[b]
                for a in tree
                for b in tree
                if a < b and g.has_edge(bag_t[a], bag_t[b])
            ):
                continue
            out.append(BagConfiguration(bag_t, tuple(labels), omega))
    return out


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def compatible(
    parent_cfg: BagConfiguration,
    child_cfg: BagConfiguration,
    parent_bag: Iterable[int] | None = None,
    child_bag: Iterable[int] | None = None,
    g: Graph | None = None,
) -> bool:
    """Single-child compatibility between a parent and a child configuration.

    Q1 roles agree on shared vertices and the child's components only merge
    going up; Q2 the parent's partition is the child's (on shared vertices)
    joined with parent-bag edges; Q3 every child component reaches a shared
    vertex; Q4 parent-bag neighbors of child tree vertices are active.
    """
    pb = parent_cfg.bag if parent_bag is None else tuple(sorted(parent_bag))
    cb = child_cfg.bag if child_bag is None else tuple(sorted(child_bag))
    if pb != parent_cfg.bag or cb != child_cfg.bag:
        raise InputError("configuration does not match its bag")
    p, c = parent_cfg, child_cfg
    shared = [u for u in cb if u in set(pb)]
    ptree, ctree = p.tree_vertices(), c.tree_vertices()

    # Q1
    for u in shared:
        pu, cu = p.color(u), c.color(u)
        if (pu == UNTOUCHED) != (cu == UNTOUCHED):
            return False
        if (u in ptree) != (u in ctree):
            return False
    for u, v in itertools.combinations([x for x in shared if x in ctree], 2):
        if c.color(u) == c.color(v) and p.color(u) != p.color(v):
            return False
    # Q3
    shared_colors = {c.color(u) for u in shared if u in ctree}
    if any(c.color(u) not in shared_colors for u in ctree):
        return False
    # Q2
    uf = _UnionFind(sorted(ptree))
    by_color: dict[int, int] = {}
    for u in shared:
        if u in ctree:
            col = c.color(u)
            if col in by_color:
                uf.union(by_color[col], u)
            else:
                by_color[col] = u
    if g is not None:
        for u, v in itertools.combinations(sorted(ptree), 2):
            if g.has_edge(u, v):
                uf.union(u, v)
    for u, v in itertools.combinations(sorted(ptree), 2):
        if (uf.find(u) == uf.find(v)) != (p.color(u) == p.color(v)):
            return False
    # Q4
    if g is not None:
        for u in ctree:
            for v in g.neighbors(u):
                if v in set(pb) and p.color(v) == UNTOUCHED:
                    return False
    return True


# -- the dynamic program ----------------------------------------------------


@dataclass
class _Entry:
    value: Number
    choices: tuple  # per child: child configuration colors


@dataclass
class TreewidthDP:
    """Tables of a finished run, kept for backtracking and inspection."""

    g: Graph
    td: TreeDecomposition
    terminals: tuple[int, ...]
    omega: int
    weights: tuple[Number, ...]
    tables: dict[int, dict[tuple[int, ...], _Entry]] = field(default_factory=dict)

    def configurations(self, i: int) -> list[BagConfiguration]:
        bag = tuple(sorted(self.td.bags[i]))
        return [
            BagConfiguration(bag, col, self.omega, e.value) for col, e in sorted(self.tables[i].items())
        ]

    def backtrack(self, i: int, colors: tuple[int, ...]) -> dict[int, int]:
        """Roles of all vertices of ``X_i+`` in the partial solution behind an entry.

        Returns ``{vertex: 0 | 1 | omega}``, 1 meaning a tree vertex.
        """
        kids = self.td.children()
        roles: dict[int, int] = {}
        stack = [(i, colors)]
        while stack:
            j, col = stack.pop()
            bag = sorted(self.td.bags[j])
            for u, c in zip(bag, col):
                roles[u] = c if c in (UNTOUCHED, self.omega) else 1
            entry = self.tables[j][col]
            for child, ccol in zip(kids[j], entry.choices):
                stack.append((child, ccol))
        return roles


def _weights_of(g: Graph, weights) -> tuple[Number, ...]:
    if weights is None:
        return tuple(g.weight(u) for u in range(g.n))
    if len(weights) != g.n:
        raise InputError("need one weight per node")
    out = []
    for w in weights:
        w = Fraction(w) if not isinstance(w, int) else w
        if w < 0:
            raise InputError("weights must be nonnegative")
        out.append(w)
    return tuple(out)


def _roles_for_bag(bag, term, g, omega):
    """Role tuples (0 / 1 for tree / omega) passing L1 and L2."""
    for types in itertools.product((UNTOUCHED, 1, omega), repeat=len(bag)):
        ok = True
        for a, ty in enumerate(types):
            if bag[a] in term and ty != 1:
                ok = False
                break
            if ty == 1 and any(
                types[b] == UNTOUCHED for b in range(len(bag)) if g.has_edge(bag[a], bag[b])
            ):
                ok = False
                break
        if ok:
            yield types


def run_treewidth_dp(
    g: Graph,
    terminals: Iterable[int],
    td: TreeDecomposition | None = None,
    weights: Sequence[Number] | None = None,
    width_guard: int = DEFAULT_WIDTH_GUARD,
) -> TreewidthDP:
    if g.directed:
        raise UnsupportedError("the treewidth DP handles undirected graphs; use the oracle")
    term = sorted({g.check_node(u) for u in terminals})
    if not term:
        raise InputError("need at least one terminal")
    if not set(term) <= reachable(g, [term[0]]):
        raise InfeasibleError("terminals are not mutually connected")
    w = _weights_of(g, weights)
    if td is None:
        td = min_fill_tree_decomposition(g)
    else:
        ok, why = validate_decomposition(td, g)
        if not ok:
            raise InputError(f"invalid tree decomposition: {why}")
    if td.width > width_guard:
        raise BudgetError(f"decomposition width {td.width} exceeds the guard {width_guard}")
    td = normalize_decomposition(td, g, term)
    anchor = term[0]
    td = TreeDecomposition(tuple(b | {anchor} for b in td.bags), td.edges, td.root)
    omega = max(len(b) for b in td.bags) + 1
    dp = TreewidthDP(g, td, tuple(term), omega, w)
    kids = td.children()
    tset = set(term)

    for i in td.postorder():
        bag = tuple(sorted(td.bags[i]))
        pos = {u: k for k, u in enumerate(bag)}
        # per child: {(projected roles, projected partition): (value, child colors)}
        projected = []
        for j in kids[i]:
            cbag = sorted(td.bags[j])
            shared = [k for k, u in enumerate(cbag) if u in pos]
            # grouped by the role pattern on shared vertices, then by colors
            proj: dict[tuple, dict[tuple, tuple[Number, tuple[int, ...]]]] = {}
            for col, entry in sorted(dp.tables[j].items()):
                tree_cols = {c for c in col if 0 < c < omega}
                shared_cols = {col[k] for k in shared if 0 < col[k] < omega}
                if tree_cols != shared_cols:
                    continue  # a component would be sealed off
                key = _canonical([col[k] for k in shared], omega)
                pattern = tuple(1 if 0 < c < omega else c for c in key)
                val = entry.value - sum(w[cbag[k]] for k in shared if col[k] != UNTOUCHED)
                group = proj.setdefault(pattern, {})
                old = group.get(key)
                if old is None or val < old[0]:
                    group[key] = (val, col)
            projected.append(([pos[cbag[k]] for k in shared], proj))

        table: dict[tuple[int, ...], _Entry] = {}
        for types in _roles_for_bag(bag, tset, g, omega):
            tree = [k for k, ty in enumerate(types) if ty == 1]
            base = sum(w[bag[k]] for k, ty in enumerate(types) if ty != UNTOUCHED)
            # partial states: (union-find parent tuple over bag slots, value, choices)
            uf = list(range(len(bag)))

            def find(par, x):
                while par[x] != x:
                    x = par[x]
                return x

            for a, b in itertools.combinations(tree, 2):
                if g.has_edge(bag[a], bag[b]):
                    ra, rb = find(uf, a), find(uf, b)
                    if ra != rb:
                        uf[max(ra, rb)] = min(ra, rb)
            states = [(tuple(uf), base, ())]
            for slots, proj in projected:
                want = tuple(types[k] for k in slots)
                nxt = []
                group = proj.get(want, {})
                for par, val, ch in states:
                    for key, (cval, ccol) in group.items():
                        p2 = list(par)
                        first: dict[int, int] = {}
                        for k, kk in zip(slots, key):
                            if 0 < kk < omega:
                                if kk in first:
                                    ra, rb = find(p2, first[kk]), find(p2, k)
                                    if ra != rb:
                                        p2[max(ra, rb)] = min(ra, rb)
                                else:
                                    first[kk] = k
                        nxt.append((tuple(p2), val + cval, ch + (ccol,)))
                states = nxt
                if not states:
                    break
            for par, val, ch in states:
                labels = [
                    find(par, k) + 1 if ty == 1 else ty for k, ty in enumerate(types)
                ]
                col = _canonical(labels, omega)
                old = table.get(col)
                if old is None or val < old.value:
                    table[col] = _Entry(val, ch)
        dp.tables[i] = table
    return dp


def solve_treewidth_secluded_steiner(
    g: Graph,
    terminals: Iterable[int],
    td: TreeDecomposition | None = None,
    weights: Sequence[Number] | None = None,
    width_guard: int = DEFAULT_WIDTH_GUARD,
) -> OptResult:
    """Minimum-exposure tree spanning ``terminals``, exact for any valid decomposition.

    ``weights`` overrides the graph's node weights.
    """
    dp = run_treewidth_dp(g, terminals, td, weights, width_guard)
    root = dp.td.root
    best = None
    for col, entry in dp.tables[root].items():
        tree_cols = {c for c in col if 0 < c < dp.omega}
        if len(tree_cols) != 1:
            continue
        if best is None or (entry.value, col) < (best[0], best[1]):
            best = (entry.value, col)
    if best is None:
        raise InfeasibleError("terminals are not mutually connected")
    roles = dp.backtrack(root, best[1])
    nodes = {u for u, r in roles.items() if r == 1}
    gw = g.with_weights(list(dp.weights)) if weights is not None else g
    sol: SteinerSolution = tree_from_nodes(gw, nodes, dp.terminals, prune=True)
    explored = sum(len(t) for t in dp.tables.values())
    return OptResult(sol, cost(gw, sol.nodes), explored, True, "dp-treewidth")


def separation_terms(
    g: Graph, tree_nodes: Iterable[int], a: Iterable[int], b: Iterable[int], s: Iterable[int]
) -> tuple[Number, Number, Number]:
    """``(DIFF(A,S), DIFF(B,S), Cost(T,S))`` for a separation ``(A, B, S)``.

    They sum to the exposure of the tree.
    """
    a, b, s = set(a), set(b), set(s)
    if a | b | s != set(range(g.n)) or not (a & b) <= s:
        raise InputError("not a separation: A, B, S must cover V with A and B meeting inside S")
    for u in a - s:
        if any(v in b - s for v in g.neighbors(u)):
            raise InputError("not a separation: an edge joins A\\S and B\\S")
    nb: set[int] = set()
    for u in tree_nodes:
        nb |= g.closed(u)
    return g.weight_of(nb & (a - s)), g.weight_of(nb & (b - s)), g.weight_of(nb & s)


# -- text format ------------------------------------------------------------


def emit_td(td: TreeDecomposition) -> str:
    lines = ["td v1", f"bags {len(td.bags)}"]
    for i, b in enumerate(td.bags):
        lines.append(f"bag {i} : " + " ".join(str(u) for u in sorted(b)))
    for a, b in td.edges:
        lines.append(f"edge {a} {b}")
    lines.append(f"root {td.root}")
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    header_seen = False
    count = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    root = 0

    def num(tok, lineno):
        try:
            return int(tok)
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}", lineno) from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if not header_seen:
            if toks != ["td", "v1"]:
                raise ParseError("expected header 'td v1'", lineno)
            header_seen = True
        elif toks[0] == "bags" and len(toks) == 2:
            count = num(toks[1], lineno)
        elif toks[0] == "bag":
            if len(toks) < 3 or toks[2] != ":":
                raise ParseError("expected 'bag <id> : v...'", lineno)
            i = num(toks[1], lineno)
            if i in bags:
                raise ParseError(f"bag {i} defined twice", lineno)
            bags[i] = frozenset(num(t, lineno) for t in toks[3:])
        elif toks[0] == "edge" and len(toks) == 3:
            edges.append(tuple(sorted((num(toks[1], lineno), num(toks[2], lineno)))))
        elif toks[0] == "root" and len(toks) == 2:
            root = num(toks[1], lineno)
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    if not header_seen:
        raise ParseError("empty input", 1)
    if count is None:
        raise ParseError("missing 'bags <count>' line")
    if sorted(bags) != list(range(count)):
        raise ParseError(f"expected bags 0..{count - 1}")
    for a, b in edges:
        if not (0 <= a < count and 0 <= b < count):
            raise ParseError(f"edge ({a},{b}) names an unknown bag")
    return TreeDecomposition(tuple(bags[i] for i in range(count)), tuple(sorted(edges)), root)
