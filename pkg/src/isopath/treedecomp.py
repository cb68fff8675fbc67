"""Tree decompositions: elimination heuristics, validation, nice form and the
PACE ``.td`` text format."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .graph_core import Graph, GraphError


class DecompositionError(ValueError):
    pass


@dataclass
class TreeDecomposition:
    """Bags (tuples of vertex ids) and an undirected tree on bag indices."""

    n: int
    bags: list[tuple[int, ...]]
    tree_edges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbors(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            nb[a].append(b)
            nb[b].append(a)
        return nb


def validate(g: Graph, td: TreeDecomposition) -> list[str]:
    """Reasons why ``td`` is not a tree decomposition of ``g`` (empty if it is)."""
    problems = []
    nb = len(td.bags)
    if td.n != g.n:
        problems.append(f"decomposition is for {td.n} vertices, graph has {g.n}")
    for b in td.bags:
        for v in b:
            if not 0 <= v < g.n:
                problems.append(f"bag vertex {v} out of range")
    if nb == 0:
        if g.n:
            problems.append("no bags")
        return problems
    if len(td.tree_edges) != nb - 1:
        problems.append(f"tree has {len(td.tree_edges)} edges for {nb} bags")
    adj = td.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != nb:
        problems.append("bag tree is disconnected")
    bag_sets = [set(b) for b in td.bags]
    where: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, b in enumerate(bag_sets):
        for v in b:
            if v in where:
                where[v].append(i)
    for v, idx in where.items():
        if not idx:
            problems.append(f"vertex {v} is in no bag")
            continue
        inside = set(idx)
        reach = {idx[0]}
        stack = [idx[0]]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y in inside and y not in reach:
                    reach.add(y)
                    stack.append(y)
        if reach != inside:
            problems.append(f"bags containing vertex {v} are not connected")
    for u, v in g.edges():
        if not any(u in b and v in b for b in bag_sets):
            problems.append(f"edge ({u}, {v}) not covered")
    return problems


# --- heuristics ---------------------------------------------------------------

def _elimination_td(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    nbr = [set(g.adj[v]) for v in range(g.n)]
    bags: list[tuple[int, ...]] = []
    higher: list[set[int]] = []
    for v in order:
        hs = set(nbr[v])
        bags.append(tuple(sorted(hs | {v})))
        higher.append(hs)
        for a in hs:
            nbr[a] |= hs - {a}
            nbr[a].discard(v)
    edges = []
    roots = []
    for i, v in enumerate(order):
        if higher[i]:
            j = min(pos[u] for u in higher[i])
            edges.append((i, j))
        else:
            roots.append(i)
    # join components of the elimination forest (disconnected input)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(g.n, bags, edges)


def elimination_order(g: Graph, strategy: str = "min_fill", first: int | None = None) -> list[int]:
    if strategy not in ("min_degree", "min_fill"):
        raise ValueError(f"unknown strategy {strategy!r}")
    nbr = [set(g.adj[v]) for v in range(g.n)]
    alive = set(range(g.n))
    order = []

    def fill(v: int) -> int:
        ns = sorted(nbr[v])
        return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:] if b not in nbr[a])

    while alive:
        if first is not None and not order:
            v = first
        elif strategy == "min_degree":
            v = min(alive, key=lambda x: (len(nbr[x]), x))
        else:
            v = min(alive, key=lambda x: (fill(x), len(nbr[x]), x))
        order.append(v)
        alive.discard(v)
        for a in nbr[v]:
            nbr[a] |= nbr[v] - {a}
            nbr[a].discard(v)
        nbr[v] = set()
    return order


def heuristic_td(g: Graph, strategy: str = "min_fill", restarts: bool = True) -> TreeDecomposition:
    """Greedy elimination decomposition.

    With ``restarts`` the greedy rule is also rerun with each vertex forced
    first and the narrowest result kept (cheap on the graph sizes the exact DP
    can handle anyway).
    """
    best = _elimination_td(g, elimination_order(g, strategy))
    if restarts and g.n <= 64:
        for v in range(g.n):
            td = _elimination_td(g, elimination_order(g, strategy, first=v))
            if td.width < best.width:
                best = td
    return best


def exact_treewidth_bruteforce(g: Graph) -> int:
    """Treewidth by minimising over elimination orders (subset recursion).
    Only meant as a reference on tiny graphs."""
    if g.n > 12:
        raise GraphError("brute-force treewidth limited to 12 vertices")
    if g.n == 0:
        return -1
    full = (1 << g.n) - 1

    def q_size(s: int, v: int) -> int:
        # vertices outside s+v reachable from v through s
        seen = 1 << v
        stack = [v]
        count = 0
        while stack:
            x = stack.pop()
            for w in g.adj[x]:
                if seen >> w & 1:
                    continue
                seen |= 1 << w
                if s >> w & 1:
                    stack.append(w)
                else:
                    count += 1
        return count

    @lru_cache(maxsize=None)
    def tw(s: int) -> int:
        if s == 0:
            return -1
        best = g.n
        m = s
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            rest = s ^ low
            best = min(best, max(tw(rest), q_size(rest, v)))
        return best

    return tw(full)


# --- nice form ------------------------------------------------------------------

LEAF, INTRODUCE, FORGET, JOIN = "leaf", "introduce", "forget", "join"


@dataclass(frozen=True)
class NiceNode:
    kind: str
    bag: frozenset
    children: tuple[int, ...]
    vertex: int | None = None


@dataclass
class NiceDecomposition:
    """Nodes are stored so every child precedes its parent; the root is last."""

    n: int
    nodes: list[NiceNode]
    subtree_vertices: list[frozenset]

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def width(self) -> int:
        return max((len(x.bag) for x in self.nodes), default=0) - 1

    def parent_map(self) -> list[int | None]:
        parent: list[int | None] = [None] * len(self.nodes)
        for i, nd in enumerate(self.nodes):
            for c in nd.children:
                parent[c] = i
        return parent

    def as_tree_decomposition(self) -> TreeDecomposition:
        bags = [tuple(sorted(x.bag)) for x in self.nodes]
        edges = [(c, i) for i, x in enumerate(self.nodes) for c in x.children]
        return TreeDecomposition(self.n, bags, edges)


def make_nice(td: TreeDecomposition, root: int = 0) -> NiceDecomposition:
    """Convert to nice form with empty leaf and root bags."""
    nodes: list[NiceNode] = []

    def add(kind: str, bag, children=(), vertex=None) -> int:
        nodes.append(NiceNode(kind, frozenset(bag), tuple(children), vertex))
        return len(nodes) - 1

    def chain(top: int, src: frozenset, dst: frozenset) -> int:
        cur, bag = top, set(src)
        for v in sorted(src - dst):
            bag.discard(v)
            cur = add(FORGET, bag, (cur,), v)
        for v in sorted(dst - src):
            bag.add(v)
            cur = add(INTRODUCE, bag, (cur,), v)
        return cur

    if not td.bags:
        add(LEAF, ())
        return NiceDecomposition(td.n, nodes, [frozenset()])

    adj = td.neighbors()
    bags = [frozenset(b) for b in td.bags]
    # iterative post-order from the chosen root
    parent = {root: None}
    order = [root]
    for x in order:
        for y in sorted(adj[x]):
            if y not in parent:
                parent[y] = x
                order.append(y)
    kids = {x: [y for y in sorted(adj[x]) if parent.get(y) == x] for x in order}
    top: dict[int, int] = {}
    for x in reversed(order):
        subs = [chain(top[c], bags[c], bags[x]) for c in kids[x]]
        if not subs:
            cur = chain(add(LEAF, ()), frozenset(), bags[x])
        else:
            cur = subs[0]
            for s in subs[1:]:
                cur = add(JOIN, bags[x], (cur, s))
        top[x] = cur
    chain(top[root], bags[root], frozenset())

    sub: list[frozenset] = []
    for nd in nodes:
        acc = set(nd.bag)
        for c in nd.children:
            acc |= sub[c]
        sub.append(frozenset(acc))
    return NiceDecomposition(td.n, nodes, sub)


def validate_nice(g: Graph, nice: NiceDecomposition) -> list[str]:
    problems = validate(g, nice.as_tree_decomposition())
    if nice.nodes[nice.root].bag:
        problems.append("root bag not empty")
    for i, nd in enumerate(nice.nodes):
        ch = [nice.nodes[c] for c in nd.children]
        if nd.kind == LEAF:
            ok = not nd.children and not nd.bag
        elif nd.kind == INTRODUCE:
            ok = len(ch) == 1 and nd.vertex not in ch[0].bag and nd.bag == ch[0].bag | {nd.vertex}
        elif nd.kind == FORGET:
            ok = len(ch) == 1 and nd.vertex in ch[0].bag and nd.bag == ch[0].bag - {nd.vertex}
        elif nd.kind == JOIN:
            ok = len(ch) == 2 and ch[0].bag == nd.bag == ch[1].bag
        else:
            ok = False
        if not ok:
            problems.append(f"node {i} ({nd.kind}) malformed")
        expect = set(nd.bag)
        for c in nd.children:
            expect |= nice.subtree_vertices[c]
        if nice.subtree_vertices[i] != expect:
            problems.append(f"node {i} subtree vertex set wrong")
        if any(c >= i for c in nd.children):
            problems.append(f"node {i} has a child stored after it")
    return problems


def nice_decomposition(g: Graph, strategy: str = "min_fill") -> NiceDecomposition:
    return make_nice(heuristic_td(g, strategy))


# --- PACE .td -------------------------------------------------------------------

def format_td(td: TreeDecomposition) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {td.n}"]
    for i, b in enumerate(td.bags, 1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in b]))
    lines += [f"{a + 1} {b + 1}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"


def parse_td(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, tuple[int, ...]] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td" or header is not None:
                    raise DecompositionError(f"line {lineno}: bad header {line!r}")
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "b":
                bid = int(parts[1])
                if bid in bags:
                    raise DecompositionError(f"line {lineno}: bag {bid} repeated")
                bags[bid] = tuple(int(v) - 1 for v in parts[2:])
            else:
                a, b = (int(x) for x in parts)
                edges.append((a - 1, b - 1))
        except ValueError as exc:
            if isinstance(exc, DecompositionError):
                raise
            raise DecompositionError(f"line {lineno}: {exc}") from None
    if header is None:
        raise DecompositionError("missing 's td' header")
    nbags, size, n = header
    if sorted(bags) != list(range(1, nbags + 1)):
        raise DecompositionError("bag ids must be 1..#bags")
    td = TreeDecomposition(n, [bags[i] for i in range(1, nbags + 1)], edges)
    if nbags and td.width + 1 != size:
        raise DecompositionError(f"header width {size - 1} disagrees with bags ({td.width})")
    for a, b in edges:
        if not (0 <= a < nbags and 0 <= b < nbags):
            raise DecompositionError(f"tree edge ({a + 1}, {b + 1}) out of range")
    return td


def load_td(path) -> TreeDecomposition:
    with open(path) as fh:
        return parse_td(fh.read())


def save_td(td: TreeDecomposition, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_td(td))
