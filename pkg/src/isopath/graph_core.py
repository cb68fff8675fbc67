"""Simple undirected graphs, hop distances and the editing primitives used by
the gadget generators.

Vertices are dense integers ``0..n-1``.  A path is a tuple of vertex ids and a
partition is a list of such tuples.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INF = 1 << 40

VertexPath = tuple
PathPartition = list


def sat_add(a: int, b: int) -> int:
    """Addition that sticks at ``INF``."""
    if a >= INF or b >= INF:
        return INF
    s = a + b
    return s if s < INF else INF


class GraphError(ValueError):
    pass


class Graph:
    """Immutable simple graph.

    ``adj[v]`` is a sorted tuple of neighbours.  Build one from an edge list;
    loops are rejected and duplicate edges are merged.
    """

    __slots__ = ("n", "adj", "_nbr", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError("negative vertex count")
        nbr: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            nbr[u].add(v)
            nbr[v].add(u)
        self.n = n
        self.adj = tuple(tuple(sorted(s)) for s in nbr)
        self._nbr = tuple(frozenset(s) for s in nbr)
        self._m = sum(len(s) for s in nbr) // 2

    @property
    def m(self) -> int:
        return self._m

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbr[u]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def bfs(g: Graph, src: int, allowed=None) -> list[int]:
    """Hop distances from ``src``; if ``allowed`` is given, only those vertices
    (plus ``src``) may be entered."""
    dist = [INF] * g.n
    dist[src] = 0
    q = deque([src])
    adj = g.adj
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] == INF and (allowed is None or w in allowed):
                dist[w] = du
                q.append(w)
    return dist


class DistMatrix:
    """All-pairs hop distances.  Rows are filled by BFS, either eagerly or on
    first access, so large generated graphs only pay for the sources used."""

    def __init__(self, g: Graph, lazy: bool = False):
        self.g = g
        self.n = g.n
        self._rows: list[list[int] | None] = [None] * g.n
        if not lazy:
            for u in range(g.n):
                self._rows[u] = bfs(g, u)

    def __getitem__(self, u: int) -> list[int]:
        row = self._rows[u]
        if row is None:
            row = bfs(self.g, u)
            self._rows[u] = row
        return row

    def __len__(self) -> int:
        return self.n

    def rows(self) -> list[list[int]]:
        return [self[u] for u in range(self.n)]


def apsp(g: Graph) -> DistMatrix:
    return DistMatrix(g)


def diameter(g: Graph, d: DistMatrix) -> tuple[int, bool]:
    """Largest finite distance, and whether every pair is connected."""
    best, connected = 0, True
    for u in range(g.n):
        for x in d[u]:
            if x >= INF:
                connected = False
            elif x > best:
                best = x
    return best, connected


def is_path(g: Graph, p: Sequence[int]) -> bool:
    if len(p) == 0 or len(set(p)) != len(p):
        return False
    if any(not (0 <= v < g.n) for v in p):
        return False
    return all(g.has_edge(p[i], p[i + 1]) for i in range(len(p) - 1))


def is_isometric_path(g: Graph, d: DistMatrix, p: Sequence[int]) -> bool:
    if not is_path(g, p):
        raise GraphError(f"not a path in the graph: {tuple(p)}")
    return d[p[0]][p[-1]] == len(p) - 1


def is_isometric_prefixwise(g: Graph, d: DistMatrix, p: Sequence[int]) -> bool:
    """Same predicate, checked as ``d[first][p[j]] == j`` for every j."""
    if not is_path(g, p):
        raise GraphError(f"not a path in the graph: {tuple(p)}")
    row = d[p[0]]
    return all(row[v] == j for j, v in enumerate(p))


@dataclass(frozen=True)
class Violation:
    kind: str  # "overlap", "uncovered", "not_a_path", "not_isometric", "bad_vertex"
    detail: str


def ip_partition_violations(g: Graph, d: DistMatrix, pp: Sequence[Sequence[int]]) -> list[Violation]:
    out: list[Violation] = []
    owner: dict[int, int] = {}
    for idx, p in enumerate(pp):
        p = tuple(p)
        if any(not (0 <= v < g.n) for v in p):
            out.append(Violation("bad_vertex", f"path {idx} has an out-of-range id"))
            continue
        for v in p:
            if v in owner:
                out.append(Violation("overlap", f"vertex {v} in paths {owner[v]} and {idx}"))
            else:
                owner[v] = idx
        if not is_path(g, p):
            out.append(Violation("not_a_path", f"path {idx} = {p}"))
        elif d[p[0]][p[-1]] != len(p) - 1:
            out.append(Violation(
                "not_isometric",
                f"path {idx} has length {len(p) - 1} but endpoints at distance {d[p[0]][p[-1]]}",
            ))
    missing = [v for v in range(g.n) if v not in owner]
    if missing:
        out.append(Violation("uncovered", f"{len(missing)} vertices uncovered, first {missing[:5]}"))
    return out


def is_ip_partition(g: Graph, d: DistMatrix, pp: Sequence[Sequence[int]]) -> bool:
    return not ip_partition_violations(g, d, pp)


def side_restricted_distance(g: Graph, allowed, u: int, v: int) -> int:
    """Distance from u to v using only ``allowed`` as intermediate vertices."""
    if u == v:
        return 0
    if g.has_edge(u, v):
        return 1
    ok = set(allowed)
    ok.add(v)
    return bfs(g, u, ok)[v]


def components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in g.adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> tuple[Graph, list[int]]:
    """Subgraph on ``vertices`` renumbered in the given order.  The second value
    maps new ids back to old ones."""
    index = {v: i for i, v in enumerate(vertices)}
    edges = [(index[u], index[w]) for u in vertices for w in g.adj[u] if w in index and u < w]
    return Graph(len(vertices), edges), list(vertices)


# --- editing -----------------------------------------------------------------

def subdivide_edge(g: Graph, e: tuple[int, int], t: int) -> Graph:
    """Replace edge ``e`` by a path with ``t`` new inner vertices ``n..n+t-1``
    (in order from ``e[0]`` to ``e[1]``)."""
    u, v = e
    if not (0 <= u < g.n and 0 <= v < g.n) or not g.has_edge(u, v):
        raise GraphError(f"{e} is not an edge")
    if t < 1:
        raise GraphError("t must be at least 1")
    edges = [(a, b) for a, b in g.edges() if {a, b} != {u, v}]
    chain = [u] + list(range(g.n, g.n + t)) + [v]
    edges += list(zip(chain, chain[1:]))
    return Graph(g.n + t, edges)


def identify(g: Graph, u: int, v: int) -> Graph:
    """Merge ``v`` into ``u``.  Ids above ``v`` shift down by one."""
    if not (0 <= u < g.n and 0 <= v < g.n) or u == v:
        raise GraphError(f"cannot identify {u} and {v}")
    if g.has_edge(u, v):
        raise GraphError(f"{u} and {v} are adjacent")

    def rn(x: int) -> int:
        x = u if x == v else x
        return x - 1 if x > v else x

    edges = {tuple(sorted((rn(a), rn(b)))) for a, b in g.edges()}
    return Graph(g.n - 1, edges)


def attach_cherry(g: Graph, attach: Iterable[int]) -> tuple[Graph, int, int, int]:
    """Add a middle vertex adjacent to ``attach`` plus two pendant leaves."""
    attach = list(attach)
    for x in attach:
        if not 0 <= x < g.n:
            raise GraphError(f"vertex {x} out of range")
    mid, l1, l2 = g.n, g.n + 1, g.n + 2
    edges = list(g.edges()) + [(mid, l1), (mid, l2)] + [(mid, x) for x in attach]
    return Graph(g.n + 3, edges), mid, l1, l2


class GraphBuilder:
    """Mutable edge set for the generators; ``freeze`` gives a Graph."""

    def __init__(self):
        self.n = 0
        self.edges: set[tuple[int, int]] = set()
        self.labels: list[str] = []

    def add_vertex(self, label: str) -> int:
        self.labels.append(label)
        self.n += 1
        return self.n - 1

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            raise GraphError(f"self-loop at {u}")
        self.edges.add((u, v) if u < v else (v, u))

    def remove_edge(self, u: int, v: int) -> None:
        self.edges.discard((u, v) if u < v else (v, u))

    def add_path(self, vs: Sequence[int]) -> None:
        for a, b in zip(vs, vs[1:]):
            self.add_edge(a, b)

    def add_cherry(self, attach: Iterable[int], label: str) -> tuple[int, int, int]:
        mid = self.add_vertex(f"CherryMiddle({label})")
        l1 = self.add_vertex(f"CherryLeaf({label},1)")
        l2 = self.add_vertex(f"CherryLeaf({label},2)")
        self.add_edge(mid, l1)
        self.add_edge(mid, l2)
        for x in attach:
            self.add_edge(mid, x)
        return mid, l1, l2

    def freeze(self) -> Graph:
        return Graph(self.n, self.edges)


# --- text formats ------------------------------------------------------------

def format_gr(g: Graph, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p tw {g.n} {g.m}")
    lines += [f"{u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def parse_gr(text: str) -> Graph:
    n = m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "tw" or n is not None:
                raise GraphError(f"line {lineno}: bad header {line!r}")
            n, m = int(parts[2]), int(parts[3])
            continue
        if n is None:
            raise GraphError(f"line {lineno}: edge before header")
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
        u, v = int(parts[0]) - 1, int(parts[1]) - 1
        edges.append((u, v))
    if n is None:
        raise GraphError("missing 'p tw' header")
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, edges)


def format_paths(pp: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(str(v + 1) for v in p) + "\n" for p in pp)


def parse_paths(text: str) -> list[tuple[int, ...]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            out.append(tuple(int(x) - 1 for x in line.split()))
        except ValueError as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    return out


def load_gr(path) -> Graph:
    with open(path) as fh:
        return parse_gr(fh.read())


def save_gr(g: Graph, path, comments: Sequence[str] = ()) -> None:
    with open(path, "w") as fh:
        fh.write(format_gr(g, comments))


# --- small named graphs used in tests and the generator -----------------------

def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def grid_graph(rows: int, cols: int) -> Graph:
    idx = lambda r, c: r * cols + c
    edges = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return Graph(rows * cols, edges)


# --- seeded generators ---------------------------------------------------------

FAMILIES = ("random", "tree", "cycle", "grid", "cherry")


def random_tree(n: int, rng: random.Random) -> Graph:
    return Graph(n, [(rng.randrange(v), v) for v in range(1, n)])


def random_connected_graph(n: int, rng: random.Random, p: float | None = None) -> Graph:
    """Random spanning tree plus every other pair with probability ``p``."""
    if p is None:
        p = min(1.0, 2.0 / max(n, 1))
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph(n, sorted(edges))


def random_cherry_graph(n: int, rng: random.Random) -> Graph:
    """At most ``n`` vertices: a random connected core carrying one or two
    cherries, sometimes a pendant leaf, and sometimes a twin pair (two cherry
    middles joined by a path of degree-2 vertices)."""
    if n < 5:
        raise GraphError("cherry graphs need at least 5 vertices")
    core = rng.randint(2, max(2, min(6, n - 3)))
    g = random_connected_graph(core, rng, rng.uniform(0.2, 0.7))
    budget = n - core
    twin = budget >= 6 and rng.random() < 0.4
    if twin:
        g, m1, _, _ = attach_cherry(g, [rng.randrange(core)])
        inner = rng.randint(0, min(2, budget - 6))
        edges = list(g.edges())
        prev = m1
        for i in range(inner):
            edges.append((prev, g.n + i))
            prev = g.n + i
        g = Graph(g.n + inner, edges)
        attach = [prev] + ([rng.randrange(core)] if rng.random() < 0.5 else [])
        g, _, _, _ = attach_cherry(g, attach)
    else:
        for _ in range(rng.randint(1, max(1, budget // 3))):
            g, _, _, _ = attach_cherry(g, rng.sample(range(core), rng.randint(1, min(2, core))))
    if g.n < n and rng.random() < 0.5:
        g = Graph(g.n + 1, list(g.edges()) + [(rng.randrange(core), g.n)])
    return g


def generate(family: str, n: int, seed: int = 0) -> Graph:
    """Deterministic instance of ``family``.  For grids, ``n`` is rounded down
    to rows * cols with rows = isqrt(n)."""
    if n < 1:
        raise GraphError("n must be positive")
    rng = random.Random(seed)
    if family == "random":
        return random_connected_graph(n, rng)
    if family == "tree":
        return random_tree(n, rng)
    if family == "cycle":
        return cycle_graph(n) if n >= 3 else path_graph(n)
    if family == "grid":
        rows = max(1, math.isqrt(n))
        return grid_graph(rows, max(1, n // rows))
    if family == "cherry":
        return random_cherry_graph(n, rng)
    raise GraphError(f"unknown family {family!r}")
