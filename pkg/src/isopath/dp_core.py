"""Signature dynamic programming over a nice tree decomposition.

A signature is stored per colour as its assembled path::

    (items, kinds)

``items`` lists the vertices of the path in order: bag vertices, plus the two
terminals at the ends when those lie outside the bag.  ``kinds`` has one
letter per consecutive pair: ``R`` for a graph edge between bag vertices,
``T`` for a link realised above the node (outside the subtree), ``B`` for a
link realised below it (inside the subtree, outside the bag).  A one-vertex
colour is ``((x,), "")``.  Each colour is stored in the orientation giving the
smaller tuple and a signature is the sorted tuple of its colours, which makes
colour names irrelevant.

Terminals outside the bag are class representatives handed out by a
:class:`TerminalPool`.  With the exact pool every vertex is its own class.
"""

from __future__ import annotations

import itertools
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .graph_core import INF, DistMatrix, Graph, apsp, components, induced_subgraph
from .treedecomp import FORGET, INTRODUCE, JOIN, LEAF, NiceDecomposition

IN_BAG, BOTTOM, TOP = 0, 1, 2

Color = tuple  # (items: tuple[int, ...], kinds: str)
Signature = tuple  # sorted tuple of Color
StateTable = dict  # Signature -> (value, backpointer)


class Timeout(RuntimeError):
    def __init__(self, stats: "SolveStats"):
        super().__init__("time budget exhausted")
        self.stats = stats


class AssemblyError(ValueError):
    pass


class NotAPath(AssemblyError):
    pass


class EndpointMismatch(AssemblyError):
    pass


def canonical_color(items: tuple, kinds: str) -> Color:
    fwd = (items, kinds)
    rev = (items[::-1], kinds[::-1])
    return fwd if fwd <= rev else rev


def canonical_signature(colors: Iterable[Color]) -> Signature:
    return tuple(sorted(colors))


# --- terminal pools --------------------------------------------------------------

class TerminalPool:
    """Exact pool: terminals are plain vertices."""

    exact = True

    def bind(self, ctx: "DPContext") -> None:
        self.ctx = ctx

    def rep(self, t: int, v: int) -> int:
        return v

    def members(self, t: int, r: int) -> list[int]:
        return [r]

    def key(self, t: int, r: int):
        return r

    def rep_by_key(self, t: int, key, side: int):
        return key

    def top_reps(self, t: int) -> list[int]:
        sub = self.ctx.nice.subtree_vertices[t]
        return [v for v in range(self.ctx.g.n) if v not in sub]

    def size(self, t: int) -> int:
        return self.ctx.g.n

    def terminal_weight(self, t: int, r: int, y: int, side: int) -> int:
        return self.ctx.side_distance(t, side, r, y)


# --- context -----------------------------------------------------------------------

@dataclass
class SolveStats:
    table_sizes: list[int] = field(default_factory=list)
    pool_sizes: list[int] = field(default_factory=list)
    width: int = 0
    ms: float = 0.0

    @property
    def states_peak(self) -> int:
        return max(self.table_sizes, default=0)


class DPContext:
    """Everything the node operations share: graph, distances, decomposition,
    terminal pool, and memo tables for link weights and colour checks."""

    def __init__(self, g: Graph, d: DistMatrix, nice: NiceDecomposition,
                 pool: TerminalPool | None = None, deadline: float | None = None):
        self.g = g
        self.d = d
        self.nice = nice
        self.pool = pool or TerminalPool()
        self.pool.bind(self)
        self.deadline = deadline
        self.stats = SolveStats(width=nice.width)
        everything = frozenset(range(g.n))
        self._top = [everything - s for s in nice.subtree_vertices]
        self._bot = [s - nd.bag for s, nd in zip(nice.subtree_vertices, nice.nodes)]
        self._bfs_cache: dict[tuple[frozenset, int], list[int]] = {}
        self._color_ok: list[dict] = [dict() for _ in nice.nodes]
        self._remap_cache: dict[tuple[int, int, int], tuple[int, ...]] = {}
        self._ticks = 0

    # sides and weights

    def side(self, t: int, v: int) -> int:
        if v in self.nice.nodes[t].bag:
            return IN_BAG
        if v in self.nice.subtree_vertices[t]:
            return BOTTOM
        return TOP

    def side_distance(self, t: int, side: int, u: int, v: int) -> int:
        """Distance from u to v with every inner vertex on ``side`` of node t."""
        allowed = self._top[t] if side == TOP else self._bot[t]
        key = (allowed, u)
        row = self._bfs_cache.get(key)
        if row is None:
            row = _inner_bfs(self.g, u, allowed)
            self._bfs_cache[key] = row
        return row[v]

    def link_weight(self, t: int, a: int, b: int, kind: str) -> int:
        if kind == "R":
            return 1
        bag = self.nice.nodes[t].bag
        side = TOP if kind == "T" else BOTTOM
        a_in, b_in = a in bag, b in bag
        if a_in and b_in:
            if self.g.has_edge(a, b):
                return INF
            return self.side_distance(t, side, a, b)
        if a_in == b_in:
            return INF
        r, y = (b, a) if a_in else (a, b)
        if self.side(t, r) != side:
            return INF
        return self.pool.terminal_weight(t, r, y, side)

    def color_ok(self, t: int, color: Color) -> bool:
        memo = self._color_ok[t]
        hit = memo.get(color)
        if hit is None:
            hit = self._check_color(t, color)
            memo[color] = hit
        return hit

    def _check_color(self, t: int, color: Color) -> bool:
        items, kinds = color
        bag = self.nice.nodes[t].bag
        if len(items) == 1:
            return items[0] in bag
        weights = []
        for i, k in enumerate(kinds):
            a, b = items[i], items[i + 1]
            if k == "R" and not (a in bag and b in bag and self.g.has_edge(a, b)):
                return False
            w = self.link_weight(t, a, b, k)
            if w >= INF:
                return False
            weights.append(w)
        total = sum(weights)
        a, b = items[0], items[-1]
        d = self.d
        if self.pool.exact:
            return d[a][b] == total
        if a in bag or b in bag:
            if d[a][b] != total:
                return False
        elif d[a][items[-2]] != total - weights[-1] or d[items[1]][b] != total - weights[0]:
            return False
        return self._some_members_realise(t, items, kinds, weights)

    def _some_members_realise(self, t: int, items, kinds, weights) -> bool:
        """Class terminals: some pair of class members must pass the exact
        test (side-restricted end links, exact end-to-end distance)."""
        bag = self.nice.nodes[t].bag
        a, b = items[0], items[-1]
        inner = sum(weights) - (0 if a in bag else weights[0]) - (0 if b in bag else weights[-1])

        def options(r, nb, kind):
            if r in bag:
                return [(r, 0)]
            side = TOP if kind == "T" else BOTTOM
            out = []
            for u in self.pool.members(t, r):
                w = self.side_distance(t, side, u, nb)
                if w == self.d[u][nb]:
                    out.append((u, w))
            return out

        firsts = options(a, items[1], kinds[0])
        lasts = options(b, items[-2], kinds[-1])
        d = self.d
        for u, wu in firsts:
            row = d[u]
            for v, wv in lasts:
                if row[v] == inner + wu + wv:
                    return True
        return False

    def sig_ok(self, t: int, sig: Signature) -> bool:
        return all(self.color_ok(t, c) for c in sig)

    def tick(self) -> None:
        self._ticks += 1
        if self.deadline is not None and self._ticks & 1023 == 0 and time.monotonic() > self.deadline:
            raise Timeout(self.stats)

    # terminal remapping between a child node tc and its parent t

    def terminal_options(self, t: int, tc: int, r: int) -> tuple[int, ...]:
        """Parent-side terminals that a child-side terminal ``r`` may become."""
        key = (t, tc, r)
        hit = self._remap_cache.get(key)
        if hit is None:
            bag = self.nice.nodes[t].bag
            child_bag = self.nice.nodes[tc].bag
            if r in child_bag:
                hit = (r,) if r in bag else (self.pool.rep(t, r),)
            else:
                mem = self.pool.members(tc, r)
                hit = tuple(sorted({self.pool.rep(t, v) for v in mem if v not in bag}))
            self._remap_cache[key] = hit
        return hit

    def remap_color(self, t: int, tc: int, color: Color, keep: tuple = ()) -> list[Color]:
        """Translate the terminals of a child colour; ends listed in ``keep``
        (0 or -1) already hold parent-side vertices."""
        items, kinds = color
        if len(items) == 1:
            return [color]
        first = (items[0],) if 0 in keep else self.terminal_options(t, tc, items[0])
        last = (items[-1],) if -1 in keep else self.terminal_options(t, tc, items[-1])
        mid = items[1:-1]
        out = []
        for a in first:
            for b in last:
                out.append(canonical_color((a,) + mid + (b,), kinds))
        return out

    def remap_signature(self, t: int, tc: int, colors: list[Color], keep: dict | None = None) -> list[Signature]:
        keep = keep or {}
        choices = [self.remap_color(t, tc, c, keep.get(i, ())) for i, c in enumerate(colors)]
        out = []
        for combo in itertools.product(*choices):
            if all(self.color_ok(t, c) for c in combo):
                out.append(canonical_signature(combo))
        return out


def _inner_bfs(g: Graph, src: int, allowed: frozenset) -> list[int]:
    """Distances from src where only ``allowed`` vertices may be passed
    through; the final vertex of each path is unrestricted."""
    from collections import deque

    dist = [INF] * g.n
    dist[src] = 0
    q = deque([src])
    adj = g.adj
    while q:
        u = q.popleft()
        if u != src and u not in allowed:
            continue
        du = dist[u] + 1
        for w in adj[u]:
            if dist[w] == INF:
                dist[w] = du
                q.append(w)
    return dist


def _offer(table: StateTable, sig: Signature, value: int, back) -> None:
    cur = table.get(sig)
    if cur is None or value < cur[0] or (value == cur[0] and back < cur[1]):
        table[sig] = (value, back)


# --- assembled paths ---------------------------------------------------------------

@dataclass(frozen=True)
class AssembledPath:
    vertices: tuple[int, ...]
    kinds: tuple[str, ...]  # "Regular", "TopLink" or "BotLink"


_KIND_NAMES = {"R": "Regular", "T": "TopLink", "B": "BotLink"}


def assemble(g: Graph, bag_paths, top_links, bot_links, sigma: int, tau: int) -> AssembledPath:
    """Assemble one colour from its bag paths and link pairs.

    Raises :class:`NotAPath` if the union branches or falls apart and
    :class:`EndpointMismatch` if ``sigma``/``tau`` are not its two ends.
    """
    adj: dict[int, list[tuple[int, str]]] = defaultdict(list)
    nodes: set[int] = set()
    n_edges = 0
    for p in bag_paths:
        nodes.update(p)
        for a, b in zip(p, p[1:]):
            if not g.has_edge(a, b):
                raise NotAPath(f"{a}-{b} is not an edge")
            adj[a].append((b, "R"))
            adj[b].append((a, "R"))
            n_edges += 1
    for links, kind in ((top_links, "T"), (bot_links, "B")):
        for a, b in links:
            nodes.update((a, b))
            adj[a].append((b, kind))
            adj[b].append((a, kind))
            n_edges += 1
    nodes.update((sigma, tau))
    if any(len(adj[v]) > 2 for v in nodes) or n_edges != len(nodes) - 1:
        raise NotAPath("union of bag paths and links is not a single path")
    ends = sorted(v for v in nodes if len(adj[v]) < 2)
    if len(nodes) == 1:
        if sigma != tau:
            raise EndpointMismatch("one-vertex path needs sigma == tau")
        return AssembledPath((sigma,), ())
    if sorted((sigma, tau)) != ends:
        raise EndpointMismatch(f"ends are {ends}, terminals are {(sigma, tau)}")
    seq, kinds = [sigma], []
    prev = None
    while seq[-1] != tau:
        cur = seq[-1]
        step = [(w, k) for w, k in adj[cur] if w != prev]
        if not step:
            raise NotAPath("union of bag paths and links is disconnected")
        w, k = step[0]
        prev = cur
        seq.append(w)
        kinds.append(_KIND_NAMES[k])
        if len(seq) > len(nodes):
            raise NotAPath("cycle in assembled union")
    if len(seq) != len(nodes):
        raise NotAPath("union of bag paths and links is disconnected")
    return AssembledPath(tuple(seq), tuple(kinds))


def color_of(path: AssembledPath) -> Color:
    inv = {v: k for k, v in _KIND_NAMES.items()}
    return canonical_color(path.vertices, "".join(inv[k] for k in path.kinds))


def check_coherence(ctx: DPContext, t: int, color: Color) -> bool:
    return ctx.color_ok(t, color)


# --- node operations ---------------------------------------------------------------

def dp_leaf(ctx: DPContext, t: int) -> StateTable:
    return {(): (0, ())}


def _fresh_colors(ctx: DPContext, t: int, x: int) -> list[Color]:
    ends = [x] + ctx.pool.top_reps(t)
    out = []
    for i, a in enumerate(ends):
        for b in ends[i:]:
            if a == x and b == x:
                col = ((x,), "")
            elif a == x:
                col = canonical_color((x, b), "T")
            else:
                col = canonical_color((a, x, b), "TT")
            if ctx.color_ok(t, col):
                out.append(col)
    return sorted(set(out))


def dp_introduce(ctx: DPContext, t: int, child: StateTable) -> StateTable:
    node = ctx.nice.nodes[t]
    x = node.vertex
    tc = node.children[0]
    g = ctx.g
    fresh = _fresh_colors(ctx, t, x)
    out: StateTable = {}

    def kind_to(a: int, b: int) -> str:
        # kind of a new step between bag vertex x and neighbour item b
        if b in node.bag and g.has_edge(a, b):
            return "R"
        return "T"

    for sig, (val, _) in child.items():
        ctx.tick()
        colors = list(sig)
        # x on a colour of its own
        for base in ctx.remap_signature(t, tc, colors):
            for f in fresh:
                _offer(out, canonical_signature(base + (f,)), val + 1, sig)
        for ci, (items, kinds) in enumerate(colors):
            others = colors[:ci] + colors[ci + 1:]
            variants = []
            # x is the terminal that used to be represented outside
            for end in (0, -1):
                r = items[end]
                if ctx.side(tc, r) != TOP or x not in ctx.pool.members(tc, r):
                    continue
                if end == 0:
                    variants.append(((x,) + items[1:], kind_to(x, items[1]) + kinds[1:], (0,)))
                else:
                    variants.append((items[:-1] + (x,), kinds[:-1] + kind_to(x, items[-2]), (-1,)))
            # x splits a top link
            for j, k in enumerate(kinds):
                if k != "T":
                    continue
                a, b = items[j], items[j + 1]
                new_items = items[:j + 1] + (x,) + items[j + 1:]
                new_kinds = kinds[:j] + kind_to(x, a) + kind_to(x, b) + kinds[j + 1:]
                variants.append((new_items, new_kinds, ()))
            for v_items, v_kinds, keep in variants:
                cand = others + [(v_items, v_kinds)]
                for base in ctx.remap_signature(t, tc, cand, {len(others): keep}):
                    _offer(out, base, val, sig)
    return out


def dp_forget(ctx: DPContext, t: int, child: StateTable) -> StateTable:
    node = ctx.nice.nodes[t]
    x = node.vertex
    tc = node.children[0]
    out: StateTable = {}
    for sig, (val, _) in child.items():
        ctx.tick()
        colors = []
        dead = False
        for items, kinds in sig:
            if x not in items:
                colors.append((items, kinds))
                continue
            j = items.index(x)
            touching = kinds[max(j - 1, 0):j + 1]
            if "T" in touching:
                dead = True
                break
            bag_items = [v for v in items if v in ctx.nice.nodes[tc].bag]
            if bag_items == [x]:
                # colour leaves the bag for good
                if "T" in kinds:
                    dead = True
                    break
                continue
            if j == 0:
                colors.append((items, "B" + kinds[1:]))
            elif j == len(items) - 1:
                colors.append((items, kinds[:-1] + "B"))
            else:
                colors.append((items[:j] + items[j + 1:], kinds[:j - 1] + "B" + kinds[j + 1:]))
        if dead:
            continue
        for base in ctx.remap_signature(t, tc, colors):
            _offer(out, base, val, sig)
    return out


def _join_key(ctx: DPContext, t: int, color: Color):
    items, kinds = color
    bag = ctx.nice.nodes[t].bag
    key_items = tuple((0, v) if v in bag else (1, ctx.pool.key(t, v)) for v in items)
    key_kinds = kinds.replace("T", "L").replace("B", "L")
    return key_items, key_kinds


def _oriented_keys(ctx: DPContext, tc: int, color: Color):
    """Both orientations of a colour with their side-free keys; the first one
    has the smaller key."""
    items, kinds = color
    fwd = (items, kinds)
    rev = (items[::-1], kinds[::-1])
    kf, kr = _join_key(ctx, tc, fwd), _join_key(ctx, tc, rev)
    if kr < kf:
        return [(kr, rev)]
    if kf < kr:
        return [(kf, fwd)]
    return [(kf, fwd), (kr, rev)] if fwd != rev else [(kf, fwd)]


def dp_join(ctx: DPContext, t: int, left: StateTable, right: StateTable) -> StateTable:
    node = ctx.nice.nodes[t]
    t1, t2 = node.children
    out: StateTable = {}

    def keyed(tc: int, sig: Signature):
        per = [_oriented_keys(ctx, tc, c) for c in sig]
        order = sorted(range(len(per)), key=lambda i: per[i][0][0])
        return tuple(per[i][0][0] for i in order), [per[i] for i in order]

    buckets: dict = defaultdict(list)
    for sig2, (val2, _) in right.items():
        k, oriented = keyed(t2, sig2)
        buckets[k].append((sig2, val2, oriented))

    for sig1, (val1, _) in left.items():
        k, oriented1 = keyed(t1, sig1)
        for sig2, val2, oriented2 in buckets.get(k, ()):
            ctx.tick()
            per_color: list[list[Color]] = []
            for o1, o2 in zip(oriented1, oriented2):
                _, (items1, kinds1) = o1[0]
                merged = []
                for _, (items2, kinds2) in o2:
                    m = _merge_color(ctx, t, t1, t2, items1, kinds1, items2, kinds2)
                    if m is not None:
                        merged.append(m)
                if not merged:
                    break
                per_color.append(merged)
            else:
                value = val1 + val2 - len(sig1)
                for combo in itertools.product(*per_color):
                    if all(ctx.color_ok(t, c) for c in combo):
                        _offer(out, canonical_signature(combo), value, (sig1, sig2))
    return out


def _merge_color(ctx: DPContext, t: int, t1: int, t2: int, items1, kinds1, items2, kinds2):
    kinds = []
    for k1, k2 in zip(kinds1, kinds2):
        if k1 == "R" or k2 == "R":
            if k1 != k2:
                return None
            kinds.append("R")
        elif k1 == "B" and k2 == "B":
            return None
        elif k1 == "B" or k2 == "B":
            kinds.append("B")
        else:
            kinds.append("T")
    bag = ctx.nice.nodes[t].bag
    items = list(items1)
    for end in (0, -1):
        r1, r2 = items1[end], items2[end]
        if r1 in bag:
            continue
        s1, s2 = ctx.side(t1, r1), ctx.side(t2, r2)
        if s1 == BOTTOM and s2 == BOTTOM:
            return None
        side = BOTTOM if BOTTOM in (s1, s2) else TOP
        rep = ctx.pool.rep_by_key(t, ctx.pool.key(t1, r1), side)
        if rep is None:
            return None
        items[end] = rep
    return canonical_color(tuple(items), "".join(kinds))


# --- driver ------------------------------------------------------------------------

def run_tables(ctx: DPContext) -> list[StateTable]:
    nice = ctx.nice
    tables: list[StateTable | None] = [None] * len(nice.nodes)
    ctx.stats.table_sizes = [0] * len(nice.nodes)
    ctx.stats.pool_sizes = [ctx.pool.size(t) for t in range(len(nice.nodes))]
    for t, nd in enumerate(nice.nodes):
        if nd.kind == LEAF:
            tables[t] = dp_leaf(ctx, t)
        elif nd.kind == INTRODUCE:
            tables[t] = dp_introduce(ctx, t, tables[nd.children[0]])
        elif nd.kind == FORGET:
            tables[t] = dp_forget(ctx, t, tables[nd.children[0]])
        else:
            tables[t] = dp_join(ctx, t, tables[nd.children[0]], tables[nd.children[1]])
        ctx.stats.table_sizes[t] = len(tables[t])
    return tables  # type: ignore[return-value]


def reconstruct(ctx: DPContext, tables: list[StateTable]) -> list[tuple[int, ...]]:
    """Follow backpointers from the root and collect each solution path."""
    nice = ctx.nice
    members: dict[int, list[int]] = defaultdict(list)
    next_id = 0
    stack = [(nice.root, (), [])]
    while stack:
        t, sig, ids = stack.pop()
        nd = nice.nodes[t]
        if nd.kind == LEAF:
            continue
        back = tables[t][sig][1]
        by_bag = {frozenset(v for v in c[0] if v in nd.bag): i for c, i in zip(sig, ids)}
        if nd.kind == JOIN:
            for child, csig in zip(nd.children, back):
                stack.append((child, csig, [by_bag[frozenset(v for v in c[0] if v in nd.bag)] for c in csig]))
            continue
        tc = nd.children[0]
        cbag = nice.nodes[tc].bag
        child_ids = []
        for c in back:
            bs = frozenset(v for v in c[0] if v in cbag)
            if nd.kind == INTRODUCE:
                pid = by_bag.get(bs)
                if pid is None:
                    pid = by_bag[bs | {nd.vertex}]
            else:
                rest = bs - {nd.vertex}
                if rest:
                    pid = by_bag[rest]
                else:
                    pid = next_id
                    next_id += 1
                if nd.vertex in bs:
                    members[pid].append(nd.vertex)
            child_ids.append(pid)
        stack.append((tc, back, child_ids))
    d = ctx.d
    out = []
    for pid in sorted(members):
        vs = members[pid]
        end = max(vs, key=lambda v: (d[vs[0]][v], -v))
        out.append(tuple(sorted(vs, key=lambda v: d[end][v])))
    out = [p if p[0] <= p[-1] else p[::-1] for p in out]
    out.sort()
    return out


def solve_with_pool(g: Graph, nice: NiceDecomposition, pool: TerminalPool,
                    d: DistMatrix | None = None, timeout_ms: float | None = None):
    d = d or apsp(g)
    deadline = None if timeout_ms is None else time.monotonic() + timeout_ms / 1000.0
    start = time.perf_counter()
    ctx = DPContext(g, d, nice, pool, deadline)
    tables = run_tables(ctx)
    root = tables[nice.root]
    if () not in root:
        raise RuntimeError("no solution state at the root")
    k = root[()][0]
    witness = reconstruct(ctx, tables)
    ctx.stats.ms = (time.perf_counter() - start) * 1000.0
    return k, witness, ctx, tables


def solve_xp(g: Graph, nice: NiceDecomposition, d: DistMatrix | None = None,
             timeout_ms: float | None = None) -> tuple[int, list[tuple[int, ...]]]:
    """Minimum isometric path partition of a connected graph."""
    k, witness, _, _ = solve_with_pool(g, nice, TerminalPool(), d, timeout_ms)
    return k, witness


def solve_by_components(g: Graph, solver, strategy: str = "min_fill"):
    """Run ``solver(h, nice)`` on every connected component and add up.
    Returns ``(k, witness, stats_list)``."""
    from .treedecomp import nice_decomposition

    total, witness, stats = 0, [], []
    for comp in components(g):
        h, back = induced_subgraph(g, comp)
        nice = nice_decomposition(h, strategy)
        k, w, st = solver(h, nice)
        total += k
        witness += [tuple(back[v] for v in p) for p in w]
        stats.append(st)
    witness.sort()
    return total, witness, stats


# --- traces of a known partition ----------------------------------------------------

@dataclass
class PartialSolution:
    paths: list[tuple[int, ...]]
    color: list[int]  # 0 for paths away from the bag
    colors: dict[int, Color]


def trace_signature(ctx: DPContext, t: int, pp) -> tuple[Signature, PartialSolution]:
    """Signature and partial solution that a full partition induces at node t."""
    nd = ctx.nice.nodes[t]
    bag = nd.bag
    sub = ctx.nice.subtree_vertices[t]
    colors = []
    traces: list[tuple[int, ...]] = []
    trace_color: list[int] = []
    for p in pp:
        p = tuple(p)
        pieces, cur = [], []
        for v in p:
            if v in sub:
                cur.append(v)
            elif cur:
                pieces.append(tuple(cur))
                cur = []
        if cur:
            pieces.append(tuple(cur))
        hits = [i for i, v in enumerate(p) if v in bag]
        if not hits:
            for q in pieces:
                traces.append(q)
                trace_color.append(0)
            continue
        keep = sorted(set(hits) | {0, len(p) - 1})
        items, kinds = [], []
        for a, b in zip(keep, keep[1:]):
            if b == a + 1 and p[a] in bag and p[b] in bag:
                kinds.append("R")
            else:
                inner = p[a + 1:b]
                probe = inner[0] if inner else (p[a] if p[a] not in bag else p[b])
                kinds.append("B" if probe in sub else "T")
        for i in keep:
            v = p[i]
            items.append(v if v in bag else ctx.pool.rep(t, v))
        if len(p) == 1:
            items, kinds = [p[0]], []
        col = canonical_color(tuple(items), "".join(kinds))
        colors.append(col)
        idx = len(colors)
        for q in pieces:
            if any(v in bag for v in q):
                traces.append(q)
                trace_color.append(idx)
            else:
                traces.append(q)
                trace_color.append(0)
    sig = canonical_signature(colors)
    return sig, PartialSolution(traces, trace_color, dict(enumerate(colors, 1)))


def partial_order(ps: PartialSolution) -> int:
    return sum(1 for c in ps.color if c == 0) + len(ps.colors)
