"""Gadget-graph generators for the two hardness reductions and the AND
composition, with witness builders and BFS checkers for every distance and
size property the constructions are supposed to have.

Vertices carry string labels of the form ``Role(arg,arg,...)``.  Checkers work
from labels only, so a mutated output (a cherry deleted, an edge dropped) can
be re-checked without any side tables going stale.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph_core import INF, DistMatrix, Graph, GraphBuilder, bfs, components, induced_subgraph, is_path


class ReductionError(ValueError):
    pass


class InstanceTooSmall(ReductionError):
    pass


class IntraClassEdge(ReductionError):
    pass


class NotAClique(ReductionError):
    pass


class SparsityViolated(ReductionError):
    pass


class NotPerfectSquare(ReductionError):
    pass


class InvalidQ(ReductionError):
    pass


class NotSatisfying(ReductionError):
    pass


class NoDummyClause(ReductionError):
    pass


class MismatchedClass(ReductionError):
    pass


PathPartition = list[tuple[int, ...]]


# --- labels and reports --------------------------------------------------------

def label(role: str, *args) -> str:
    return f"{role}({','.join(str(a) for a in args)})"


_LABEL_RE = re.compile(r"^([A-Za-z]+)\((.*)\)$")


def parse_label(s: str) -> tuple[str, tuple[str, ...]]:
    m = _LABEL_RE.match(s)
    if not m:
        raise ValueError(f"bad label {s!r}")
    body = m.group(2)
    return m.group(1), tuple(body.split(",")) if body else ()


@dataclass
class ReductionOutput:
    graph: Graph
    k_target: int
    labels: list[str]
    witness: PathPartition | None = None
    meta: dict = field(default_factory=dict)

    def index(self) -> dict[str, int]:
        return {lab: v for v, lab in enumerate(self.labels)}

    def format_labels(self) -> str:
        return "".join(f"{v + 1} {lab}\n" for v, lab in enumerate(self.labels))


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ClaimReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed_names(self) -> set[str]:
        return {c.name for c in self.failures}

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.detail}".rstrip() for c in self.checks]


def _group_failures(report: ClaimReport, name: str, bad: list[str], total: int) -> None:
    detail = f"{total - len(bad)}/{total} ok"
    if bad:
        detail += "; first failures: " + "; ".join(bad[:3])
    report.add(name, not bad, detail)


def _nearest(dist: list[int], targets: Iterable[int]) -> int:
    return min((dist[t] for t in targets), default=INF)


def _cherry_ok(g: Graph, idx: Mapping[str, int], middle: str, attach: Sequence[str]) -> str | None:
    """None if ``middle`` is a cherry middle with two pendant leaves adjacent to
    every vertex named in ``attach``; otherwise a short reason."""
    m = idx.get(middle)
    if m is None:
        return f"{middle} missing"
    leaves = [u for u in g.adj[m] if g.degree(u) == 1]
    if len(leaves) != 2:
        return f"{middle} has {len(leaves)} pendant leaves"
    for a in attach:
        v = idx.get(a)
        if v is None:
            return f"{a} missing"
        if not g.has_edge(m, v):
            return f"{middle} not adjacent to {a}"
    return None


def remove_vertices(out: ReductionOutput, drop: Iterable[int]) -> ReductionOutput:
    """Copy of ``out`` without the given vertices; labels follow, the witness is
    discarded."""
    dropped = set(drop)
    keep = [v for v in range(out.graph.n) if v not in dropped]
    g, back = induced_subgraph(out.graph, keep)
    return ReductionOutput(g, out.k_target, [out.labels[v] for v in back], None, dict(out.meta))


def remove_edge(out: ReductionOutput, u: int, v: int) -> ReductionOutput:
    edges = [e for e in out.graph.edges() if set(e) != {u, v}]
    if len(edges) == out.graph.m:
        raise ValueError(f"({u},{v}) is not an edge")
    return ReductionOutput(Graph(out.graph.n, edges), out.k_target, list(out.labels), None, dict(out.meta))


def _cherry_vertices(out: ReductionOutput, middle_label: str) -> list[int]:
    idx = out.index()
    m = idx[middle_label]
    return [m] + [u for u in out.graph.adj[m] if out.graph.degree(u) == 1]


# --- multicolored clique --------------------------------------------------------

@dataclass(frozen=True)
class MccInstance:
    """``k`` colour classes of ``n`` vertices; edge ``(i, p, j, q)`` joins the
    p-th vertex of class i to the q-th vertex of class j (all 1-based)."""

    k: int
    n: int
    edges: tuple[tuple[int, int, int, int], ...]

    @property
    def classes(self) -> list[list[int]]:
        return [[(i - 1) * self.n + (p - 1) for p in range(1, self.n + 1)] for i in range(1, self.k + 1)]

    def validate(self) -> None:
        k, n = self.k, self.n
        if k < 4 or n < 3:
            raise InstanceTooSmall(f"need k >= 4 and n >= 3, got k={k}, n={n}")
        if 2 * n * n - 2 * n - k < 4:
            raise InstanceTooSmall(f"cables shorter than 4 for k={k}, n={n}")
        seen = set()
        for e in self.edges:
            i, p, j, q = e
            if not (1 <= i <= k and 1 <= j <= k and 1 <= p <= n and 1 <= q <= n):
                raise ReductionError(f"edge {e} out of range")
            if i == j:
                raise IntraClassEdge(f"edge {e} stays inside class {i}")
            key = ((i, p), (j, q)) if i < j else ((j, q), (i, p))
            if key in seen:
                raise ReductionError(f"edge {e} listed twice")
            seen.add(key)


def parse_mcc(text: str) -> MccInstance:
    k = n = None
    edges = []
    for raw in text.splitlines():
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "mcc" and len(tok) == 3:
            k, n = int(tok[1]), int(tok[2])
        elif tok[0] == "e" and len(tok) == 5:
            edges.append(tuple(int(t) for t in tok[1:]))
        else:
            raise ValueError(f"bad line {raw!r}")
    if k is None:
        raise ValueError("missing 'mcc k n' header")
    return MccInstance(k, n, tuple(edges))


def format_mcc(inst: MccInstance) -> str:
    lines = [f"mcc {inst.k} {inst.n}"] + [f"e {i} {p} {j} {q}" for i, p, j, q in inst.edges]
    return "\n".join(lines) + "\n"


def mcc_target(k: int, n: int, m: int) -> int:
    return k * (n + 1) * (k - 2) + 23 * m + math.comb(k, 2) + k + 2 * k


# Cable slots of an edge gadget (i, p, j, q): which grid, which border, which
# selected column.  Slots 0..3 are the x, x', x'', x''' cables.
def _cable_slots(edge: tuple[int, int, int, int]) -> list[tuple[int, int, str, int]]:
    i, p, j, q = edge
    return [(i, j, "a", p), (i, j, "b", p), (j, i, "b", q), (j, i, "a", q)]


def _cable_length(n: int, k: int, side: str, p: int) -> int:
    big_n = 2 * n * n
    return big_n - 2 * p - k if side == "a" else big_n - 2 * (n - p + 1) - k


def _rows(k: int, i: int) -> list[int]:
    return [r for r in range(1, k + 1) if r != i]


def _cell(k: int, n: int, i: int, r: int, c: int) -> str:
    if c == 0:
        return label("Border", "a", i, r)
    if c == 2 * n + 2:
        return label("Border", "b", i, r)
    return label("SemiGridCell", i, r, c)


def mcc_to_ipp(inst: MccInstance) -> ReductionOutput:
    inst.validate()
    k, n = inst.k, inst.n
    b = GraphBuilder()

    # semi-grids
    for i in range(1, k + 1):
        rows = _rows(k, i)
        for r in rows:
            left = [b.add_vertex(label("Border", "a", i, r))]
            left += [b.add_vertex(label("SemiGridSubdiv", i, r, "a", t)) for t in range(1, k + 1)]
            cells = [b.add_vertex(label("SemiGridCell", i, r, c)) for c in range(1, 2 * n + 2)]
            right = [b.add_vertex(label("SemiGridSubdiv", i, r, "b", t)) for t in range(k, 0, -1)]
            right.append(b.add_vertex(label("Border", "b", i, r)))
            b.add_path(left + cells + right)
    idx = {lab: v for v, lab in enumerate(b.labels)}
    for i in range(1, k + 1):
        rows = _rows(k, i)
        for r1, r2 in zip(rows, rows[1:]):
            for p in range(1, n + 1):
                b.add_edge(idx[_cell(k, n, i, r1, 2 * p)], idx[_cell(k, n, i, r2, 2 * p)])

    # edge gadgets: cores, cables, twin paths
    for e, edge in enumerate(inst.edges):
        for c, (grid, row, side, col) in enumerate(_cable_slots(edge)):
            length = _cable_length(n, k, side, col)
            z = b.add_vertex(label("CoreVertex", e, c))
            xs = [b.add_vertex(label("CableVertex", e, c, t)) for t in range(length)]
            end = idx[label("Border", side, grid, row)]
            b.add_path([z] + xs + [end])
            ys = [b.add_vertex(label("TwinPath", e, c, t)) for t in range(1, length)]
            b.add_path([z] + ys + [end])
    idx = {lab: v for v, lab in enumerate(b.labels)}
    for e in range(len(inst.edges)):
        b.add_path([idx[label("CoreVertex", e, c)] for c in range(4)])

    # cherries
    for i in range(1, k + 1):
        rows = _rows(k, i)
        for r1, r2 in zip(rows, rows[1:]):
            for cell in range(n + 1):
                attach = []
                for r in (r1, r2):
                    if cell == 0:
                        attach += [label("SemiGridSubdiv", i, r, "a", k), _cell(k, n, i, r, 2)]
                    elif cell == n:
                        attach += [_cell(k, n, i, r, 2 * n), label("SemiGridSubdiv", i, r, "b", k)]
                    else:
                        attach += [_cell(k, n, i, r, 2 * cell), _cell(k, n, i, r, 2 * cell + 2)]
                b.add_cherry([idx[a] for a in attach], f"grid,{i},{r1},{cell}")

    def x(e, c, t):
        return idx[label("CableVertex", e, c, t)]

    def y(e, c, t):
        return idx[label("TwinPath", e, c, t)]

    def z(e, c):
        return idx[label("CoreVertex", e, c)]

    for e, edge in enumerate(inst.edges):
        lengths = [_cable_length(n, k, s, col) for _, _, s, col in _cable_slots(edge)]
        b.add_cherry([x(e, c, 0) for c in range(4)], f"start,{e}")
        b.add_cherry([z(e, 1), z(e, 2), x(e, 0, 1), x(e, 3, 1)], f"core,{e},L")
        b.add_cherry([z(e, 0), z(e, 3), x(e, 1, 1), x(e, 2, 1)], f"core,{e},R")
        for c in range(4):
            for end, mid in ((1, y(e, c, 1)), (2, y(e, c, lengths[c] - 1))):
                for t in (1, 2):
                    b.add_edge(mid, b.add_vertex(label("CherryLeaf", f"twin,{e},{c},{end}", t)))
        b.add_cherry([y(e, 0, 3), y(e, 1, 3)], f"crossing,{e},i")
        b.add_cherry([y(e, 3, 3), y(e, 2, 3)], f"crossing,{e},j")

    for i in range(1, k + 1):
        for side in ("a", "b"):
            mid = b.add_vertex(label("ValveMiddle", i, side))
            for t in (1, 2):
                leaf = b.add_vertex(label("CherryLeaf", f"valve,{i},{side}", t))
                b.add_edge(mid, leaf)
            for e, edge in enumerate(inst.edges):
                for c, (grid, _, s, col) in enumerate(_cable_slots(edge)):
                    if grid == i and s == side:
                        length = _cable_length(n, k, s, col)
                        b.add_edge(mid, x(e, c, length - 2))
                        b.add_edge(mid, x(e, c, length - 1))

    meta = {"kind": "mcc", "k": k, "n": n, "edges": [tuple(e) for e in inst.edges]}
    return ReductionOutput(b.freeze(), mcc_target(k, n, len(inst.edges)), b.labels, None, meta)


def _find_clique_edges(inst: MccInstance, clique: Sequence[int]) -> dict[int, tuple[int, int]]:
    """Gadget index of each clique edge -> (class a, class b)."""
    if len(clique) != inst.k or any(not 1 <= p <= inst.n for p in clique):
        raise NotAClique(f"need one vertex index in 1..{inst.n} per class")
    chosen = {}
    for e, (i, p, j, q) in enumerate(inst.edges):
        if clique[i - 1] == p and clique[j - 1] == q:
            chosen[frozenset((i, j))] = e
    for i, j in itertools.combinations(range(1, inst.k + 1), 2):
        if frozenset((i, j)) not in chosen:
            raise NotAClique(f"v^{i}_{clique[i - 1]} and v^{j}_{clique[j - 1]} are not adjacent")
    return {e: tuple(sorted(pair)) for pair, e in chosen.items()}


def mcc_witness(inst: MccInstance, clique: Sequence[int], out: ReductionOutput | None = None) -> PathPartition:
    """Partition built from a multicolored clique (``clique[i-1]`` is the chosen
    vertex index of class i): every cherry and twin-cherry, the extendable cables
    of clique edges run along their rows up to the crest paddings, one vertical
    path per semi-grid through its crest, and the short cable paths elsewhere."""
    selected = _find_clique_edges(inst, clique)
    out = out or mcc_to_ipp(inst)
    g, idx = out.graph, out.index()
    k, n = inst.k, inst.n
    paths: PathPartition = []

    for v, lab in enumerate(out.labels):
        role, args = parse_label(lab)
        if role == "CherryMiddle" or role == "ValveMiddle":
            leaves = [u for u in g.adj[v] if g.degree(u) == 1]
            paths.append((leaves[0], v, leaves[1]))

    for e, edge in enumerate(inst.edges):
        slots = _cable_slots(edge)
        lengths = [_cable_length(n, k, s, col) for _, _, s, col in slots]
        for c in range(4):
            length = lengths[c]
            for t in (1, length - 1):
                mid = idx[label("TwinPath", e, c, t)]
                leaves = [u for u in g.adj[mid] if g.degree(u) == 1]
                paths.append((leaves[0], mid, leaves[1]))
            paths.append(tuple(idx[label("TwinPath", e, c, t)] for t in range(2, length - 1)))
        if e in selected:
            for c, (grid, row, side, col) in enumerate(slots):
                p = [idx[label("CableVertex", e, c, t)] for t in range(lengths[c])]
                p.append(idx[label("Border", side, grid, row)])
                p += [idx[label("SemiGridSubdiv", grid, row, side, t)] for t in range(1, k + 1)]
                if side == "a":
                    cols = range(1, 2 * col)
                else:
                    cols = range(2 * n + 1, 2 * col, -1)
                p += [idx[_cell(k, n, grid, row, cc)] for cc in cols]
                paths.append(tuple(p))
            paths.append(tuple(idx[label("CoreVertex", e, c)] for c in range(4)))
        else:
            for c in range(4):
                p = [idx[label("CoreVertex", e, c)]]
                p += [idx[label("CableVertex", e, c, t)] for t in range(lengths[c])]
                paths.append(tuple(p))

    for i in range(1, k + 1):
        paths.append(tuple(idx[_cell(k, n, i, r, 2 * clique[i - 1])] for r in _rows(k, i)))
    return paths


def verify_mcc_claims(out: ReductionOutput) -> ClaimReport:
    g, idx = out.graph, out.index()
    k, n = out.meta["k"], out.meta["n"]
    edges = out.meta["edges"]
    big_n = 2 * n * n
    rep = ClaimReport()

    bad = []
    total = 0
    for i in range(1, k + 1):
        for p in range(1, n + 1):
            total += 1
            col = [idx.get(_cell(k, n, i, r, 2 * p)) for r in _rows(k, i)]
            if None in col or not is_path(g, col):
                bad.append(f"grid {i} column {2 * p} is not a path")
                continue
            d = bfs(g, col[0])[col[-1]]
            if d != len(col) - 1:
                bad.append(f"grid {i} column {2 * p}: ends at distance {d}, length {len(col) - 1}")
    _group_failures(rep, "columns_isometric", bad, total)

    bad_crest, bad_pad, bad_eq = [], [], []
    for e, edge in enumerate(edges):
        for c, (grid, row, side, col) in enumerate(_cable_slots(edge)):
            length = _cable_length(n, k, side, col)
            tag = f"edge {e} cable {c}"
            x0 = idx.get(label("CableVertex", e, c, 0))
            z0 = idx.get(label("CoreVertex", e, c))
            if x0 is None or z0 is None:
                bad_crest.append(f"{tag}: missing")
                continue
            dist = bfs(g, x0)
            crest = [idx[_cell(k, n, grid, r, 2 * col)] for r in _rows(k, grid)]
            pad_col = 2 * col - 1 if side == "a" else 2 * col + 1
            pad = [idx[_cell(k, n, grid, r, pad_col)] for r in _rows(k, grid)]
            dc, dp = _nearest(dist, crest), _nearest(dist, pad)
            if dc != big_n - 1:
                bad_crest.append(f"{tag}: d(x0, crest)={dc}")
            if dp != big_n - 1:
                bad_pad.append(f"{tag}: d(x0, padding)={dp}")
            dz = bfs(g, z0)
            near = dz[idx[label("CableVertex", e, c, length - 1)]]
            end = dz[idx[label("Border", side, grid, row)]]
            if near != end:
                bad_eq.append(f"{tag}: d(z0, x_l-1)={near}, d(z0, x_l)={end}")
    total = 4 * len(edges)
    _group_failures(rep, "x0_to_crest_is_N-1", bad_crest, total)
    _group_failures(rep, "x0_to_padding_is_N-1", bad_pad, total)
    _group_failures(rep, "z0_equidistant_to_open_end", bad_eq, total)

    # cherry structure
    bad = []
    for i in range(1, k + 1):
        rows = _rows(k, i)
        for r1, r2 in zip(rows, rows[1:]):
            for cell in range(n + 1):
                attach = []
                for r in (r1, r2):
                    if cell == 0:
                        attach += [label("SemiGridSubdiv", i, r, "a", k), _cell(k, n, i, r, 2)]
                    elif cell == n:
                        attach += [_cell(k, n, i, r, 2 * n), label("SemiGridSubdiv", i, r, "b", k)]
                    else:
                        attach += [_cell(k, n, i, r, 2 * cell), _cell(k, n, i, r, 2 * cell + 2)]
                why = _cherry_ok(g, idx, label("CherryMiddle", "grid", i, r1, cell), attach)
                if why:
                    bad.append(why)
    _group_failures(rep, "grid_cherries", bad, k * (n + 1) * (k - 2))

    groups: dict[str, list[str]] = {"start_cherry": [], "core_cherries": [], "twin_cherries": [],
                                    "crossing_cherries": []}
    for e, edge in enumerate(edges):
        lengths = [_cable_length(n, k, s, col) for _, _, s, col in _cable_slots(edge)]
        cv = lambda c, t: label("CableVertex", e, c, t)  # noqa: E731
        tw = lambda c, t: label("TwinPath", e, c, t)  # noqa: E731
        core = lambda c: label("CoreVertex", e, c)  # noqa: E731
        checks = [
            ("start_cherry", label("CherryMiddle", "start", e), [cv(c, 0) for c in range(4)]),
            ("core_cherries", label("CherryMiddle", "core", e, "L"), [core(1), core(2), cv(0, 1), cv(3, 1)]),
            ("core_cherries", label("CherryMiddle", "core", e, "R"), [core(0), core(3), cv(1, 1), cv(2, 1)]),
            ("crossing_cherries", label("CherryMiddle", "crossing", e, "i"), [tw(0, 3), tw(1, 3)]),
            ("crossing_cherries", label("CherryMiddle", "crossing", e, "j"), [tw(3, 3), tw(2, 3)]),
        ]
        for c in range(4):
            checks.append(("twin_cherries", tw(c, 1), [core(c)]))
            checks.append(("twin_cherries", tw(c, lengths[c] - 1), []))
        for group, mid, attach in checks:
            why = _cherry_ok(g, idx, mid, attach)
            if why:
                groups[group].append(f"edge {e}: {why}")
    m = len(edges)
    for group, total in (("start_cherry", m), ("core_cherries", 2 * m), ("twin_cherries", 8 * m),
                         ("crossing_cherries", 2 * m)):
        _group_failures(rep, group, groups[group], total)

    bad = []
    for i in range(1, k + 1):
        for side in ("a", "b"):
            attach = []
            for e, edge in enumerate(edges):
                for c, (grid, _, s, col) in enumerate(_cable_slots(edge)):
                    if grid == i and s == side:
                        length = _cable_length(n, k, s, col)
                        attach += [label("CableVertex", e, c, length - 2), label("CableVertex", e, c, length - 1)]
            why = _cherry_ok(g, idx, label("ValveMiddle", i, side), attach)
            if why:
                bad.append(why)
    _group_failures(rep, "valve_cherries", bad, 2 * k)
    return rep


def mcc_mutations(out: ReductionOutput) -> dict[str, ReductionOutput]:
    """Single-mutation negative controls on the first gadget and first grid."""
    idx = out.index()
    muts = {
        "drop_crossing_cherry": remove_vertices(out, _cherry_vertices(out, label("CherryMiddle", "crossing", 0, "i"))),
        "drop_core_cherry": remove_vertices(out, _cherry_vertices(out, label("CherryMiddle", "core", 0, "L"))),
    }
    edge = out.meta["edges"][0]
    grid, _, side, col = _cable_slots(edge)[0]
    length = _cable_length(out.meta["n"], out.meta["k"], side, col)
    muts["drop_valve_edge"] = remove_edge(out, idx[label("ValveMiddle", grid, side)],
                                          idx[label("CableVertex", 0, 0, length - 1)])
    return muts


def planted_mcc(k: int = 4, n: int = 3, clique: Sequence[int] | None = None) -> tuple[MccInstance, list[int]]:
    """Instance with a planted multicolored clique and a fixed pattern of extra
    edges.  For k=4, n=3 it has 18 edges."""
    clique = list(clique) if clique is not None else [((i * 7) % n) + 1 for i in range(k)]
    edges = []
    for i, j in itertools.combinations(range(1, k + 1), 2):
        pi, pj = clique[i - 1], clique[j - 1]
        edges.append((i, pi, j, pj))
        edges.append((i, pi % n + 1, j, (pj + 1) % n + 1))
        edges.append((i, (pi + 1) % n + 1, j, pj % n + 1))
    return MccInstance(k, n, tuple(edges)), clique


# --- sparse 3-SAT ---------------------------------------------------------------

@dataclass(frozen=True)
class Sparse3SatInstance:
    """Variables 1..n split into groups, clauses split into groups.  A clause
    is a tuple of non-zero literals (negative means negated)."""

    n: int
    groups: tuple[tuple[int, ...], ...]
    clause_groups: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def root(self) -> int:
        return math.isqrt(self.n)


def validate_sparse3sat(inst: Sparse3SatInstance) -> list[str]:
    out = []
    s = math.isqrt(inst.n)
    if inst.n < 1 or s * s != inst.n:
        return [f"n={inst.n} is not a perfect square"]
    if len(inst.groups) != s:
        out.append(f"expected {s} variable groups, got {len(inst.groups)}")
    if len(inst.clause_groups) != s:
        out.append(f"expected {s} clause groups, got {len(inst.clause_groups)}")
    owner: dict[int, int] = {}
    for gi, grp in enumerate(inst.groups, 1):
        if len(grp) > s:
            out.append(f"variable group {gi} has {len(grp)} > {s} variables")
        for x in grp:
            if not 1 <= x <= inst.n:
                out.append(f"variable {x} out of range")
            elif x in owner:
                out.append(f"variable {x} in groups {owner[x]} and {gi}")
            else:
                owner[x] = gi
    missing = [x for x in range(1, inst.n + 1) if x not in owner]
    if missing:
        out.append(f"variables {missing[:5]} in no group")
    occ: dict[int, int] = {}
    for cj, cg in enumerate(inst.clause_groups, 1):
        if len(cg) > s:
            out.append(f"clause group {cj} has {len(cg)} > {s} clauses")
        incidences: dict[int, int] = {}
        for cl in cg:
            if not 1 <= len(cl) <= 3:
                out.append(f"clause {cl} must have 1 to 3 literals")
            vs = [abs(l) for l in cl]
            if 0 in vs or len(set(vs)) != len(vs):
                out.append(f"clause {cl} has a zero or repeated variable")
            for x in set(vs):
                occ[x] = occ.get(x, 0) + 1
                gi = owner.get(x)
                if gi is not None:
                    incidences[gi] = incidences.get(gi, 0) + 1
        for gi, cnt in sorted(incidences.items()):
            if cnt > 1:
                out.append(f"sparsity: {cnt} incidences between variable group {gi} and clause group {cj}")
    for x, cnt in sorted(occ.items()):
        if cnt > 3:
            out.append(f"variable {x} occurs in {cnt} > 3 clauses")
    return out


def parse_sat(text: str) -> Sparse3SatInstance:
    n = None
    groups: dict[int, tuple[int, ...]] = {}
    clauses: dict[int, list[tuple[int, ...]]] = {}
    for raw in text.splitlines():
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "s3sat" and len(tok) == 2:
            n = int(tok[1])
        elif tok[0] == "vg" and len(tok) >= 2:
            groups[int(tok[1])] = tuple(int(t) for t in tok[2:])
        elif tok[0] == "cl" and 3 <= len(tok) <= 5:
            clauses.setdefault(int(tok[1]), []).append(tuple(int(t) for t in tok[2:]))
        else:
            raise ValueError(f"bad line {raw!r}")
    if n is None:
        raise ValueError("missing 's3sat n' header")
    s = math.isqrt(n)
    return Sparse3SatInstance(
        n,
        tuple(groups.get(i, ()) for i in range(1, s + 1)),
        tuple(tuple(clauses.get(j, ())) for j in range(1, s + 1)),
    )


def format_sat(inst: Sparse3SatInstance) -> str:
    lines = [f"s3sat {inst.n}"]
    lines += [f"vg {i} " + " ".join(map(str, g)) for i, g in enumerate(inst.groups, 1)]
    for j, cg in enumerate(inst.clause_groups, 1):
        lines += [f"cl {j} " + " ".join(map(str, cl)) for cl in cg]
    return "\n".join(lines) + "\n"


def _satisfies(true_vars: set[int], clause: Sequence[int], domain: set[int]) -> bool:
    """Does setting ``true_vars`` true and the rest of ``domain`` false make a
    literal of ``clause`` true?  Literals outside ``domain`` do not count."""
    for lit in clause:
        x = abs(lit)
        if x in domain and (x in true_vars) == (lit > 0):
            return True
    return False


def colex_subsets(m: int, p: int) -> list[tuple[int, ...]]:
    """p-subsets of 1..m in colexicographic order."""
    return sorted(itertools.combinations(range(1, m + 1), p), key=lambda s: s[::-1])


def modulator_size(b: int) -> int:
    p = 1
    while math.comb(2 * p, p) < b:
        p += 1
    return p


@dataclass
class Modulator:
    graph: Graph
    labels: list[str]
    a: list[int]
    b: list[int]
    clique: list[int]
    set_rep: dict[int, tuple[int, ...]]
    connectors: list[list[int]]  # a, inner..., clique vertex
    p: int
    q: int


def _add_modulator(bld: GraphBuilder, a_ids: Sequence[int], b_ids: Sequence[int], lam: Mapping[int, int],
                   q: int, tag) -> tuple[list[int], dict[int, tuple[int, ...]], list[list[int]], int]:
    if q < 3:
        raise InvalidQ(f"q must be at least 3, got {q}")
    bset = set(b_ids)
    for a in a_ids:
        if lam.get(a) not in bset:
            raise ReductionError(f"lambda undefined or outside B at {a}")
    p = modulator_size(len(b_ids))
    clique = [bld.add_vertex(label("CliqueVertex", tag, t)) for t in range(1, 2 * p + 1)]
    for u, w in itertools.combinations(clique, 2):
        bld.add_edge(u, w)
    reps = colex_subsets(2 * p, p)
    set_rep = {b: reps[t] for t, b in enumerate(b_ids)}
    for b, rep in set_rep.items():
        for t in rep:
            bld.add_edge(b, clique[t - 1])
    connectors = []
    for a in a_ids:
        rep = set(set_rep[lam[a]])
        for t in range(1, 2 * p + 1):
            if t in rep:
                continue
            inner = [bld.add_vertex(label("ConnectorVertex", tag, bld.labels[a], t, h)) for h in range(1, q - 2)]
            path = [a] + inner + [clique[t - 1]]
            bld.add_path(path)
            connectors.append(path)
    return clique, set_rep, connectors, p


def distance_modulator(A: Sequence, B: Sequence, lam: Mapping, q: int) -> Modulator:
    """Gadget with ``a`` at distance ``q`` from ``lam[a]`` and ``q - 1`` from
    every other member of ``B``.  ``A`` and ``B`` are names; they become the
    first ``len(A) + len(B)`` vertices in that order."""
    if q < 3:
        raise InvalidQ(f"q must be at least 3, got {q}")
    bld = GraphBuilder()
    a_ids = [bld.add_vertex(label("ModA", x)) for x in A]
    b_ids = [bld.add_vertex(label("ModB", y)) for y in B]
    b_of = dict(zip(B, b_ids))
    try:
        lam_ids = {a_ids[t]: b_of[lam[x]] for t, x in enumerate(A)}
    except KeyError as exc:
        raise ReductionError(f"lambda undefined or outside B at {exc}") from None
    clique, set_rep, connectors, p = _add_modulator(bld, a_ids, b_ids, lam_ids, q, "D")
    return Modulator(bld.freeze(), bld.labels, a_ids, b_ids, clique, set_rep, connectors, p, q)


def check_modulator(mod: Modulator, lam_ids: Mapping[int, int]) -> list[str]:
    bad = []
    for a in mod.a:
        dist = bfs(mod.graph, a)
        for b in mod.b:
            want = mod.q if lam_ids[a] == b else mod.q - 1
            if dist[b] != want:
                bad.append(f"d({mod.labels[a]}, {mod.labels[b]})={dist[b]}, want {want}")
    return bad


def _assignment_mask_label(bits: int, width: int) -> str:
    return format(bits, f"0{width}b")[::-1] if width else "-"


def sat_to_ipp(inst: Sparse3SatInstance) -> ReductionOutput:
    problems = validate_sparse3sat(inst)
    if problems:
        if "perfect square" in problems[0]:
            raise NotPerfectSquare(problems[0])
        raise SparsityViolated("; ".join(problems))
    s = inst.root
    bld = GraphBuilder()

    # assignment gadgets: cycle vertex 0 is the "no assignment" vertex, vertex
    # t >= 1 encodes the subset with bitmask t-1 over the group's variables
    assign: list[list[int]] = []
    assign_true: dict[int, set[int]] = {}
    for i, grp in enumerate(inst.groups, 1):
        size = 2 ** len(grp) + 1
        cyc = []
        for t in range(size):
            tag = "bot" if t == 0 else _assignment_mask_label(t - 1, len(grp))
            v = bld.add_vertex(label("AssignmentVertex", i, tag))
            cyc.append(v)
            if t:
                assign_true[v] = {grp[b] for b in range(len(grp)) if (t - 1) >> b & 1}
        for t, v in enumerate(cyc):
            leaf = bld.add_vertex(label("AssignmentLeaf", i, t))
            bld.add_edge(v, leaf)
        bld.add_path(cyc + [cyc[0]])
        assign.append(cyc)

    # clause gadget
    layer: dict[int, list[int]] = {}
    for j in range(-2, s + 2):
        if j == -2:
            layer[j] = [bld.add_vertex(label("Y", t)) for t in range(1, s + 1)]
        elif j == s + 1:
            layer[j] = [bld.add_vertex(label("Z", t)) for t in range(1, s + 1)]
        elif j <= 0:
            layer[j] = [bld.add_vertex(label("ClauseLayer", j, t)) for t in range(1, s + 1)]
        else:
            cg = inst.clause_groups[j - 1]
            layer[j] = [bld.add_vertex(label("ClauseVertex", j, t)) for t in range(1, len(cg) + 1)]
            layer[j] += [bld.add_vertex(label("DummyVertex", j, t)) for t in range(1, s - len(cg) + 1)]
    for j in range(1, s + 1):
        for u in layer[j - 1]:
            for w in layer[j]:
                bld.add_edge(u, w)
    for j1, j2 in ((-2, -1), (-1, 0), (s, s + 1)):
        for u, w in zip(layer[j1], layer[j2]):
            bld.add_edge(u, w)
    for i in range(1, s + 1):
        for v in assign[i - 1]:
            bld.add_edge(layer[-2][i - 1], v)

    # distance modulators
    a_all = [v for cyc in assign for v in cyc]
    group_of = {v: i for i, cyc in enumerate(assign, 1) for v in cyc}
    lam_labels: dict[int, dict[str, str]] = {}
    all_connectors: list[list[int]] = []
    cliques: dict[int, list[int]] = {}
    for j in range(1, s + 1):
        cg = inst.clause_groups[j - 1]
        clause_ids = layer[j][:len(cg)]
        dummy = layer[j][len(cg)] if len(cg) < s else None
        lam: dict[int, int] = {}
        for a in a_all:
            grp = set(inst.groups[group_of[a] - 1])
            true_vars = assign_true.get(a)
            target = None
            if true_vars is not None:
                for c_id, cl in zip(clause_ids, cg):
                    if _satisfies(true_vars, cl, grp):
                        target = c_id
                        break
            if target is None:
                if dummy is None:
                    raise NoDummyClause(f"clause group {j} is full but {bld.labels[a]} satisfies none of it")
                target = dummy
            lam[a] = target
        b_ids = clause_ids + ([dummy] if dummy is not None else [])
        clique, _, conns, _ = _add_modulator(bld, a_all, b_ids, lam, j + 3, j)
        cliques[j] = clique
        all_connectors += conns
        lam_labels[j] = {bld.labels[a]: bld.labels[b] for a, b in lam.items()}

    for path in all_connectors:
        first, last = path[1], path[-2]
        tag = bld.labels[path[1]]
        for end, hook in ((1, first), (2, last)):
            leaf = bld.add_vertex(label("ConnectorLeaf", tag, end))
            bld.add_edge(hook, leaf)
    for j, clique in cliques.items():
        for w in clique:
            for t in (1, 2):
                leaf = bld.add_vertex(label("CliquePendant", j, bld.labels[w], t))
                bld.add_edge(w, leaf)

    k_clique = sum(len(c) for c in cliques.values())
    cycles = sum(2 ** len(grp) for grp in inst.groups)
    # leaf-consistent count: each cycle has 2^|V_i| + 1 leaves, plus one leaf per Z vertex
    k_target = (cycles + s + 2 * k_clique + 2 * len(all_connectors) + s) // 2
    k_formula = (cycles + 2 * k_clique + 2 * len(all_connectors) + s) / 2
    satisfied = {}
    for a in a_all:
        true_vars = assign_true.get(a)
        grp = set(inst.groups[group_of[a] - 1])
        for j in range(1, s + 1):
            for t, cl in enumerate(inst.clause_groups[j - 1], 1):
                sat = true_vars is not None and _satisfies(true_vars, cl, grp)
                satisfied[(bld.labels[a], label("ClauseVertex", j, t))] = sat
    meta = {
        "kind": "sat",
        "root": s,
        "lambda": lam_labels,
        "satisfied": satisfied,
        "k_formula_literal": k_formula,
        "connectors": len(all_connectors),
        "clique_vertices": k_clique,
    }
    return ReductionOutput(bld.freeze(), k_target, bld.labels, None, meta)


def _true_set(inst: Sparse3SatInstance, assignment) -> set[int]:
    if isinstance(assignment, Mapping):
        return {x for x, val in assignment.items() if val}
    lits = list(assignment)
    return {l for l in lits if l > 0}


def sat_witness(inst: Sparse3SatInstance, assignment, out: ReductionOutput | None = None) -> PathPartition:
    """Partition built from a satisfying assignment (a mapping var -> bool or an
    iterable of literals; unlisted variables are false)."""
    true_vars = _true_set(inst, assignment)
    all_vars = set(range(1, inst.n + 1))
    for cg in inst.clause_groups:
        for cl in cg:
            if not _satisfies(true_vars, cl, all_vars):
                raise NotSatisfying(f"clause {cl} is not satisfied")
    out = out or sat_to_ipp(inst)
    g, idx, labels = out.graph, out.index(), out.labels
    s = inst.root
    paths: PathPartition = []

    def leaves_of(v):
        return [u for u in g.adj[v] if g.degree(u) == 1]

    for v, lab in enumerate(labels):
        role, _ = parse_label(lab)
        if role == "CliqueVertex":
            l1, l2 = leaves_of(v)
            paths.append((l1, v, l2))
        elif role == "ConnectorVertex" and lab.endswith(",1)"):
            # walk the inner part of the connector starting from its first vertex
            inner = [v]
            prev = None
            cur = v
            while True:
                nxt = [u for u in g.adj[cur] if u != prev and parse_label(labels[u])[0] == "ConnectorVertex"
                       and u not in inner]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                inner.append(cur)
            t1 = [u for u in leaves_of(inner[0]) if labels[u] == label("ConnectorLeaf", lab, 1)]
            t2 = [u for u in leaves_of(inner[-1]) if labels[u] == label("ConnectorLeaf", lab, 2)]
            paths.append(tuple(t1 + inner + t2))

    chosen = []
    for i, grp in enumerate(inst.groups, 1):
        bits = sum(1 << b for b, x in enumerate(grp) if x in true_vars)
        v = idx[label("AssignmentVertex", i, _assignment_mask_label(bits, len(grp)))]
        chosen.append(v)
        cyc_size = 2 ** len(grp) + 1
        cyc = [idx[label("AssignmentVertex", i, "bot")]]
        cyc += [idx[label("AssignmentVertex", i, _assignment_mask_label(t, len(grp)))] for t in range(cyc_size - 1)]
        pos = cyc.index(v)
        rest = cyc[pos + 1:] + cyc[:pos]
        for a, b in zip(rest[0::2], rest[1::2]):
            paths.append((leaves_of(a)[0], a, b, leaves_of(b)[0]))

    # route one traversal path per group through the clause layers
    route: dict[int, dict[int, int]] = {i: {} for i in range(1, s + 1)}
    for j in range(1, s + 1):
        cg = inst.clause_groups[j - 1]
        taken: set[int] = set()
        for t, cl in enumerate(cg, 1):
            for i, grp in enumerate(inst.groups, 1):
                if i in taken:
                    continue
                if _satisfies(true_vars, cl, set(grp)):
                    route[i][j] = idx[label("ClauseVertex", j, t)]
                    taken.add(i)
                    break
        lam = out.meta["lambda"][j]
        dummies = [idx[label("DummyVertex", j, t)] for t in range(1, s - len(cg) + 1)]
        free = [i for i in range(1, s + 1) if i not in taken]
        # the first dummy is a modulator target: give it to a group mapped onto it
        if dummies:
            first = labels[dummies[0]]
            owner = next((i for i in free if lam[labels[chosen[i - 1]]] == first), free[0])
            route[owner][j] = dummies[0]
            free.remove(owner)
            for i, d in zip(free, dummies[1:]):
                route[i][j] = d
    for i in range(1, s + 1):
        v = chosen[i - 1]
        p = [leaves_of(v)[0], v, idx[label("Y", i)], idx[label("ClauseLayer", -1, i)], idx[label("ClauseLayer", 0, i)]]
        p += [route[i][j] for j in range(1, s + 1)]
        last = p[-1]
        p.append(next(u for u in g.adj[last] if parse_label(labels[u])[0] == "Z"))
        paths.append(tuple(p))
    return paths


def verify_sat_claims(out: ReductionOutput) -> ClaimReport:
    g, idx, labels = out.graph, out.index(), out.labels
    s = out.meta["root"]
    rep = ClaimReport()

    leaves = sum(1 for v in range(g.n) if g.degree(v) == 1)
    rep.add("leaf_count_is_2k", leaves == 2 * out.k_target, f"leaves={leaves}, k={out.k_target}")

    bad = []
    clique = [v for v, lab in enumerate(labels) if parse_label(lab)[0] == "CliqueVertex"]
    for w in clique:
        pend = [u for u in g.adj[w] if g.degree(u) == 1]
        if len(pend) != 2:
            bad.append(f"{labels[w]} has {len(pend)} pendants")
    _group_failures(rep, "clique_pendants", bad, len(clique))

    assign = [v for v, lab in enumerate(labels) if parse_label(lab)[0] == "AssignmentVertex"]
    dist_from = {a: bfs(g, a) for a in assign}

    # modulator distances, one check per clause group
    for j in range(1, s + 1):
        lam = out.meta["lambda"][j]
        targets = sorted(set(lam.values()))
        q = j + 3
        bad, total = [], 0
        for a in assign:
            want_b = lam.get(labels[a])
            for b_lab in targets:
                total += 1
                d = dist_from[a][idx[b_lab]] if b_lab in idx else INF
                want = q if b_lab == want_b else q - 1
                if d != want:
                    bad.append(f"d({labels[a]}, {b_lab})={d}, want {want}")
        _group_failures(rep, f"modulator_distances_{j}", bad, total)

    # connector paths with their two leaves are isometric
    bad = []
    conn_first = [v for v, lab in enumerate(labels) if parse_label(lab)[0] == "ConnectorVertex"
                  and lab.endswith(",1)")]
    for v in conn_first:
        lab = labels[v]
        t1 = idx.get(label("ConnectorLeaf", lab, 1))
        t2 = idx.get(label("ConnectorLeaf", lab, 2))
        inner = [v]
        while True:
            nxt = [u for u in g.adj[inner[-1]] if parse_label(labels[u])[0] == "ConnectorVertex" and u not in inner]
            if not nxt:
                break
            inner.append(nxt[0])
        if t1 is None or t2 is None:
            bad.append(f"{lab}: leaf missing")
            continue
        path = [t1] + inner + [t2]
        if not is_path(g, path):
            bad.append(f"{lab}: not a path")
        elif bfs(g, t1)[t2] != len(path) - 1:
            bad.append(f"{lab}: not isometric")
    _group_failures(rep, "connector_paths_isometric", bad, len(conn_first))

    # assignment vs clause distances
    bad_sat, bad_unsat, total = [], [], 0
    for (a_lab, c_lab), sat in out.meta["satisfied"].items():
        if a_lab not in idx or c_lab not in idx:
            continue
        j = int(parse_label(c_lab)[1][0])
        d = dist_from[idx[a_lab]][idx[c_lab]]
        total += 1
        if sat and d != j + 3:
            bad_sat.append(f"d({a_lab}, {c_lab})={d}, want {j + 3}")
        if not sat and d > j + 2:
            bad_unsat.append(f"d({a_lab}, {c_lab})={d}, want <= {j + 2}")
    _group_failures(rep, "satisfied_pairs_at_j+3", bad_sat, total)
    _group_failures(rep, "unsatisfied_pairs_within_j+2", bad_unsat, total)

    bad, total = [], 0
    for v, lab in enumerate(labels):
        role, args = parse_label(lab)
        if role != "DummyVertex":
            continue
        j = int(args[0])
        for a in assign:
            if lab in out.meta["lambda"][j].values() and out.meta["lambda"][j][labels[a]] != lab:
                continue
            total += 1
            if dist_from[a][v] != j + 3:
                bad.append(f"d({labels[a]}, {lab})={dist_from[a][v]}, want {j + 3}")
    _group_failures(rep, "dummy_distance_j+3", bad, total)

    gadget = [v for v, lab in enumerate(labels)
              if parse_label(lab)[0] in ("Y", "Z", "ClauseLayer", "ClauseVertex", "DummyVertex")]
    sub, _ = induced_subgraph(g, gadget)
    diam = max(max(x for x in bfs(sub, v) if x < INF) for v in range(sub.n))
    rep.add("clause_gadget_diameter", diam <= s + 2, f"diameter={diam}, bound={s + 2}")
    return rep


def sat_mutations(out: ReductionOutput) -> dict[str, ReductionOutput]:
    """Drop one connector path of the first modulator (inner vertices and its
    two leaves)."""
    idx = out.index()
    first = next(v for v, lab in enumerate(out.labels) if lab.startswith("ConnectorVertex(1,") and lab.endswith(",1)"))
    lab = out.labels[first]
    prefix = lab[:lab.rfind(",")]
    drop = [v for v, l in enumerate(out.labels) if l.startswith(prefix + ",")]
    drop += [idx[label("ConnectorLeaf", lab, 1)], idx[label("ConnectorLeaf", lab, 2)]]
    return {"drop_modulator_connector": remove_vertices(out, drop)}


def small_sat_instance() -> tuple[Sparse3SatInstance, dict[int, bool]]:
    """n = 4: groups {1,2}, {3,4}; one clause per clause group, each leaving a
    dummy slot; satisfied by x1 = x4 = True, x2 = x3 = False."""
    inst = Sparse3SatInstance(4, ((1, 2), (3, 4)), (((1, -3),), ((-2, 4),)))
    return inst, {1: True, 2: False, 3: False, 4: True}


# --- AND composition --------------------------------------------------------------

def and_composition(instances: Sequence[tuple[Graph, int]]) -> tuple[Graph, int]:
    """Disjoint union plus a path u-v-w whose middle touches one vertex of every
    component.  The composed target is k*t + 1."""
    if not instances:
        raise MismatchedClass("need at least one instance")
    k0, n0 = instances[0][1], instances[0][0].n
    for g, k in instances:
        if k != k0 or g.n != n0:
            raise MismatchedClass(f"instances differ: (n={g.n}, k={k}) vs (n={n0}, k={k0})")
    edges = []
    offset = 0
    hooks = []
    for g, _ in instances:
        edges += [(a + offset, b + offset) for a, b in g.edges()]
        hooks += [comp[0] + offset for comp in components(g)]
        offset += g.n
    u, v, w = offset, offset + 1, offset + 2
    edges += [(u, v), (v, w)] + [(v, h) for h in hooks]
    return Graph(offset + 3, edges), k0 * len(instances) + 1


__all__ = [name for name in dir() if not name.startswith("_")]
