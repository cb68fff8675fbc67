"""Exact minimum isometric path partition by memoized subset search.

Intended for graphs of at most ~22 vertices; it is the reference every other
solver is checked against.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Sequence

from .graph_core import INF, DistMatrix, Graph, apsp, diameter, is_path

MAX_N = 22


class TooLarge(ValueError):
    pass


class RequiredOverlap(ValueError):
    pass


class RequiredNotIsometric(ValueError):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def enum_isometric_paths(g: Graph, d: DistMatrix, allowed, anchor: int) -> list[tuple[int, ...]]:
    """All isometric paths inside ``allowed`` that contain ``anchor``.

    Each path is listed once, oriented with the smaller endpoint first.  The
    list is sorted longest first, ties broken lexicographically.
    """
    if isinstance(allowed, int):
        allowed_mask = allowed
    else:
        allowed_mask = 0
        for v in allowed:
            allowed_mask |= 1 << v
    if not allowed_mask >> anchor & 1:
        raise ValueError("anchor outside the allowed set")
    # Restrict starts: an isometric path through anchor that starts at s must
    # have every vertex at the right distance from s, so s only needs to be
    # within reach.
    out: list[tuple[int, ...]] = []
    adj = g.adj
    for s in _bits(allowed_mask):
        ds = d[s]
        if ds[anchor] >= INF:
            continue
        path = [s]
        seen = 1 << s

        def grow(j: int, has_anchor: bool) -> None:
            nonlocal seen
            last = path[-1]
            if has_anchor and (j == 0 or s < last):
                out.append(tuple(path))
            for w in adj[last]:
                if allowed_mask >> w & 1 and not seen >> w & 1 and ds[w] == j + 1:
                    path.append(w)
                    seen |= 1 << w
                    grow(j + 1, has_anchor or w == anchor)
                    seen &= ~(1 << w)
                    path.pop()

        grow(0, s == anchor)
    out.sort(key=lambda p: (-len(p), p))
    return out


def _mask(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


class _Solver:
    def __init__(self, g: Graph, d: DistMatrix, anchored: bool = True):
        self.g = g
        self.d = d
        self.anchored = anchored
        diam, _ = diameter(g, d)
        self.span = diam + 1
        self.memo: dict[int, tuple[int, tuple[int, ...] | None]] = {0: (0, None)}

    def lower(self, mask: int) -> int:
        c = mask.bit_count()
        return -(-c // self.span)

    def f(self, mask: int) -> int:
        hit = self.memo.get(mask)
        if hit is not None:
            return hit[0]
        anchor = (mask & -mask).bit_length() - 1
        if self.anchored:
            anchors = [anchor]
        else:
            anchors = list(_bits(mask))
        best, best_p = INF, None
        lb = self.lower(mask)
        seen_paths = set()
        for a in anchors:
            for p in enum_isometric_paths(self.g, self.d, mask, a):
                if p in seen_paths:
                    continue
                seen_paths.add(p)
                val = 1 + self.f(mask & ~_mask(p))
                if val < best:
                    best, best_p = val, p
                    if best <= lb:
                        break
            if best <= lb:
                break
        self.memo[mask] = (best, best_p)
        return best

    def witness(self, mask: int) -> list[tuple[int, ...]]:
        out = []
        while mask:
            self.f(mask)
            _, p = self.memo[mask]
            out.append(p)
            mask &= ~_mask(p)
        return out


def _check_required(g: Graph, d: DistMatrix, required: Sequence[Sequence[int]]) -> int:
    used = 0
    for p in required:
        p = tuple(p)
        if not is_path(g, p) or d[p[0]][p[-1]] != len(p) - 1:
            raise RequiredNotIsometric(f"required path {p} is not an isometric path")
        pm = _mask(p)
        if used & pm:
            raise RequiredOverlap(f"required path {p} overlaps an earlier one")
        used |= pm
    return used


def oracle_min_ipp(g: Graph, required: Sequence[Sequence[int]] = (), d: DistMatrix | None = None,
                   anchored: bool = True) -> tuple[int, list[tuple[int, ...]]]:
    """Minimum number of isometric paths partitioning V(g) that include every
    path of ``required``.  Returns ``(k, witness)``."""
    if g.n > MAX_N:
        raise TooLarge(f"oracle limited to {MAX_N} vertices, got {g.n}")
    d = d or apsp(g)
    used = _check_required(g, d, required)
    limit = sys.getrecursionlimit()
    if limit < 200:
        sys.setrecursionlimit(200)
    s = _Solver(g, d, anchored=anchored)
    rest = ((1 << g.n) - 1) & ~used
    k = len(required) + s.f(rest)
    return k, [tuple(p) for p in required] + s.witness(rest)


def oracle_min_with_choice(g: Graph, choices: Sequence[Sequence[int]],
                           d: DistMatrix | None = None) -> int:
    """Minimum over partitions that contain at least one path of ``choices``."""
    d = d or apsp(g)
    s = _Solver(g, d)
    full = (1 << g.n) - 1
    best = INF
    for p in choices:
        best = min(best, 1 + s.f(full & ~_mask(p)))
    return best


# --- normalization checks -----------------------------------------------------

def _leaf_neighbors(g: Graph, v: int) -> list[int]:
    return [u for u in g.adj[v] if g.degree(u) == 1]


def cherry_middles(g: Graph) -> list[int]:
    return [v for v in range(g.n) if len(_leaf_neighbors(g, v)) == 2]


def twin_cherry_patterns(g: Graph, d: DistMatrix) -> list[tuple[int, tuple[int, ...], int]]:
    """``(m1, inner, m2)`` for every pair of cherry middles joined by an
    isometric path whose inner vertices touch nothing else."""
    mids = set(cherry_middles(g))
    found = []
    for m1 in sorted(mids):
        for start in g.adj[m1]:
            if g.degree(start) == 1:
                continue
            inner: list[int] = []
            prev, cur = m1, start
            while cur not in mids and g.degree(cur) == 2:
                inner.append(cur)
                prev, cur = cur, next(w for w in g.adj[cur] if w != prev)
            if cur in mids and cur > m1 and cur not in inner:
                m2 = cur
                if d[m1][m2] == len(inner) + 1:
                    found.append((m1, tuple(inner), m2))
    return found


@dataclass
class NormalizationReport:
    base: int
    checks: list[tuple[str, tuple, int]] = field(default_factory=list)

    @property
    def violations(self) -> list[tuple[str, tuple, int]]:
        return [c for c in self.checks if c[2] != self.base]

    @property
    def ok(self) -> bool:
        return not self.violations


def lemma_normalization_check(g: Graph, d: DistMatrix | None = None) -> NormalizationReport:
    """Compare the unconstrained optimum with optima forced to contain each
    prescribed leaf, cherry and twin-cherry path."""
    if g.n > 18:
        raise TooLarge("normalization check limited to 18 vertices")
    d = d or apsp(g)
    base, _ = oracle_min_ipp(g, d=d)
    rep = NormalizationReport(base)
    for v in range(g.n):
        leaves = _leaf_neighbors(g, v)
        if len(leaves) == 1:
            u = leaves[0]
            # any isometric path of length >= 1 with u as an endpoint
            ends = [p for p in enum_isometric_paths(g, d, (1 << g.n) - 1, u)
                    if len(p) > 1 and u in (p[0], p[-1])]
            rep.checks.append(("leaf", (u,), oracle_min_with_choice(g, ends, d)))
        elif len(leaves) == 2:
            path = (leaves[0], v, leaves[1])
            rep.checks.append(("cherry", path, oracle_min_ipp(g, [path], d=d)[0]))
    for m1, inner, m2 in twin_cherry_patterns(g, d):
        l1, l2 = _leaf_neighbors(g, m1), _leaf_neighbors(g, m2)
        req = [(l1[0], m1, l1[1]), (l2[0], m2, l2[1])]
        if inner:
            req.append(inner)
        rep.checks.append(("twin", tuple(req), oracle_min_ipp(g, req, d=d)[0]))
    return rep
