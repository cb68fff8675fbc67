"""Terminal pool keyed by distance profiles.

Two vertices on the same side of a node (bag, below, above) with the same
distances to every bag vertex are interchangeable as path terminals, so the
DP only needs one representative per class.  On graphs of small diameter the
number of classes depends on the diameter and the bag size, not on n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dp_core import BOTTOM, IN_BAG, TOP, DPContext, TerminalPool, solve_with_pool
from .graph_core import DistMatrix, Graph
from .treedecomp import NiceDecomposition

SIDE_NAMES = {IN_BAG: "InBag", BOTTOM: "Bottom", TOP: "Top"}


@dataclass(frozen=True)
class DistanceProfile:
    dists: tuple[int, ...]
    side: int


@dataclass
class RepresentativeMap:
    bag: tuple[int, ...]
    rep_of: list[int]  # vertex -> representative
    classes: dict[DistanceProfile, list[int]]  # profile -> sorted members

    def representative(self, p: DistanceProfile) -> int:
        return self.classes[p][0]

    def __len__(self) -> int:
        return len(self.classes)


def profiles(g: Graph, d: DistMatrix, nice: NiceDecomposition, t: int) -> RepresentativeMap:
    """Group vertices by (distances to the bag of t, side of t)."""
    nd = nice.nodes[t]
    bag = tuple(sorted(nd.bag))
    sub = nice.subtree_vertices[t]
    classes: dict[DistanceProfile, list[int]] = {}
    for v in range(g.n):
        row = d[v]
        side = IN_BAG if v in nd.bag else (BOTTOM if v in sub else TOP)
        key = DistanceProfile(tuple(row[b] for b in bag), side)
        classes.setdefault(key, []).append(v)
    rep_of = [0] * g.n
    for members in classes.values():
        for v in members:
            rep_of[v] = members[0]
    return RepresentativeMap(bag, rep_of, classes)


class ProfilePool(TerminalPool):
    """Terminals are profile-class representatives."""

    exact = False

    def bind(self, ctx: DPContext) -> None:
        self.ctx = ctx
        self._maps: dict[int, RepresentativeMap] = {}
        self._profile_of: dict[int, dict[int, DistanceProfile]] = {}
        self._by_key: dict[int, dict[tuple, int]] = {}

    def rmap(self, t: int) -> RepresentativeMap:
        m = self._maps.get(t)
        if m is None:
            m = profiles(self.ctx.g, self.ctx.d, self.ctx.nice, t)
            self._maps[t] = m
            self._profile_of[t] = {ms[0]: p for p, ms in m.classes.items()}
            self._by_key[t] = {(p.dists, p.side): ms[0] for p, ms in m.classes.items()}
        return m

    def rep(self, t: int, v: int) -> int:
        return self.rmap(t).rep_of[v]

    def members(self, t: int, r: int) -> list[int]:
        self.rmap(t)
        return self._maps[t].classes[self._profile_of[t][r]]

    def key(self, t: int, r: int):
        self.rmap(t)
        return self._profile_of[t][r].dists

    def rep_by_key(self, t: int, key, side: int):
        self.rmap(t)
        return self._by_key[t].get((key, side))

    def top_reps(self, t: int) -> list[int]:
        return sorted(ms[0] for p, ms in self.rmap(t).classes.items() if p.side == TOP)

    def size(self, t: int) -> int:
        return len(self.rmap(t))

    def terminal_weight(self, t: int, r: int, y: int, side: int) -> int:
        return self.ctx.d[r][y]


def solve_diam(g: Graph, nice: NiceDecomposition, d: DistMatrix | None = None,
               timeout_ms: float | None = None) -> tuple[int, list[tuple[int, ...]]]:
    """Same answer as the exact-terminal DP, with terminals drawn from profile
    representatives."""
    k, witness, _, _ = solve_with_pool(g, nice, ProfilePool(), d, timeout_ms)
    return k, witness
