import itertools

import pytest

from isopath.graph_core import (
    Graph,
    apsp,
    attach_cherry,
    complete_graph,
    cycle_graph,
    generate,
    is_ip_partition,
    path_graph,
    star_graph,
)
from isopath.oracle import (
    RequiredNotIsometric,
    RequiredOverlap,
    TooLarge,
    cherry_middles,
    enum_isometric_paths,
    lemma_normalization_check,
    oracle_min_ipp,
    twin_cherry_patterns,
)


def brute_force_min(g: Graph) -> int:
    """Try every ordered set partition shape by brute force (tiny graphs only)."""
    d = apsp(g)
    paths = set()
    for r in range(1, g.n + 1):
        for perm in itertools.permutations(range(g.n), r):
            if perm[0] <= perm[-1] and all(g.has_edge(a, b) for a, b in zip(perm, perm[1:])) \
                    and d[perm[0]][perm[-1]] == r - 1:
                paths.add(perm)
    best = g.n
    paths = sorted(paths)

    def rec(left: frozenset, used: int):
        nonlocal best
        if used >= best:
            return
        if not left:
            best = used
            return
        v = min(left)
        for p in paths:
            if v in p and left.issuperset(p):
                rec(left - set(p), used + 1)

    rec(frozenset(range(g.n)), 0)
    return best


def test_enum_k3_and_p3():
    k3 = complete_graph(3)
    got = enum_isometric_paths(k3, apsp(k3), 0b111, 0)
    assert set(got) == {(0,), (0, 1), (0, 2)}
    p3 = path_graph(3)
    assert set(enum_isometric_paths(p3, apsp(p3), 0b111, 1)) == {(1,), (0, 1), (1, 2), (0, 1, 2)}


@pytest.mark.parametrize("g, k", [
    (path_graph(7), 1),
    (star_graph(4), 3),
    (cycle_graph(4), 2),
    (cycle_graph(5), 2),
    (complete_graph(4), 2),
    (Graph(3), 3),
])
def test_known_optima(g, k):
    got, witness = oracle_min_ipp(g)
    assert got == k == len(witness)
    assert is_ip_partition(g, apsp(g), witness)


def test_matches_brute_force():
    for seed in range(25):
        g = generate("random", 7, seed)
        assert oracle_min_ipp(g)[0] == brute_force_min(g)


def test_required_paths():
    g = cycle_graph(6)
    k, w = oracle_min_ipp(g, [(0, 1)])
    assert (0, 1) in w and k == 2
    with pytest.raises(RequiredOverlap):
        oracle_min_ipp(g, [(0, 1), (1, 2)])
    with pytest.raises(RequiredNotIsometric):
        oracle_min_ipp(g, [(0, 1, 2, 3, 4)])
    with pytest.raises(TooLarge):
        oracle_min_ipp(path_graph(40))


def test_cherry_detection_and_normalization():
    p3 = path_graph(3)
    assert cherry_middles(p3) == [1]
    rep = lemma_normalization_check(p3)
    assert rep.base == 1 and rep.ok

    g, m1, _, _ = attach_cherry(cycle_graph(5), [0])
    g, m2, _, _ = attach_cherry(g, [m1])
    assert twin_cherry_patterns(g, apsp(g)) == [(m1, (), m2)]
    rep = lemma_normalization_check(g)
    assert rep.ok and any(kind == "twin" for kind, _, _ in rep.checks)


def test_normalization_on_random_cherry_bases():
    for seed in range(20):
        base = generate("random", 7, seed)
        g, _, _, _ = attach_cherry(base, [0, base.n - 1])
        assert lemma_normalization_check(g).ok
