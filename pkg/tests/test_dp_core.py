import random

import pytest

from isopath.dp_core import (
    DPContext,
    EndpointMismatch,
    NotAPath,
    TerminalPool,
    Timeout,
    assemble,
    check_coherence,
    dp_leaf,
    partial_order,
    run_tables,
    solve_by_components,
    solve_with_pool,
    solve_xp,
    trace_signature,
)
from isopath.graph_core import (
    Graph,
    apsp,
    complete_graph,
    cycle_graph,
    generate,
    grid_graph,
    is_ip_partition,
    path_graph,
    star_graph,
)
from isopath.oracle import oracle_min_ipp
from isopath.treedecomp import TreeDecomposition, make_nice, nice_decomposition


def test_assemble_regular_and_links():
    g = path_graph(3)
    a = assemble(g, [(0, 1)], [], [], 0, 1)
    assert a.vertices == (0, 1) and a.kinds == ("Regular",)
    c4 = cycle_graph(4)
    a = assemble(c4, [(0,), (2,)], [(0, 2)], [], 0, 2)
    assert a.vertices == (0, 2) and a.kinds == ("TopLink",)


def test_assemble_errors():
    g = star_graph(3)
    with pytest.raises(NotAPath):
        assemble(g, [(1, 0)], [(0, 2), (0, 3)], [], 1, 2)
    with pytest.raises(EndpointMismatch):
        assemble(path_graph(3), [(0, 1, 2)], [], [], 0, 1)


def test_top_link_needs_a_route_above():
    g = path_graph(3)
    nice = make_nice(TreeDecomposition(3, [(0, 2), (0, 1, 2)], [(0, 1)]), root=0)
    ctx = DPContext(g, apsp(g), nice)
    t = next(i for i, nd in enumerate(nice.nodes)
             if nd.bag == frozenset({0, 2}) and 1 in nice.subtree_vertices[i])
    assert not check_coherence(ctx, t, ((0, 2), "T"))
    assert check_coherence(ctx, t, ((0, 2), "B"))


def test_leaf_table():
    g = path_graph(2)
    nice = nice_decomposition(g)
    assert dp_leaf(DPContext(g, apsp(g), nice), 0) == {(): (0, ())}


@pytest.mark.parametrize("g, k", [
    (path_graph(1), 1),
    (path_graph(5), 1),
    (path_graph(9), 1),
    (cycle_graph(4), 2),
    (cycle_graph(7), 2),
    (star_graph(4), 3),
    (complete_graph(4), 2),
    (grid_graph(3, 3), 3),
])
def test_known_optima(g, k):
    got, w = solve_xp(g, nice_decomposition(g))
    assert got == k == len(w)
    assert is_ip_partition(g, apsp(g), w)


def test_against_oracle_min_degree():
    rng = random.Random(11)
    for _ in range(30):
        g = generate("random", rng.randint(3, 9), rng.randrange(10_000))
        nice = nice_decomposition(g, "min_degree")
        k, w = solve_xp(g, nice)
        assert k == oracle_min_ipp(g)[0]
        assert is_ip_partition(g, apsp(g), w)


def test_components_add_up():
    g = Graph(7, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 3)])

    def solver(h, nice):
        k, w, ctx, _ = solve_with_pool(h, nice, TerminalPool())
        return k, w, ctx.stats

    k, w, stats = solve_by_components(g, solver)
    assert k == 1 + 2 + 1 and len(stats) == 3
    assert is_ip_partition(g, apsp(g), w)


def test_traces_are_in_tables():
    for seed in range(15):
        g = generate("random", 8, seed)
        nice = nice_decomposition(g)
        ko, wo = oracle_min_ipp(g)
        _, _, ctx, tables = solve_with_pool(g, nice, TerminalPool())
        root_sig, _ = trace_signature(ctx, nice.root, wo)
        assert root_sig == ()
        for t in range(len(nice.nodes)):
            sig, ps = trace_signature(ctx, t, wo)
            assert sig in tables[t]
            assert tables[t][sig][0] <= partial_order(ps)


def test_timeout_carries_stats():
    g = generate("random", 30, seed=4)
    with pytest.raises(Timeout) as info:
        solve_with_pool(g, nice_decomposition(g), TerminalPool(), timeout_ms=1)
    assert info.value.stats.width > 0


def test_stats_recorded():
    g = cycle_graph(6)
    nice = nice_decomposition(g)
    _, _, ctx, tables = solve_with_pool(g, nice, TerminalPool())
    assert ctx.stats.table_sizes == [len(t) for t in tables]
    assert ctx.stats.states_peak == max(len(t) for t in tables)
    assert ctx.stats.width == 2 and ctx.stats.ms > 0
