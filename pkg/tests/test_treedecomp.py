import random

import pytest

from isopath.graph_core import Graph, complete_graph, cycle_graph, generate, path_graph, star_graph
from isopath.treedecomp import (
    FORGET,
    INTRODUCE,
    JOIN,
    LEAF,
    DecompositionError,
    TreeDecomposition,
    exact_treewidth_bruteforce,
    format_td,
    heuristic_td,
    make_nice,
    nice_decomposition,
    parse_td,
    validate,
    validate_nice,
)


def test_validate_accepts_and_rejects():
    assert validate(star_graph(3), TreeDecomposition(4, [(0, 1, 2, 3)])) == []
    assert TreeDecomposition(4, [(0, 1, 2, 3)]).width == 3
    p3 = path_graph(3)
    td = TreeDecomposition(3, [(0, 1), (1, 2)], [(0, 1)])
    assert validate(p3, td) == [] and td.width == 1
    assert validate(p3, TreeDecomposition(3, [(0, 1), (2,)], [(0, 1)]))


@pytest.mark.parametrize("strategy", ["min_fill", "min_degree"])
def test_heuristic_widths(strategy):
    rng = random.Random(2)
    for _ in range(10):
        tree = generate("tree", rng.randint(2, 12), seed=rng.randrange(1000))
        assert heuristic_td(tree, strategy).width == 1
    for n in range(3, 9):
        assert heuristic_td(cycle_graph(n), strategy).width == 2
    assert heuristic_td(complete_graph(5), strategy).width == 4


def test_heuristic_is_valid_on_random_graphs():
    for seed in range(20):
        g = generate("random", 8, seed)
        td = heuristic_td(g)
        assert validate(g, td) == []
        assert td.width >= exact_treewidth_bruteforce(g)


def test_bruteforce_on_cycles():
    for n in range(3, 9):
        assert exact_treewidth_bruteforce(cycle_graph(n)) == 2


def test_make_nice_single_bag_triangle():
    nice = make_nice(TreeDecomposition(3, [(0, 1, 2)]))
    kinds = [nd.kind for nd in nice.nodes]
    assert kinds == [LEAF, INTRODUCE, INTRODUCE, INTRODUCE, FORGET, FORGET, FORGET]
    assert not nice.nodes[0].bag and not nice.nodes[nice.root].bag
    assert validate_nice(complete_graph(3), nice) == []


def test_nice_shapes():
    for seed in range(15):
        g = generate("random", 10, seed)
        nice = nice_decomposition(g)
        assert validate_nice(g, nice) == []
        for i, nd in enumerate(nice.nodes):
            assert all(c < i for c in nd.children)
            if nd.kind == JOIN:
                assert all(nice.nodes[c].bag == nd.bag for c in nd.children)
        assert nice.subtree_vertices[nice.root] == frozenset(range(g.n))


def test_disconnected_graph_decomposes():
    g = Graph(5, [(0, 1), (3, 4)])
    nice = nice_decomposition(g)
    assert validate_nice(g, nice) == []


def test_td_round_trip():
    g = generate("grid", 9)
    td = heuristic_td(g)
    again = parse_td(format_td(td))
    assert again.bags == [tuple(b) for b in td.bags]
    assert validate(g, again) == []


@pytest.mark.parametrize("text", [
    "b 1 1 2\n",
    "s td 1 2 2\nb 1 1 2 3\n",
    "s td 2 2 3\nb 1 1 2\nb 3 2 3\n1 2\n",
    "s td 1 2 2\nb 1 x\n",
])
def test_td_parse_errors(text):
    with pytest.raises(DecompositionError):
        parse_td(text)
