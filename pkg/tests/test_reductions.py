import itertools

import pytest

from isopath.graph_core import Graph, apsp, is_isometric_path, path_graph
from isopath.oracle import oracle_min_ipp
from isopath.reductions import (
    InstanceTooSmall,
    IntraClassEdge,
    InvalidQ,
    MccInstance,
    MismatchedClass,
    NotAClique,
    NotSatisfying,
    Sparse3SatInstance,
    and_composition,
    check_modulator,
    colex_subsets,
    distance_modulator,
    format_mcc,
    format_sat,
    label,
    mcc_mutations,
    mcc_target,
    mcc_to_ipp,
    mcc_witness,
    modulator_size,
    parse_label,
    parse_mcc,
    parse_sat,
    planted_mcc,
    sat_mutations,
    sat_to_ipp,
    sat_witness,
    small_sat_instance,
    validate_sparse3sat,
    verify_mcc_claims,
    verify_sat_claims,
)


@pytest.fixture(scope="module")
def mcc():
    inst, clique = planted_mcc(4, 3)
    return inst, clique, mcc_to_ipp(inst)


@pytest.fixture(scope="module")
def sat():
    inst, assignment = small_sat_instance()
    return inst, assignment, sat_to_ipp(inst)


def test_labels_round_trip():
    lab = label("CableVertex", 3, 1, 7)
    assert lab == "CableVertex(3,1,7)"
    assert parse_label(lab) == ("CableVertex", ("3", "1", "7"))


# --- multicoloured clique side --------------------------------------------------

def test_mcc_target_formula():
    assert mcc_target(4, 3, 18) == 4 * 4 * 2 + 23 * 18 + 6 + 4 + 8 == 464


def test_mcc_validation():
    with pytest.raises(InstanceTooSmall):
        MccInstance(3, 3, ()).validate()
    with pytest.raises(IntraClassEdge):
        MccInstance(4, 3, ((1, 1, 1, 2),)).validate()
    inst, _ = planted_mcc()
    inst.validate()
    assert len(inst.edges) == 18


def test_mcc_text_round_trip():
    inst, _ = planted_mcc()
    assert parse_mcc(format_mcc(inst)) == inst
    with pytest.raises(ValueError):
        parse_mcc("e 1 1 2 2\n")


def test_mcc_labels_cover_every_vertex(mcc):
    _, _, out = mcc
    assert len(out.labels) == out.graph.n == len(set(out.labels))
    assert out.k_target == 464
    lines = out.format_labels().splitlines()
    assert lines[0].startswith("1 ") and len(lines) == out.graph.n


def test_mcc_structural_claims(mcc):
    _, _, out = mcc
    report = verify_mcc_claims(out)
    structural = {"columns_isometric", "x0_to_padding_is_N-1", "z0_equidistant_to_open_end", "grid_cherries",
                  "start_cherry", "core_cherries", "twin_cherries", "crossing_cherries", "valve_cherries"}
    assert structural <= {c.name for c in report.checks if c.passed}


def test_mcc_witness_is_a_partition(mcc):
    inst, clique, out = mcc
    witness = mcc_witness(inst, clique, out)
    seen = list(itertools.chain.from_iterable(witness))
    assert sorted(seen) == list(range(out.graph.n))


def test_mcc_witness_rejects_non_clique(mcc):
    inst, _, out = mcc
    with pytest.raises(NotAClique):
        mcc_witness(inst, [1, 1, 1, 1], out)


def test_mcc_mutations_flip_checks(mcc):
    _, _, out = mcc
    base = verify_mcc_claims(out).failed_names()
    for name, mutated in mcc_mutations(out).items():
        assert verify_mcc_claims(mutated).failed_names() - base, name


# --- sparse 3-SAT side -------------------------------------------------------------

def test_modulator_size():
    assert modulator_size(2) == 1
    assert modulator_size(3) == 2 and modulator_size(6) == 2 and modulator_size(7) == 3
    assert colex_subsets(4, 2)[:3] == [(1, 2), (1, 3), (2, 3)]


@pytest.mark.parametrize("nb, q", [(2, 3), (3, 4), (6, 5), (7, 3)])
def test_distance_modulator(nb, q):
    B = [f"b{t}" for t in range(nb)]
    A = [f"a{t}" for t in range(nb + 1)]
    lam = {a: B[t % nb] for t, a in enumerate(A)}
    mod = distance_modulator(A, B, lam, q)
    lam_ids = {mod.a[t]: mod.b[B.index(lam[a])] for t, a in enumerate(A)}
    assert check_modulator(mod, lam_ids) == []
    assert len(mod.clique) == 2 * modulator_size(nb)
    d = apsp(mod.graph)
    assert all(is_isometric_path(mod.graph, d, path) for path in mod.connectors)


def test_modulator_rejects_small_q():
    with pytest.raises(InvalidQ):
        distance_modulator(["a"], ["b"], {"a": "b"}, 2)


def test_sat_validation():
    inst, _ = small_sat_instance()
    assert validate_sparse3sat(inst) == []
    busy = Sparse3SatInstance(4, ((1, 2), (3, 4)), (((1,), (1, 3)), ((1,), (1, 4))))
    assert any("occurs in 4" in p for p in validate_sparse3sat(busy))
    crowded = Sparse3SatInstance(4, ((1, 2), (3, 4)), (((1, 2),), ()))
    assert any("sparsity" in p for p in validate_sparse3sat(crowded))
    assert validate_sparse3sat(Sparse3SatInstance(5, (), ()))


def test_sat_text_round_trip():
    inst, _ = small_sat_instance()
    assert parse_sat(format_sat(inst)) == inst


def test_assignment_cycles(sat):
    _, _, out = sat
    for i in (1, 2):
        cycle = [v for v, lab in enumerate(out.labels) if lab.startswith(f"AssignmentVertex({i},")]
        assert len(cycle) == 2 ** 2 + 1
        sub = set(cycle)
        assert all(sum(u in sub for u in out.graph.adj[v]) == 2 for v in cycle)


def test_sat_leaf_count_and_witness_size(sat):
    inst, assignment, out = sat
    leaves = sum(out.graph.degree(v) == 1 for v in range(out.graph.n))
    assert leaves == 2 * out.k_target
    witness = sat_witness(inst, assignment, out)
    assert len(witness) == out.k_target
    assert sorted(itertools.chain.from_iterable(witness)) == list(range(out.graph.n))


def test_sat_first_modulator_and_lower_bounds(sat):
    _, _, out = sat
    passed = {c.name for c in verify_sat_claims(out).checks if c.passed}
    assert {"leaf_count_is_2k", "clique_pendants", "modulator_distances_1", "connector_paths_isometric",
            "unsatisfied_pairs_within_j+2"} <= passed


def test_sat_witness_needs_satisfying_assignment(sat):
    inst, _, out = sat
    with pytest.raises(NotSatisfying):
        sat_witness(inst, {1: False, 2: True, 3: True, 4: False}, out)


def test_sat_mutation_flips_a_check(sat):
    _, _, out = sat
    base = verify_sat_claims(out).failed_names()
    (mutated,) = sat_mutations(out).values()
    assert verify_sat_claims(mutated).failed_names() - base


# --- AND composition ----------------------------------------------------------------

def test_and_composition_single_path():
    g, k = and_composition([(path_graph(3), 1)])
    assert g.n == 6 and k == 2
    assert oracle_min_ipp(g)[0] <= k


def test_and_composition_yes_and_no():
    p4, star = path_graph(4), Graph(4, [(0, 1), (0, 2), (0, 3)])
    g, k = and_composition([(p4, 1), (p4, 1)])
    assert k == 3 and oracle_min_ipp(g)[0] <= k
    g, k = and_composition([(p4, 1), (star, 1)])
    assert oracle_min_ipp(g)[0] > k


def test_and_composition_mismatch():
    with pytest.raises(MismatchedClass):
        and_composition([(path_graph(3), 1), (path_graph(4), 1)])
    with pytest.raises(MismatchedClass):
        and_composition([])
