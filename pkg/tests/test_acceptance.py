"""Acceptance criteria 1-10.  Each test records one PASS/FAIL line, echoed in
the pytest terminal summary and printed when run as a script."""

import random
import time

import pytest

from conftest import ACCEPTANCE_LINES, SUITE_SIZE, solve_suite
from isopath.dp_core import partial_order, trace_signature
from isopath.graph_core import (
    DistMatrix,
    apsp,
    diameter,
    format_gr,
    format_paths,
    generate,
    ip_partition_violations,
    is_ip_partition,
    random_cherry_graph,
    random_connected_graph,
)
from isopath.oracle import cherry_middles, lemma_normalization_check, oracle_min_ipp
from isopath.reductions import (
    and_composition,
    mcc_mutations,
    mcc_target,
    mcc_to_ipp,
    mcc_witness,
    planted_mcc,
    sat_mutations,
    sat_to_ipp,
    sat_witness,
    small_sat_instance,
    verify_mcc_claims,
    verify_sat_claims,
)

# Largest observed ratio table_size / max(pool, 1)^(2(w+1)) over the suite is 1.0
# (attained at leaf and root nodes); C is logged with every run.
TABLE_BOUND_C = 1.0


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_c01_oracle_equivalence(solved_suite):
    bad = []
    for row in solved_suite:
        g, d, nice = row["g"], row["d"], row["nice"]
        ko = row["oracle"][0]
        k, w, _, _ = row["xp"]
        assert g.n <= 10 and nice.width <= 3
        if k != ko or len(w) != k or not is_ip_partition(g, d, w):
            bad.append((row["name"], ko, k))
    ok = len(solved_suite) >= 200 and not bad
    record(1, ok, f"{len(solved_suite)} instances, {len(bad)} mismatches {bad[:3]}")
    assert ok


def test_c02_diam_equals_xp(solved_suite):
    bad = []
    for row in solved_suite:
        k_xp, k_diam, w = row["xp"][0], row["diam"][0], row["diam"][1]
        if k_xp != k_diam or not is_ip_partition(row["g"], row["d"], w):
            bad.append((row["name"], k_xp, k_diam))
    record(2, not bad, f"{len(solved_suite)} instances, {len(bad)} divergences {bad[:3]}")
    assert not bad


def test_c03_trace_completeness(solved_suite):
    checked, bad = 0, []
    for row in solved_suite:
        ko, wo = row["oracle"]
        for algo in ("xp", "diam"):
            _, _, ctx, tables = row[algo]
            for t in range(len(row["nice"].nodes)):
                sig, ps = trace_signature(ctx, t, wo)
                entry = tables[t].get(sig)
                checked += 1
                if entry is None or entry[0] > ko or entry[0] > partial_order(ps):
                    bad.append((row["name"], algo, t))
    record(3, not bad, f"{checked} (instance, node) traces, {len(bad)} missing {bad[:3]}")
    assert not bad


def test_c04_normalization_lemmas():
    rng = random.Random(4)
    kinds: dict[str, int] = {}
    bad, count = [], 0
    while count < 120:
        g = random_cherry_graph(rng.randint(5, 14), rng)
        assert g.n <= 14 and cherry_middles(g)
        rep = lemma_normalization_check(g)
        for kind, _, _ in rep.checks:
            kinds[kind] = kinds.get(kind, 0) + 1
        if not rep.ok:
            bad.append((format_gr(g), rep.violations))
        count += 1
    ok = not bad and kinds.get("cherry", 0) > 0 and kinds.get("twin", 0) > 0
    record(4, ok, f"{count} cherry-bearing graphs, checks {dict(sorted(kinds.items()))}, {len(bad)} violations")
    assert ok


def test_c05_mcc_gadget():
    t0 = time.perf_counter()
    inst, clique = planted_mcc(4, 3)
    out = mcc_to_ipp(inst)
    witness = mcc_witness(inst, clique, out)
    violations = ip_partition_violations(out.graph, DistMatrix(out.graph, lazy=True), witness)
    claims = verify_mcc_claims(out)
    parts = {
        "edges=18": len(inst.edges) == 18,
        "k'=464": out.k_target == mcc_target(4, 3, 18) == 464,
        f"witness_paths={len(witness)}": len(witness) == 464,
        f"witness_violations={len(violations)}": not violations,
    }
    for check in claims.checks:
        parts[check.name] = check.passed
    elapsed = time.perf_counter() - t0
    parts[f"runtime={elapsed:.1f}s"] = elapsed < 60
    ok = all(parts.values())
    failed = [k for k, v in parts.items() if not v]
    record(5, ok, f"{sum(parts.values())}/{len(parts)} sub-checks; failing: {failed}")
    for line in claims.lines():
        print("   ", line)
    assert ok, failed


def test_c06_sat_gadget():
    t0 = time.perf_counter()
    inst, assignment = small_sat_instance()
    assert inst.n == 4
    out = sat_to_ipp(inst)
    witness = sat_witness(inst, assignment, out)
    violations = ip_partition_violations(out.graph, DistMatrix(out.graph, lazy=True), witness)
    claims = verify_sat_claims(out)
    parts = {
        f"witness_paths={len(witness)}/k={out.k_target}": len(witness) == out.k_target,
        f"witness_violations={len(violations)}": not violations,
    }
    for check in claims.checks:
        parts[check.name] = check.passed
    elapsed = time.perf_counter() - t0
    parts[f"runtime={elapsed:.1f}s"] = elapsed < 60
    ok = all(parts.values())
    failed = [k for k, v in parts.items() if not v]
    record(6, ok, f"{sum(parts.values())}/{len(parts)} sub-checks; failing: {failed}")
    for line in claims.lines():
        print("   ", line)
    assert ok, failed


def test_c07_negative_controls():
    inst, _ = planted_mcc(4, 3)
    mcc_out = mcc_to_ipp(inst)
    sat_inst, _ = small_sat_instance()
    sat_out = sat_to_ipp(sat_inst)
    base_mcc = verify_mcc_claims(mcc_out).failed_names()
    base_sat = verify_sat_claims(sat_out).failed_names()
    flips = {}
    for name, mutated in mcc_mutations(mcc_out).items():
        flips[name] = sorted(verify_mcc_claims(mutated).failed_names() - base_mcc)
    for name, mutated in sat_mutations(sat_out).items():
        flips[name] = sorted(verify_sat_claims(mutated).failed_names() - base_sat)
    expected = {"drop_crossing_cherry", "drop_core_cherry", "drop_valve_edge", "drop_modulator_connector"}
    ok = set(flips) == expected and all(flips.values())
    record(7, ok, "; ".join(f"{k} -> {v}" for k, v in flips.items()))
    assert ok


def test_c08_and_composition():
    rng = random.Random(8)
    cases = []
    while len(cases) < 6:
        n = rng.randint(4, 8)
        g1 = random_connected_graph(n, rng, rng.uniform(0.2, 0.6))
        g2 = random_connected_graph(n, rng, rng.uniform(0.2, 0.6))
        k1, k2 = oracle_min_ipp(g1)[0], oracle_min_ipp(g2)[0]
        k = min(k1, k2) if len(cases) % 2 else max(k1, k2)
        cases.append((g1, g2, k, k1 <= k and k2 <= k))
    results = []
    for g1, g2, k, expect in cases:
        composed, target = and_composition([(g1, k), (g2, k)])
        assert target == 2 * k + 1
        kc, wc = oracle_min_ipp(composed)
        assert is_ip_partition(composed, apsp(composed), wc)
        results.append((expect, kc <= target))
    yes = sum(e for e, _ in results)
    ok = all(e == got for e, got in results) and 0 < yes < len(results)
    record(8, ok, f"{len(results)} pairs ({yes} yes / {len(results) - yes} no), agreement {[e == g for e, g in results]}")
    assert ok


def test_c09_state_space(solved_suite):
    worst_ratio, worst_diam, bad = 0.0, 0.0, []
    for row in solved_suite:
        nice = row["nice"]
        w = nice.width
        diam, _ = diameter(row["g"], row["d"])
        for algo in ("xp", "diam"):
            st = row[algo][2].stats
            for t, (size, pool) in enumerate(zip(st.table_sizes, st.pool_sizes)):
                ratio = size / max(pool, 1) ** (2 * (w + 1))
                worst_ratio = max(worst_ratio, ratio)
                if ratio > TABLE_BOUND_C:
                    bad.append((row["name"], algo, t, size, pool))
                if algo == "diam":
                    cap = 3 * (diam + 1) ** (w + 1)
                    worst_diam = max(worst_diam, pool / cap)
                    if pool > cap:
                        bad.append((row["name"], "diam-pool", t, pool, cap))
    ok = not bad
    record(9, ok, f"C={TABLE_BOUND_C}, observed max ratio {worst_ratio:.3g}, "
                  f"max pool/3(diam+1)^(w+1) {worst_diam:.3g}, {len(bad)} violations")
    assert ok


def _fingerprint(rows) -> list[str]:
    out = []
    for row in rows:
        out.append(format_gr(row["g"]))
        for algo in ("xp", "diam"):
            k, w, ctx, _ = row[algo]
            out.append(f"{algo} k={k} peak={ctx.stats.states_peak} sizes={ctx.stats.table_sizes}")
            out.append(format_paths(w))
        out.append(format_paths(row["oracle"][1]))
    return out


def test_c10_determinism(solved_suite):
    second = solve_suite()
    first_fp, second_fp = _fingerprint(solved_suite), _fingerprint(second)
    same_suite = first_fp == second_fp
    same_gen = all(format_gr(generate(f, 12, 3)) == format_gr(generate(f, 12, 3))
                   for f in ("random", "tree", "cycle", "grid", "cherry"))
    inst, _ = small_sat_instance()
    same_red = format_gr(sat_to_ipp(inst).graph) == format_gr(sat_to_ipp(inst).graph)
    ok = same_suite and same_gen and same_red
    diff = sum(a != b for a, b in zip(first_fp, second_fp))
    record(10, ok, f"suite of {SUITE_SIZE}: {'identical' if same_suite else f'{diff} differing records'}; "
                   f"generators {'identical' if same_gen else 'differ'}; reductions {'identical' if same_red else 'differ'}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
