"""``isopath`` command line.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 timeout.
Solver modules are imported inside their handlers so that ``verify`` only
pulls in graph_core.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .graph_core import (
    FAMILIES,
    DistMatrix,
    GraphError,
    format_gr,
    format_paths,
    generate,
    ip_partition_violations,
    load_gr,
    parse_paths,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str):
    try:
        return load_gr(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, GraphError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_paths(path: str):
    try:
        return parse_paths(_read(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# --- handlers --------------------------------------------------------------------

def cmd_solve(args) -> int:
    from .dp_core import SolveStats, TerminalPool, Timeout, solve_with_pool
    from .dp_diam import ProfilePool
    from .graph_core import components, induced_subgraph
    from .treedecomp import DecompositionError, load_td, make_nice, nice_decomposition, validate

    g = _load_graph(args.graph)
    make_pool = TerminalPool if args.algo == "xp" else ProfilePool
    if args.td:
        try:
            td = load_td(args.td)
        except (OSError, ValueError, DecompositionError) as exc:
            raise InputError(f"{args.td}: {exc}") from None
        problems = validate(g, td)
        if problems:
            raise InputError(f"{args.td}: {problems[0]}")
        parts = [(g, list(range(g.n)), make_nice(td))]
    else:
        parts = []
        for comp in components(g):
            h, back = induced_subgraph(g, comp)
            parts.append((h, back, nice_decomposition(h)))

    total, witness = 0, []
    merged = SolveStats()
    try:
        for h, back, nice in parts:
            k, w, ctx, _ = solve_with_pool(h, nice, make_pool(), None, args.timeout_ms)
            total += k
            witness += [tuple(back[v] for v in p) for p in w]
            _merge_stats(merged, ctx.stats)
    except Timeout as exc:
        _merge_stats(merged, exc.stats)
        print(f"timeout states_peak={merged.states_peak} width={merged.width}", file=sys.stderr)
        if args.stats:
            _write(args.stats, _stats_json(None, merged))
        return EXIT_TIMEOUT
    witness.sort()
    print(f"k={total}")
    if args.witness:
        _write(args.witness, format_paths(witness))
    if args.stats:
        _write(args.stats, _stats_json(total, merged))
    return EXIT_OK


def _merge_stats(into, st) -> None:
    into.table_sizes += st.table_sizes
    into.pool_sizes += st.pool_sizes
    into.width = max(into.width, st.width)
    into.ms += st.ms


def _stats_json(k, st) -> str:
    return json.dumps({
        "k": k,
        "width": st.width,
        "states_peak": st.states_peak,
        "pool_peak": max(st.pool_sizes, default=0),
        "nodes": len(st.table_sizes),
        "table_sizes": st.table_sizes,
    }, indent=1) + "\n"


def cmd_oracle(args) -> int:
    from .oracle import RequiredNotIsometric, RequiredOverlap, TooLarge, oracle_min_ipp

    g = _load_graph(args.graph)
    required = _load_paths(args.require) if args.require else []
    try:
        k, w = oracle_min_ipp(g, required)
    except (TooLarge, RequiredOverlap, RequiredNotIsometric) as exc:
        raise InputError(str(exc)) from None
    print(f"k={k}")
    if args.witness:
        _write(args.witness, format_paths(w))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    pp = _load_paths(args.witness)
    problems = ip_partition_violations(g, DistMatrix(g, lazy=True), pp)
    for v in problems[:20]:
        print(f"{v.kind}: {v.detail}")
    if args.k is not None and len(pp) != args.k:
        print(f"size: witness has {len(pp)} paths, expected {args.k}")
        return EXIT_FAIL
    if problems:
        return EXIT_FAIL
    print(f"ok paths={len(pp)}")
    return EXIT_OK


def _emit_reduction(out, prefix: str, witness, report) -> int:
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    Path(prefix + ".gr").write_text(format_gr(out.graph))
    Path(prefix + ".labels").write_text(out.format_labels())
    print(f"k={out.k_target}")
    print(f"n={out.graph.n} m={out.graph.m}")
    status = EXIT_OK
    if witness is not None:
        Path(prefix + ".paths").write_text(format_paths(witness))
        problems = ip_partition_violations(out.graph, DistMatrix(out.graph, lazy=True), witness)
        size_ok = len(witness) == out.k_target
        print(f"witness paths={len(witness)} size_matches={'yes' if size_ok else 'no'} "
              f"violations={len(problems)}")
        for v in problems[:10]:
            print(f"  {v.kind}: {v.detail}")
        if problems or not size_ok:
            status = EXIT_FAIL
    if report is not None:
        for line in report.lines():
            print(line)
        if not report.ok:
            status = EXIT_FAIL
    return status


def _ints(text: str) -> list[int]:
    vals = []
    for raw in text.splitlines():
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        try:
            vals += [int(t) for t in tok if t not in ("clique", "assign")]
        except ValueError:
            raise InputError(f"expected integers, got {raw!r}") from None
    return vals


def cmd_reduce_mcc(args) -> int:
    from .reductions import ReductionError, mcc_to_ipp, mcc_witness, parse_mcc, verify_mcc_claims

    try:
        inst = parse_mcc(_read(args.instance))
        out = mcc_to_ipp(inst)
        witness = mcc_witness(inst, _ints(_read(args.witness_from)), out) if args.witness_from else None
    except (ValueError, ReductionError) as exc:
        raise InputError(str(exc)) from None
    report = verify_mcc_claims(out) if args.verify_claims else None
    return _emit_reduction(out, args.out, witness, report)


def cmd_reduce_sat(args) -> int:
    from .reductions import ReductionError, parse_sat, sat_to_ipp, sat_witness, verify_sat_claims

    try:
        inst = parse_sat(_read(args.instance))
        out = sat_to_ipp(inst)
        witness = None
        if args.witness_from:
            lits = _ints(_read(args.witness_from))
            witness = sat_witness(inst, {abs(l): l > 0 for l in lits}, out)
    except (ValueError, ReductionError) as exc:
        raise InputError(str(exc)) from None
    report = verify_sat_claims(out) if args.verify_claims else None
    return _emit_reduction(out, args.out, witness, report)


def cmd_compose(args) -> int:
    from .reductions import MismatchedClass, and_composition

    graphs = [_load_graph(p) for p in args.inputs]
    try:
        g, k = and_composition([(h, args.k) for h in graphs])
    except MismatchedClass as exc:
        raise InputError(str(exc)) from None
    Path(args.out + ".gr").parent.mkdir(parents=True, exist_ok=True)
    Path(args.out + ".gr").write_text(format_gr(g))
    print(f"k={k}")
    print(f"n={g.n} m={g.m}")
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        g = generate(args.family, args.n, args.seed)
    except GraphError as exc:
        raise InputError(str(exc)) from None
    _write(args.out, format_gr(g, [f"family {args.family} n {args.n} seed {args.seed}"]))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .report import format_csv, random_suite, render_figures, run_bench

    if args.graphs:
        instances = [(Path(p).stem, _load_graph(p)) for p in args.graphs]
    else:
        instances = [(name, g) for name, g, _ in random_suite(args.count, args.seed, args.max_n, args.max_width)]
    algos = ["xp", "diam"] if args.algo == "both" else [args.algo]
    rows = run_bench(instances, algos, args.timeout_ms)
    text = format_csv(rows)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text(text)
    figs = render_figures(rows, out)
    sys.stdout.write(text)
    print(f"wrote {out / 'bench.csv'} and {len(figs)} figures", file=sys.stderr)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse already exits 2; keep the message short
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isopath", description="Minimum isometric path partition tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="exact DP over a tree decomposition")
    s.add_argument("--graph", required=True)
    s.add_argument("--td", help="PACE .td decomposition (default: min-fill heuristic)")
    s.add_argument("--algo", choices=("xp", "diam"), default="xp")
    s.add_argument("--witness", help="write the partition here")
    s.add_argument("--stats", help="write table statistics (JSON) here")
    s.add_argument("--timeout-ms", type=float)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("oracle", help="exact subset search for small graphs")
    s.add_argument("--graph", required=True)
    s.add_argument("--require", help="paths file that must be part of the partition")
    s.add_argument("--witness")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("verify", help="check a partition file")
    s.add_argument("--graph", required=True)
    s.add_argument("--witness", required=True)
    s.add_argument("--k", type=int)
    s.set_defaults(func=cmd_verify)

    for name, func, what in (("reduce-mcc", cmd_reduce_mcc, "clique file (one vertex index per class)"),
                             ("reduce-sat", cmd_reduce_sat, "assignment file (literals)")):
        s = sub.add_parser(name, help=f"build the gadget graph; witness from a {what}")
        s.add_argument("--instance", required=True)
        s.add_argument("--out", required=True, help="output prefix for .gr/.labels/.paths")
        s.add_argument("--witness-from")
        s.add_argument("--verify-claims", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("compose", help="AND-composition of equal-size instances")
    s.add_argument("--inputs", nargs="+", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--out", required=True, help="output prefix")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("gen", help="seeded instance generator")
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("bench", help="run both solvers on a suite; CSV plus figures")
    s.add_argument("--graphs", nargs="*", help=".gr files (default: random suite)")
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-n", type=int, default=10)
    s.add_argument("--max-width", type=int, default=3)
    s.add_argument("--algo", choices=("xp", "diam", "both"), default="both")
    s.add_argument("--timeout-ms", type=float)
    s.add_argument("--out", default="bench_out", help="directory for bench.csv and PNG figures")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"isopath: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
