"""Benchmark runs over seeded instance suites: CSV rows plus PNG figures."""

from __future__ import annotations

import csv
import io
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .graph_core import Graph, apsp, components, diameter

CSV_COLUMNS = ("instance", "algo", "n", "m", "width", "diam", "k", "states_peak", "ms")


@dataclass
class BenchRow:
    instance: str
    algo: str
    n: int
    m: int
    width: int
    diam: int
    k: str  # empty on timeout
    states_peak: int
    ms: float


def random_suite(count: int, seed: int = 0, max_n: int = 10, max_width: int = 3):
    """``count`` connected graphs with 2..max_n vertices whose heuristic nice
    decomposition has width at most ``max_width``, as (name, graph, nice)."""
    from .treedecomp import nice_decomposition

    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(2, max_n)
        p = rng.uniform(0.15, 0.6)
        g = Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p])
        if len(components(g)) != 1:
            continue
        nice = nice_decomposition(g)
        if nice.width <= max_width:
            out.append((f"rand-s{seed}-{len(out):04d}", g, nice))
    return out


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ISOPATH_THREADS", "1")))
    except ValueError:
        return 1


def _bench_one(job) -> BenchRow:
    from .dp_core import TerminalPool, Timeout, solve_with_pool
    from .dp_diam import ProfilePool
    from .treedecomp import nice_decomposition

    name, g, algo, timeout_ms = job
    nice = nice_decomposition(g)
    d = apsp(g)
    diam, _ = diameter(g, d)
    pool = TerminalPool() if algo == "xp" else ProfilePool()
    try:
        k, _, ctx, _ = solve_with_pool(g, nice, pool, d, timeout_ms)
        stats, k_text = ctx.stats, str(k)
    except Timeout as exc:
        stats, k_text = exc.stats, ""
    return BenchRow(name, algo, g.n, g.m, nice.width, diam, k_text, stats.states_peak, round(stats.ms, 3))


def run_bench(instances: Sequence[tuple[str, Graph]], algos: Sequence[str] = ("xp", "diam"),
              timeout_ms: float | None = None, threads: int | None = None) -> list[BenchRow]:
    jobs = [(name, g, algo, timeout_ms) for name, g in instances for algo in algos]
    threads = threads or thread_count()
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            rows = list(ex.map(_bench_one, jobs))
    else:
        rows = [_bench_one(j) for j in jobs]
    return rows


def format_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(astuple(r))
    return buf.getvalue()


def parse_csv(text: str) -> list[BenchRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append(BenchRow(
            rec["instance"], rec["algo"], int(rec["n"]), int(rec["m"]), int(rec["width"]), int(rec["diam"]),
            rec["k"], int(rec["states_peak"]), float(rec["ms"]),
        ))
    return rows


def render_figures(rows: Sequence[BenchRow], out_dir) -> list[Path]:
    """Peak table size against width and running time against n, one series
    per algorithm.  Returns the written PNG paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    algos = sorted({r.algo for r in rows})
    written = []

    for fname, xkey, ykey, ylabel, logy in (
        ("states_vs_width.png", "width", "states_peak", "peak table size", True),
        ("states_vs_diam.png", "diam", "states_peak", "peak table size", True),
        ("ms_vs_n.png", "n", "ms", "wall time (ms)", True),
    ):
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for i, algo in enumerate(algos):
            sel = [r for r in rows if r.algo == algo]
            jitter = (i - (len(algos) - 1) / 2) * 0.12
            ax.scatter([getattr(r, xkey) + jitter for r in sel], [max(getattr(r, ykey), 1e-3) for r in sel],
                       s=14, alpha=0.7, label=algo)
        ax.set_xlabel(xkey)
        ax.set_ylabel(ylabel)
        if logy:
            ax.set_yscale("log")
        ax.legend()
        fig.tight_layout()
        path = out_dir / fname
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written


__all__ = ["BenchRow", "CSV_COLUMNS", "format_csv", "parse_csv", "random_suite", "render_figures", "run_bench",
           "thread_count"]
