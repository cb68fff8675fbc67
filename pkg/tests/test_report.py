from isopath.report import CSV_COLUMNS, format_csv, parse_csv, random_suite, render_figures, run_bench


def test_random_suite_is_seeded_and_bounded():
    a = random_suite(15, seed=3, max_n=9, max_width=2)
    b = random_suite(15, seed=3, max_n=9, max_width=2)
    assert [(n, g) for n, g, _ in a] == [(n, g) for n, g, _ in b]
    assert all(g.n <= 9 and nice.width <= 2 for _, g, nice in a)


def test_bench_rows_and_csv_round_trip(tmp_path):
    suite = [(name, g) for name, g, _ in random_suite(4, seed=1, max_n=7)]
    rows = run_bench(suite, ("xp", "diam"), threads=1)
    assert len(rows) == 8
    for xp, diam in zip(rows[::2], rows[1::2]):
        assert xp.instance == diam.instance and xp.k == diam.k != ""
    text = format_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert parse_csv(text) == rows


def test_parallel_bench_matches_serial():
    suite = [(name, g) for name, g, _ in random_suite(4, seed=2, max_n=7)]
    serial = run_bench(suite, ("xp",), threads=1)
    parallel = run_bench(suite, ("xp",), threads=2)
    strip = lambda rows: [(r.instance, r.k, r.states_peak) for r in rows]
    assert strip(serial) == strip(parallel)


def test_timeout_leaves_k_empty():
    from isopath.graph_core import generate

    rows = run_bench([("big", generate("random", 30, seed=4))], ("xp",), timeout_ms=1, threads=1)
    assert rows[0].k == ""


def test_figures_written(tmp_path):
    suite = [(name, g) for name, g, _ in random_suite(3, seed=5, max_n=6)]
    paths = render_figures(run_bench(suite, threads=1), tmp_path)
    assert {p.name for p in paths} == {"states_vs_width.png", "states_vs_diam.png", "ms_vs_n.png"}
    assert all(p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in paths)
