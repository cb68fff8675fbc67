import pytest

from isopath.graph_core import apsp
from isopath.report import random_suite

SUITE_SIZE = 200
SUITE_SEED = 0

# lines appended by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def solve_suite(size=SUITE_SIZE, seed=SUITE_SEED):
    """Oracle, xp and diam results for every instance of the seeded suite."""
    from isopath.dp_core import TerminalPool, solve_with_pool
    from isopath.dp_diam import ProfilePool
    from isopath.oracle import oracle_min_ipp

    rows = []
    for name, g, nice in random_suite(size, seed):
        d = apsp(g)
        ko, wo = oracle_min_ipp(g, d=d)
        entry = {"name": name, "g": g, "nice": nice, "d": d, "oracle": (ko, wo)}
        for algo, pool in (("xp", TerminalPool()), ("diam", ProfilePool())):
            k, w, ctx, tables = solve_with_pool(g, nice, pool, d)
            entry[algo] = (k, w, ctx, tables)
        rows.append(entry)
    return rows


@pytest.fixture(scope="session")
def solved_suite():
    return solve_suite()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
