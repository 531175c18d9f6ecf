import pytest

from treeplan.generators import gen_random_strips
from treeplan.oracles import bfs_oracle


def solvable_random_tasks(count, start_seed=0, num_facts=8, num_ops=14, **kw):
    """First ``count`` random tasks the BFS oracle proves solvable and non-trivial."""
    out = []
    seed = start_seed
    while len(out) < count:
        task = gen_random_strips(seed, num_facts, num_ops, **kw)
        seed += 1
        res = bfs_oracle(task)
        if res.solvable and res.length > 0:
            out.append(task)
    return out


@pytest.fixture(scope="session")
def random_solvable_50():
    return solvable_random_tasks(50)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
