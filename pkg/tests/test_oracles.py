import ast
from pathlib import Path

import pytest

import treeplan.oracles as oracles
from treeplan import build_task
from treeplan.generators import gen_grid, gen_hanoi, gen_random_tree
from treeplan.oracles import (OracleCapExceeded, bfs_oracle, gbfs_reference, novelty_bruteforce,
                              relaxed_reachable)
from treeplan.task import make_state


def test_bfs_examples():
    assert bfs_oracle(gen_hanoi(3)).length == 7
    t = build_task(["a"], [], ["a"], ["a"])
    assert bfs_oracle(t).length == 0
    assert bfs_oracle(gen_grid(5, 5)).length == 8
    dead = build_task(["a", "b"], [], ["a"], ["b"])
    res = bfs_oracle(dead)
    assert not res.solvable and res.length is None


def test_bfs_cap():
    with pytest.raises(OracleCapExceeded):
        bfs_oracle(gen_hanoi(6), node_cap=50)


def test_gbfs_reference_examples():
    t = build_task(["a"], [], ["a"], ["a"])
    assert gbfs_reference(t, lambda s: 0) == ([], [])
    task, table = gen_random_tree(4, 30)
    trace, plan = gbfs_reference(task, lambda fs: table[make_state(fs)])
    assert trace[0] == frozenset([0])
    assert plan is not None
    task2, table2 = gen_random_tree(4, 30, goal=False)
    trace2, plan2 = gbfs_reference(task2, lambda fs: table2[make_state(fs)])
    assert plan2 is None and len(trace2) == 30


def test_gbfs_reference_skips_dead_children():
    t = build_task(["s", "x", "y", "g"], [("sx", ["s"], ["x"], ["s"]), ("sy", ["s"], ["y"], ["s"]),
                                          ("yg", ["y"], ["g"], ["y"])], ["s"], ["g"])
    h = {frozenset([0]): 2, frozenset([1]): float("inf"), frozenset([2]): 1}
    trace, plan = gbfs_reference(t, h.get)
    assert trace == [frozenset([0]), frozenset([2])] and plan == [1, 2]


def test_novelty_bruteforce_examples():
    assert novelty_bruteforce([], {1, 2}, (0,)) == 1
    hist = [({1, 2}, (0,))]
    assert novelty_bruteforce(hist, {1, 2}, (0,)) == 3
    assert novelty_bruteforce(hist, {1, 2}, (1,)) == 1
    hist.append(({3}, (0,)))
    assert novelty_bruteforce(hist, {1, 3}, (0,)) == 2
    assert novelty_bruteforce(hist, {4}, (0,)) == 1


def test_relaxed_reachable():
    t = build_task(["a", "b", "c"], [("ab", ["a"], ["b"], ["a"]), ("bc", ["b"], ["c"], ["b"])], ["a"], ["c"])
    assert relaxed_reachable(t, t.init)
    assert not relaxed_reachable(t, 0)


def test_oracles_do_not_import_engines():
    tree = ast.parse(Path(oracles.__file__).read_text())
    imported = set()
    for n in ast.walk(tree):
        if isinstance(n, ast.ImportFrom):
            imported.add((n.level, n.module or ""))
        elif isinstance(n, ast.Import):
            imported.update((0, a.name) for a in n.names)
    assert all(level == 0 and not mod.startswith("treeplan") for level, mod in imported), imported
