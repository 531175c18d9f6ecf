from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from treeplan import build_task, is_goal, parse_task, successors, validate_plan
from treeplan.generators import gen_grid, gen_hanoi, gen_random_strips
from treeplan.oracles import bfs_oracle
from treeplan.task import TaskFormatError, dump_task, load_task, make_state, state_facts

MINIMAL = """\
facts a b
operator go
  pre a
  add b
init a
goal b
"""


def hanoi3_file():
    return load_task(resources.files("treeplan") / "data" / "hanoi-3.task")


def test_parse_minimal():
    t = parse_task(MINIMAL)
    assert t.num_facts == 2
    assert len(t.operators) == 1
    assert t.facts == ("a", "b")
    assert validate_plan(t, [0])


def test_parse_rejects_add_delete_overlap():
    doc = MINIMAL.replace("  add b", "  add b\n  del b")
    with pytest.raises(TaskFormatError, match="adds and deletes"):
        parse_task(doc)


def test_parse_reports_line_of_unknown_fact():
    doc = MINIMAL.replace("goal b", "goal zz")
    with pytest.raises(TaskFormatError, match=r"line 6: undeclared fact 'zz'"):
        parse_task(doc)


@pytest.mark.parametrize("doc, msg", [
    ("facts a\nfacts b\ninit a\ngoal a\n", "duplicate section"),
    ("facts a\nbogus a\n", "unknown section"),
    ("facts a$\ninit\ngoal\n", "invalid name"),
    ("facts a\ninit a\n", "missing section 'goal'"),
    ("facts a a\ninit a\ngoal a\n", "already declared"),
    ("facts a\noperator o\n  when a\ninit a\ngoal a\n", "unknown operator field"),
])
def test_parse_errors(doc, msg):
    with pytest.raises(TaskFormatError, match=msg):
        parse_task(doc)


def test_dump_roundtrip():
    for task in (gen_hanoi(3), gen_grid(3, 2), gen_random_strips(3, 9, 12)):
        again = parse_task(dump_task(task))
        assert again == task


def test_shipped_hanoi3():
    t = hanoi3_file()
    assert sum(f.startswith("peg-d") and f.endswith("-p1") for f in t.facts) == 3
    assert {f.split("-")[1] for f in t.facts if f.startswith("on-")} == {"d1", "d2", "d3"}
    assert bfs_oracle(t).length == 7
    assert t == gen_hanoi(3)


def test_successors_examples():
    t = build_task(["a", "b"], [("o", ["a"], ["b"], ["a"])], ["a"], ["b"])
    assert successors(t, make_state([0])) == [(0, make_state([1]))]
    assert successors(t, make_state([1])) == []
    assert len(successors(gen_hanoi(3), gen_hanoi(3).init)) == 2


def test_is_goal_examples():
    t = build_task(["a", "b"], [], ["a", "b"], ["a"])
    assert is_goal(t, t.init)
    empty = build_task(["a"], [], [], [])
    assert is_goal(empty, 0) and is_goal(empty, 1)
    h3 = gen_hanoi(3)
    s = h3.init
    for op in bfs_oracle(h3).plan:
        s = h3.apply(s, op)
    assert is_goal(h3, s)


def test_validate_plan_examples():
    t = build_task(["a", "b"], [("o", ["b"], ["a"], [])], ["a"], ["a"])
    assert validate_plan(t, [])
    assert not validate_plan(t, [0])
    assert not validate_plan(t, [5])
    h4 = gen_hanoi(4)
    plan = bfs_oracle(h4).plan
    assert len(plan) == 15 and validate_plan(h4, plan)
    assert not validate_plan(h4, plan[:-1])


@pytest.mark.parametrize("k", range(1, 7))
def test_hanoi_optimal_length(k):
    assert bfs_oracle(gen_hanoi(k)).length == 2 ** k - 1


def test_hanoi_range():
    for k in (0, 13):
        with pytest.raises(ValueError):
            gen_hanoi(k)


def test_grid_examples():
    assert bfs_oracle(gen_grid(2, 1)).length == 1
    assert bfs_oracle(gen_grid(5, 5)).length == 8


def test_generator_errors():
    with pytest.raises(ValueError):
        gen_grid(0, 3)
    with pytest.raises(ValueError):
        gen_random_strips(0, 3, 4, pre_size=4)
    with pytest.raises(ValueError):
        gen_random_strips(0, 2, 4, add_size=2, del_size=1)


def test_random_determinism():
    a = gen_random_strips(7, 8, 12)
    b = gen_random_strips(7, 8, 12)
    assert a == b
    assert dump_task(a) == dump_task(b)
    assert successors(a, a.init) == successors(b, b.init)
    assert gen_random_strips(8, 8, 12) != a


def test_state_helpers():
    assert state_facts(make_state([5, 0, 3])) == [0, 3, 5]
    assert make_state([]) == 0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(3, 12), m=st.integers(1, 25))
def test_successor_set_algebra(seed, n, m):
    t = gen_random_strips(seed, n, m)
    frontier = [t.init]
    seen = {t.init}
    while frontier and len(seen) < 60:
        s = frontier.pop()
        for op_id, s2 in successors(t, s):
            op = t.operators[op_id]
            assert op.pre <= set(state_facts(s))
            assert set(state_facts(s2)) == (set(state_facts(s)) - op.delete) | op.add
            if s2 not in seen:
                seen.add(s2)
                frontier.append(s2)
        ops = [o for o, _ in successors(t, s)]
        assert ops == sorted(ops)
