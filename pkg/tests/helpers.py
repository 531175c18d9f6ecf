"""Audits and small task builders shared by the engine tests."""
import math

from treeplan import build_task
from treeplan.bandit import EMPTY, ArmStats, combine

TOL = 1e-9


def graph_task(edges, init, goal, extra_facts=()):
    """Task whose states are single graph nodes; ``edges`` are (u, v) pairs."""
    nodes = []
    for u, v in edges:
        for x in (u, v):
            if x not in nodes:
                nodes.append(x)
    for x in (init, goal, *extra_facts):
        if x not in nodes:
            nodes.append(x)
    ops = [(f"{u}-{v}", [u], [v], [u]) for u, v in edges]
    return build_task(nodes, ops, [init], [goal])


def state_of(task, name):
    return 1 << task.facts.index(name)


def expected_stats(tree, tn):
    h = tn.rec.hs[tree.hidx]
    s = EMPTY
    if h != math.inf and (tree.include_own or not tn.children):
        s = ArmStats(1, float(h), 0.0)
    for c in tn.children:
        s = combine(s, ArmStats(c.t, c.mean, c.m2))
    return s


def audit_tree(tree):
    """Full recomputation check; returns the number of nodes visited."""
    n = 0
    for tn in tree.iter_nodes():
        n += 1
        assert not tn.removed
        for c in tn.children:
            assert c.parent is tn
            assert c.depth == tn.depth + 1
        if tree.nodes.get(tn.rec.state) is tn:
            # a pinned stale duplicate shares its record with the live node
            assert tn.depth <= tn.rec.g
        s = expected_stats(tree, tn)
        assert tn.t == s.t
        assert abs(tn.mean - s.mean) < TOL * max(1.0, abs(s.mean))
        assert abs(tn.m2 - s.m2) < TOL * max(1.0, abs(s.m2))
        if tn.children:
            open_keys = [c.key for c in tn.children if not c.locked]
            assert tn.key == (min(open_keys) if open_keys else math.inf)
        h = tn.rec.hs[tree.hidx]
        should_lock = (tn.pinned or tn.rec.dead or h == math.inf
                       or (tn.expanded and all(c.locked for c in tn.children)))
        assert tn.locked == should_lock, tn
    return n
