"""Naive reference implementations for tests.

Nothing here imports the engines it is used to check. States are frozensets
of fact ids and successors are recomputed from the operator sets directly.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

UNSOLVABLE = None


class OracleCapExceeded(RuntimeError):
    pass


@dataclass
class OracleResult:
    length: int | None  # None when unsolvable
    plan: list = field(default_factory=list)
    expanded: int = 0

    @property
    def solvable(self) -> bool:
        return self.length is not None


def _facts_of(bits: int) -> frozenset:
    return frozenset(i for i in range(bits.bit_length()) if bits >> i & 1)


def _ops(task):
    return [(frozenset(op.pre), frozenset(op.add), frozenset(op.delete)) for op in task.operators]


def _succ(ops, s):
    for i, (pre, add, dele) in enumerate(ops):
        if pre <= s:
            yield i, (s - dele) | add


def bfs_oracle(task, node_cap: int = 200_000) -> OracleResult:
    """Breadth-first search by layers; exact optimal plan length under unit costs."""
    ops = _ops(task)
    goal = frozenset(task.goal)
    init = _facts_of(task.init)
    if goal <= init:
        return OracleResult(0, [], 0)
    parent = {init: None}
    frontier = deque([init])
    expanded = 0
    while frontier:
        s = frontier.popleft()
        expanded += 1
        for i, t in _succ(ops, s):
            if t in parent:
                continue
            parent[t] = (s, i)
            if len(parent) > node_cap:
                raise OracleCapExceeded(f"state space exceeds {node_cap} states")
            if goal <= t:
                plan = []
                while parent[t] is not None:
                    t, i = parent[t]
                    plan.append(i)
                plan.reverse()
                return OracleResult(len(plan), plan, expanded)
            frontier.append(t)
    return OracleResult(UNSOLVABLE, [], expanded)


def gbfs_reference(task, h, node_cap: int = 200_000):
    """Expansion order of textbook GBFS with early goal detection.

    ``h`` maps a frozenset state to a number (``float('inf')`` = dead end).
    Ties on h go to the earlier generated node. Returns ``(trace, plan)``
    with the trace as a list of frozenset states; ``plan`` is None when the
    search exhausts.
    """
    ops = _ops(task)
    goal = frozenset(task.goal)
    init = _facts_of(task.init)
    if goal <= init:
        return [], []
    seen = {init: None}
    heap = []
    counter = 0
    hi = h(init)
    if hi != float("inf"):
        heapq.heappush(heap, (hi, counter, init))
    trace = []
    while heap:
        _, _, s = heapq.heappop(heap)
        trace.append(s)
        for i, t in _succ(ops, s):
            if t in seen:
                continue
            seen[t] = (s, i)
            if len(seen) > node_cap:
                raise OracleCapExceeded(f"more than {node_cap} states generated")
            if goal <= t:
                plan = []
                while seen[t] is not None:
                    t, i = seen[t]
                    plan.append(i)
                plan.reverse()
                return trace, plan
            ht = h(t)
            if ht == float("inf"):
                continue
            counter += 1
            heapq.heappush(heap, (ht, counter, t))
    return trace, None


def novelty_bruteforce(history, s, h_tuple) -> int:
    """Smallest size of a fact set in ``s`` (at most 2) unseen in the partition.

    ``history`` holds ``(state, h_tuple)`` pairs assessed earlier; states are
    any iterables of fact ids. Returns 3 when nothing is new, 1 on an empty
    partition.
    """
    s = frozenset(s)
    past = [frozenset(t) for t, key in history if key == h_tuple]
    if not past:
        return 1
    singles = set()
    pairs = set()
    for t in past:
        singles.update(t)
        pairs.update(combinations(sorted(t), 2))
    if any(f not in singles for f in s):
        return 1
    if any(p not in pairs for p in combinations(sorted(s), 2)):
        return 2
    return 3


def relaxed_reachable(task, state_bits: int) -> bool:
    """Goal reachability ignoring delete effects (plain fixpoint)."""
    ops = _ops(task)
    reached = set(_facts_of(state_bits))
    changed = True
    while changed:
        changed = False
        for pre, add, _ in ops:
            if pre <= reached and not add <= reached:
                reached |= add
                changed = True
    return frozenset(task.goal) <= reached
