"""Node evaluators: goal count and the delete-relaxation family.

Each evaluator is bound to one task and owns its kernel scratch buffers, so a
search should hold its own instances. ``DEAD_END`` is an infinite sentinel that
compares greater than every finite value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

from .kernels import kernel_for
from .task import State, Task

DEAD_END = math.inf


@dataclass(frozen=True)
class Evaluation:
    h: float
    preferred: frozenset[int] = frozenset()

    @property
    def dead_end(self) -> bool:
        return self.h == DEAD_END


class Heuristic:
    name = "base"

    def __init__(self, task: Task):
        self.task = task

    def __call__(self, s: State) -> float:
        raise NotImplementedError

    def evaluate(self, s: State) -> Evaluation:
        return Evaluation(self(s))


class GoalCount(Heuristic):
    """Number of unmet goal facts.

    ``evaluate`` also marks as preferred the applicable operators that add an
    unmet goal fact, so goal count can feed a preferred-operator queue.
    """

    name = "goalcount"

    def __init__(self, task: Task):
        super().__init__(task)
        self._goal = task.goal_mask
        self._adds = [op.add_mask for op in task.operators]

    def __call__(self, s: State) -> int:
        return (self._goal & ~s).bit_count()

    def evaluate(self, s: State) -> Evaluation:
        missing = self._goal & ~s
        if not missing:
            return Evaluation(0)
        adds = self._adds
        preferred = frozenset(o for o, _ in self.task.successors(s) if adds[o] & missing)
        return Evaluation(missing.bit_count(), preferred)


class _Relaxed(Heuristic):
    def __init__(self, task: Task, backend: str | None = None):
        super().__init__(task)
        self.kernel = kernel_for(task, backend)


class HMax(_Relaxed):
    name = "hmax"

    def __call__(self, s: State) -> float:
        h = self.kernel.hmax(s)
        return DEAD_END if h < 0 else h


class HAdd(_Relaxed):
    name = "hadd"

    def __call__(self, s: State) -> float:
        h = self.kernel.hadd(s)
        return DEAD_END if h < 0 else h


class HFF(_Relaxed):
    """Relaxed-plan size from best-supporter backchaining over h_add costs.

    Preferred operators are the relaxed-plan operators applicable in ``s``.
    """

    name = "hff"

    def __call__(self, s: State) -> float:
        h, _ = self.kernel.hff(s)
        return DEAD_END if h < 0 else h

    def evaluate(self, s: State) -> Evaluation:
        h, preferred = self.kernel.hff(s)
        if h < 0:
            return Evaluation(DEAD_END)
        return Evaluation(h, frozenset(preferred))


class TableHeuristic(Heuristic):
    """Heuristic read from a state -> value mapping (test and synthetic tasks)."""

    name = "table"

    def __init__(self, task, table: Mapping[State, float] | Callable[[State], float], default=DEAD_END):
        super().__init__(task)
        self._lookup = table if callable(table) else (lambda s, t=table: t.get(s, default))

    def __call__(self, s: State) -> float:
        return self._lookup(s)


HEURISTICS = {"goalcount": GoalCount, "hmax": HMax, "hadd": HAdd, "hff": HFF}


def make_heuristic(name: str, task: Task, backend: str | None = None) -> Heuristic:
    try:
        cls = HEURISTICS[name]
    except KeyError:
        raise ValueError(f"unknown heuristic {name!r}; choose from {sorted(HEURISTICS)}") from None
    if cls is GoalCount:
        return cls(task)
    return cls(task, backend)


def _cached(task: Task, name: str) -> Heuristic:
    cache = task._cache
    key = ("heuristic", name)
    if key not in cache:
        cache[key] = make_heuristic(name, task)
    return cache[key]


def h_goalcount(task: Task, s: State) -> int:
    return _cached(task, "goalcount")(s)


def h_max(task: Task, s: State) -> float:
    return _cached(task, "hmax")(s)


def h_add(task: Task, s: State) -> float:
    return _cached(task, "hadd")(s)


def h_ff(task: Task, s: State) -> Evaluation:
    return _cached(task, "hff").evaluate(s)


def evaluate(task: Task, s: State, mode: str = "eager", parent_h: float | None = None,
             heuristic: str | Heuristic = "hff") -> float:
    """Eager: the heuristic value of ``s``. Lazy: the parent's value, unchanged.

    Lazily evaluated nodes get their own value once expanded; the search engine
    performs that re-evaluation.
    """
    if mode == "lazy":
        if parent_h is None:
            raise ValueError("lazy evaluation needs the parent's heuristic value")
        return parent_h
    if mode != "eager":
        raise ValueError(f"unknown evaluation mode {mode!r}")
    h = heuristic if isinstance(heuristic, Heuristic) else _cached(task, heuristic)
    return h(s)
