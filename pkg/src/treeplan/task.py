"""Propositional STRIPS tasks with unit-cost operators.

States are Python ints used as bitsets: bit ``i`` set means fact ``i`` holds,
which keeps them hashable with bitwise equality. Applicability tests and the
delete-relaxation fixpoint live in the per-task kernel (:mod:`treeplan.kernels`).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .kernels import kernel_for

State = int

NAME_RE = re.compile(r"^[A-Za-z0-9_()-]+$")


class TaskFormatError(ValueError):
    """Raised for malformed task documents or invalid task contents."""


def make_state(facts: Iterable[int]) -> State:
    s = 0
    for f in facts:
        s |= 1 << f
    return s


def state_facts(s: State) -> list[int]:
    """Fact ids set in ``s`` in increasing order."""
    out = []
    while s:
        low = s & -s
        out.append(low.bit_length() - 1)
        s ^= low
    return out


@dataclass(frozen=True)
class Operator:
    name: str
    pre: frozenset[int]
    add: frozenset[int]
    delete: frozenset[int]
    cost: int = 1
    pre_mask: int = field(default=0, compare=False, repr=False)
    add_mask: int = field(default=0, compare=False, repr=False)
    del_mask: int = field(default=0, compare=False, repr=False)

    def __post_init__(self):
        if self.add & self.delete:
            raise TaskFormatError(
                f"operator {self.name!r} adds and deletes {sorted(self.add & self.delete)}"
            )
        object.__setattr__(self, "pre_mask", make_state(self.pre))
        object.__setattr__(self, "add_mask", make_state(self.add))
        object.__setattr__(self, "del_mask", make_state(self.delete))


@dataclass(frozen=True)
class Task:
    """Immutable planning task; safe to share between concurrent searches."""

    facts: tuple[str, ...]
    operators: tuple[Operator, ...]
    init: State
    goal: frozenset[int]
    name: str = "task"
    goal_mask: int = field(default=0, compare=False, repr=False)
    # derived per-task structures (e.g. heuristic evaluators); never compared
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.facts)
        if len(set(self.facts)) != n:
            raise TaskFormatError("duplicate fact names")
        for op in self.operators:
            for f in op.pre | op.add | op.delete:
                if not 0 <= f < n:
                    raise TaskFormatError(f"operator {op.name!r} references fact id {f}")
        for f in self.goal:
            if not 0 <= f < n:
                raise TaskFormatError(f"goal references fact id {f}")
        if self.init >> n:
            raise TaskFormatError("initial state has bits beyond the fact count")
        object.__setattr__(self, "goal_mask", make_state(self.goal))
        object.__setattr__(self, "_effects", [(op.add_mask, ~op.del_mask) for op in self.operators])
        object.__setattr__(self, "kernel", kernel_for(self))
        object.__setattr__(self, "_applicable", self.kernel.applicable)

    __hash__ = object.__hash__

    @property
    def num_facts(self) -> int:
        return len(self.facts)

    def successors(self, s: State) -> list[tuple[int, State]]:
        eff = self._effects
        out = []
        for i in self._applicable(s):
            add, keep = eff[i]
            out.append((i, (s & keep) | add))
        return out

    def is_goal(self, s: State) -> bool:
        return s & self.goal_mask == self.goal_mask

    def apply(self, s: State, op_id: int) -> State:
        op = self.operators[op_id]
        if s & op.pre_mask != op.pre_mask:
            raise ValueError(f"operator {op.name!r} is not applicable")
        return (s & ~op.del_mask) | op.add_mask

    def fact_names(self, s: State) -> list[str]:
        return [self.facts[i] for i in state_facts(s)]


def successors(task: Task, s: State) -> list[tuple[int, State]]:
    """Applicable operators in declaration order with their successor states."""
    return task.successors(s)


def is_goal(task: Task, s: State) -> bool:
    return task.is_goal(s)


def validate_plan(task: Task, plan: Sequence[int]) -> bool:
    s = task.init
    for op_id in plan:
        if not 0 <= op_id < len(task.operators):
            return False
        op = task.operators[op_id]
        if s & op.pre_mask != op.pre_mask:
            return False
        s = (s & ~op.del_mask) | op.add_mask
    return task.is_goal(s)


def build_task(
    facts: Sequence[str],
    operators: Iterable[tuple[str, Iterable[str], Iterable[str], Iterable[str]]],
    init: Iterable[str],
    goal: Iterable[str],
    name: str = "task",
) -> Task:
    """Assemble a task from fact names; ids follow the order of ``facts``."""
    index = {f: i for i, f in enumerate(facts)}

    def ids(names):
        try:
            return frozenset(index[n] for n in names)
        except KeyError as e:
            raise TaskFormatError(f"undeclared fact {e.args[0]!r}") from None

    ops = tuple(Operator(n, ids(p), ids(a), ids(d)) for n, p, a, d in operators)
    return Task(tuple(facts), ops, make_state(ids(init)), ids(goal), name=name)


# --- text format -----------------------------------------------------------
#
#   # comment
#   facts
#     a b
#     c
#   operator move-a-b
#     pre a
#     add b
#     del a
#   init a
#   goal c
#
# Section headers start in column 0; indented lines continue the current
# section. Header lines may carry items inline after the keyword.

_SECTIONS = ("facts", "operator", "init", "goal", "name")
_OP_FIELDS = ("pre", "add", "del")


def parse_task(text: str) -> Task:
    facts: list[str] = []
    fact_line: dict[str, int] = {}
    ops: list[dict] = []
    init: list[tuple[str, int]] = []
    goal: list[tuple[str, int]] = []
    name = "task"
    seen = set()
    section = None
    current_op = None

    def err(lineno, line, msg):
        raise TaskFormatError(f"line {lineno}: {msg}: {line.strip()!r}")

    def names(tokens, lineno, line):
        for t in tokens:
            if not NAME_RE.match(t):
                err(lineno, line, f"invalid name {t!r}")
        return tokens

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        tokens = line.split()
        if not raw[0].isspace():
            head, rest = tokens[0], tokens[1:]
            if head not in _SECTIONS:
                err(lineno, raw, f"unknown section {head!r}")
            if head in ("facts", "init", "goal", "name") and head in seen:
                err(lineno, raw, f"duplicate section {head!r}")
            seen.add(head)
            section = head
            current_op = None
            if head == "operator":
                if len(rest) != 1:
                    err(lineno, raw, "operator header needs exactly one name")
                names(rest, lineno, raw)
                current_op = {"name": rest[0], "pre": [], "add": [], "del": [], "line": lineno}
                ops.append(current_op)
                continue
            if head == "name":
                if len(rest) != 1:
                    err(lineno, raw, "name header needs exactly one token")
                name = rest[0]
                continue
            tokens = rest
        elif section is None:
            err(lineno, raw, "indented line outside any section")
        if not tokens:
            continue
        if section == "facts":
            for t in names(tokens, lineno, raw):
                if t in fact_line:
                    err(lineno, raw, f"fact {t!r} already declared on line {fact_line[t]}")
                fact_line[t] = lineno
                facts.append(t)
        elif section == "operator":
            key, items = tokens[0], tokens[1:]
            if key not in _OP_FIELDS:
                err(lineno, raw, f"unknown operator field {key!r}")
            current_op[key].extend((t, lineno, raw) for t in names(items, lineno, raw))
        elif section == "init":
            init.extend((t, lineno, raw) for t in names(tokens, lineno, raw))
        elif section == "goal":
            goal.extend((t, lineno, raw) for t in names(tokens, lineno, raw))
        else:
            err(lineno, raw, f"unexpected content in section {section!r}")

    for required in ("facts", "init", "goal"):
        if required not in seen:
            raise TaskFormatError(f"missing section {required!r}")

    index = {f: i for i, f in enumerate(facts)}

    def resolve(entries):
        out = set()
        for t, lineno, raw in entries:
            if t not in index:
                err(lineno, raw, f"undeclared fact {t!r}")
            out.add(index[t])
        return frozenset(out)

    operators = []
    op_names = set()
    for op in ops:
        if op["name"] in op_names:
            raise TaskFormatError(f"line {op['line']}: duplicate operator {op['name']!r}")
        op_names.add(op["name"])
        pre, add, dele = resolve(op["pre"]), resolve(op["add"]), resolve(op["del"])
        if add & dele:
            raise TaskFormatError(
                f"line {op['line']}: operator {op['name']!r} adds and deletes "
                + ", ".join(facts[i] for i in sorted(add & dele))
            )
        operators.append(Operator(op["name"], pre, add, dele))
    return Task(tuple(facts), tuple(operators), make_state(resolve(init)), resolve(goal), name=name)


def dump_task(task: Task) -> str:
    """Serialize ``task`` in the format read by :func:`parse_task`."""
    f = task.facts
    lines = [f"name {task.name}", "facts"]
    for i in range(0, len(f), 8):
        lines.append("  " + " ".join(f[i:i + 8]))
    for op in task.operators:
        lines.append(f"operator {op.name}")
        for key, ids in (("pre", op.pre), ("add", op.add), ("del", op.delete)):
            lines.append(f"  {key} " + " ".join(f[i] for i in sorted(ids)) if ids else f"  {key}")
    lines.append("init " + " ".join(task.fact_names(task.init)))
    lines.append("goal " + " ".join(f[i] for i in sorted(task.goal)))
    return "\n".join(line.rstrip() for line in lines) + "\n"


def load_task(path) -> Task:
    with open(path) as fh:
        return parse_task(fh.read())
