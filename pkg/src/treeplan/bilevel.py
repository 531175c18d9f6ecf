"""Budgets for the best-first burst and tree collapsing."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Budget:
    """Number of burst expansions granted after one selection.

    In ``depth`` mode the budget is the number of selection steps of the
    descent, at least one so a root-level leaf still gets expanded.
    """

    mode: str = "depth"
    n: int = 0

    def __post_init__(self):
        if self.mode not in ("depth", "fixed"):
            raise ValueError(f"unknown budget mode {self.mode!r}")
        if self.mode == "fixed" and self.n < 1:
            raise ValueError("fixed budget must be positive")

    def initial(self, descent_edges: int) -> int:
        if self.mode == "depth":
            return max(1, descent_edges)
        return self.n

    @classmethod
    def parse(cls, text: str) -> "Budget":
        if text == "depth":
            return cls("depth")
        kind, _, n = text.partition(":")
        if kind != "fixed" or not n.isdigit():
            raise ValueError(f"budget must be 'depth' or 'fixed:N', got {text!r}")
        return cls("fixed", int(n))

    def __str__(self):
        return "depth" if self.mode == "depth" else f"fixed:{self.n}"


@dataclass(frozen=True)
class CollapsePolicy:
    kind: str = "off"
    theta: int = 0

    def __post_init__(self):
        if self.kind not in ("off", "fixed", "dynamic"):
            raise ValueError(f"unknown collapse kind {self.kind!r}")
        if self.theta < 0:
            raise ValueError("theta must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "CollapsePolicy":
        if text == "off":
            return cls("off")
        if text == "dtc":
            return cls("dynamic")
        kind, _, n = text.partition(":")
        if kind != "theta" or not n.isdigit():
            raise ValueError(f"collapse must be 'off', 'theta:N' or 'dtc', got {text!r}")
        return cls("fixed", int(n))

    def __str__(self):
        return {"off": "off", "dynamic": "dtc"}.get(self.kind, f"theta:{self.theta}")


def effective_theta(policy: CollapsePolicy, node) -> int:
    if policy.kind == "off":
        return 0
    if policy.kind == "fixed":
        return policy.theta
    return node.depth


def collapse(p, theta: int):
    """Hand a freshly expanded node's children to its parent when both are narrow.

    Returns the node that should enter the backpropagation set: the
    grandparent if ``p`` was spliced out, ``p`` otherwise. Only the tree
    structure changes; search records (and so plan extraction) are untouched.
    """
    parent = p.parent
    if parent is None or not p.children:
        return p
    siblings = parent.children
    if len(siblings) + len(p.children) - 1 >= theta:
        return p
    i = siblings.index(p)
    depth = parent.depth + 1
    for c in p.children:
        c.parent = parent
        c.depth = depth
    siblings[i:i + 1] = p.children
    p.children = []
    p.parent = None
    p.removed = True
    return parent


def bilevel_iteration(search):
    """One selection followed by its whole burst; see ``Search.iteration``."""
    return search.iteration()
