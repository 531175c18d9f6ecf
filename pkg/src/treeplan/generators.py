"""Built-in instance generators.

All generators are pure and deterministic for a given seed.
"""
from __future__ import annotations

import random

from .task import Task, build_task


def gen_hanoi(k: int) -> Task:
    """3-peg Tower of Hanoi with ``k`` disks; optimal plans have 2**k - 1 steps.

    Disk 1 is the smallest. ``on-dD-X`` says disk D sits directly on X, where
    X is a peg or a larger disk; ``clear-X`` says nothing sits on X and
    ``peg-dD-pX`` records which peg holds disk D. The size ordering is compiled
    into the operator set (disks only rest on pegs or larger disks). The goal
    asks for every disk on the third peg, so each misplaced disk is one unmet
    goal fact.
    """
    if not 1 <= k <= 12:
        raise ValueError(f"disk count must be in [1, 12], got {k}")
    pegs = ["p1", "p2", "p3"]
    disks = [f"d{i}" for i in range(1, k + 1)]

    def places(i):  # where disk i may rest
        return pegs + disks[i + 1:]

    facts = []
    for i, d in enumerate(disks):
        facts.extend(f"on-{d}-{x}" for x in places(i))
    facts.extend(f"clear-{x}" for x in pegs + disks)
    for d in disks:
        facts.extend(f"peg-{d}-{p}" for p in pegs)

    ops = []
    for i, d in enumerate(disks):
        for src in places(i):
            for dst in places(i):
                if src == dst:
                    continue
                for pa in ([src] if src in pegs else pegs):
                    for pb in ([dst] if dst in pegs else pegs):
                        if pa == pb:
                            continue
                        pre = [f"on-{d}-{src}", f"clear-{d}", f"clear-{dst}", f"peg-{d}-{pa}"]
                        if dst not in pegs:
                            pre.append(f"peg-{dst}-{pb}")
                        ops.append((
                            f"move-{d}-{src}-{dst}-{pa}-{pb}",
                            pre,
                            [f"on-{d}-{dst}", f"clear-{src}", f"peg-{d}-{pb}"],
                            [f"on-{d}-{src}", f"clear-{dst}", f"peg-{d}-{pa}"],
                        ))

    # tower stacked on p1, to be rebuilt on p3
    init = [f"on-{disks[-1]}-p1"] + [f"on-{disks[i]}-{disks[i + 1]}" for i in range(k - 1)]
    init += ["clear-d1", "clear-p2", "clear-p3"] + [f"peg-{d}-p1" for d in disks]
    goal = [f"peg-{d}-p3" for d in disks]
    return build_task(facts, ops, init, goal, name=f"hanoi-{k}")


def gen_grid(width: int, height: int, obstacle_seed: int | None = None,
             density: float = 0.2) -> Task:
    """Single agent walking from the top-left to the bottom-right cell.

    With ``obstacle_seed`` set, roughly ``density`` of the interior cells are
    blocked (never the start or the goal); the task may become unsolvable.
    """
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")
    if width * height < 2:
        raise ValueError("grid needs at least two cells")
    if not 0.0 <= density < 1.0:
        raise ValueError("density must be in [0, 1)")
    start, target = (0, 0), (width - 1, height - 1)
    blocked = set()
    if obstacle_seed is not None:
        rng = random.Random(obstacle_seed)
        for x in range(width):
            for y in range(height):
                if (x, y) not in (start, target) and rng.random() < density:
                    blocked.add((x, y))
    cells = [(x, y) for y in range(height) for x in range(width) if (x, y) not in blocked]
    facts = [f"at-{x}-{y}" for x, y in cells]
    free = set(cells)
    ops = []
    for x, y in cells:
        for dx, dy, tag in ((1, 0, "e"), (-1, 0, "w"), (0, 1, "s"), (0, -1, "n")):
            nx, ny = x + dx, y + dy
            if (nx, ny) in free:
                ops.append((f"move{tag}-{x}-{y}", [f"at-{x}-{y}"], [f"at-{nx}-{ny}"], [f"at-{x}-{y}"]))
    suffix = "" if obstacle_seed is None else f"-s{obstacle_seed}"
    return build_task(facts, ops, ["at-0-0"], [f"at-{target[0]}-{target[1]}"],
                      name=f"grid-{width}x{height}{suffix}")


def gen_random_strips(seed: int, num_facts: int, num_ops: int, pre_size: int = 2,
                      add_size: int = 2, del_size: int = 1, goal_size: int = 2,
                      init_size: int | None = None) -> Task:
    """Random syntactically valid task. Solvability is not guaranteed."""
    if num_facts < 1 or num_ops < 0:
        raise ValueError("need at least one fact and a non-negative operator count")
    if min(pre_size, add_size, del_size, goal_size) < 0:
        raise ValueError("sizes must be non-negative")
    if pre_size > num_facts or goal_size > num_facts:
        raise ValueError("precondition and goal sizes cannot exceed the fact count")
    if add_size + del_size > num_facts:
        raise ValueError("add and delete sets cannot be disjoint with this fact count")
    if init_size is None:
        init_size = max(1, num_facts // 3)
    if not 0 <= init_size <= num_facts:
        raise ValueError("init size out of range")
    rng = random.Random(seed)
    facts = [f"f{i}" for i in range(num_facts)]
    ops = []
    for j in range(num_ops):
        pre = rng.sample(facts, pre_size)
        while True:
            add = rng.sample(facts, add_size)
            dele = rng.sample(facts, del_size)
            if not set(add) & set(dele):
                break
        ops.append((f"o{j}", pre, add, dele))
    init = rng.sample(facts, init_size)
    goal = rng.sample(facts, goal_size)
    return build_task(facts, ops, init, goal, name=f"random-s{seed}-p{num_facts}-o{num_ops}")


def gen_random_tree(seed: int, num_nodes: int, max_children: int = 3,
                    goal: bool = True) -> tuple[Task, dict[int, int]]:
    """Task whose reachable state space is a random tree, plus distinct h-values.

    Returns the task and a map from state to a heuristic value; values form a
    random permutation of ``range(num_nodes)`` so no two states tie.
    """
    if num_nodes < 2:
        raise ValueError("need at least two tree nodes")
    rng = random.Random(seed)
    parent = [-1]
    kids = [[]]
    for v in range(1, num_nodes):
        while True:
            p = rng.randrange(v)
            if len(kids[p]) < max_children:
                break
        parent.append(p)
        kids.append([])
        kids[p].append(v)
    facts = [f"at-n{v}" for v in range(num_nodes)]
    ops = [(f"go-n{parent[v]}-n{v}", [f"at-n{parent[v]}"], [f"at-n{v}"], [f"at-n{parent[v]}"])
           for v in range(1, num_nodes)]
    if goal:
        goal_facts = [f"at-n{rng.randrange(1, num_nodes)}"]
    else:
        # an extra fact nothing achieves keeps the search exhaustive
        facts.append("never")
        goal_facts = ["never"]
    task = build_task(facts, ops, ["at-n0"], goal_facts, name=f"tree-s{seed}-n{num_nodes}")
    values = list(range(num_nodes))
    rng.shuffle(values)
    return task, {1 << v: values[v] for v in range(num_nodes)}
