"""Selection-cost probe on synthetic balanced trees.

The probe prebuilds a complete ``B``-ary search tree of depth ``D`` (every
internal node expanded, ``B**D`` unexpanded leaves), resets all counters and
then lets the engine run a short, fixed number of expansions. The reported cost per
expansion is

    (descent edges + child index evaluations + bucket scan steps + heap compares)
    / expansions
"""
from __future__ import annotations

import csv
import gc
import io
import time
from dataclasses import dataclass, field

from .heuristics import TableHeuristic
from .search import Search, SearchConfig, SearchNode
from .tree import TreeNode

PROBE_CONFIGS = {
    "plain": dict(search="guctn2"),
    "bilevel-bucket": dict(search="bilevel", queue="bucket"),
    "bilevel-heap": dict(search="bilevel", queue="heap"),
}


class BalancedTree:
    """Implicit infinite ``B``-ary tree; states are heap-order node numbers.

    No state is a goal. ``h`` is a deterministic hash of the state into
    ``[0, h_range)`` so that sibling statistics differ.
    """

    def __init__(self, branching: int = 3, h_range: int = 8, seed: int = 0):
        if branching < 2:
            raise ValueError("branching must be at least 2")
        self.branching = branching
        self.h_range = h_range
        self.seed = seed
        self.init = 0
        self.facts = ()

    def successors(self, s):
        b = self.branching
        first = s * b + 1
        return [(i, first + i) for i in range(b)]

    def is_goal(self, s):
        return False

    def h(self, s):
        x = (s * 0x9E3779B97F4A7C15 + self.seed * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 31
        x = (x * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 29
        return x % self.h_range


def prebuild(search: Search, depth: int):
    """Materialize the complete tree of ``depth`` levels inside ``search``'s tree."""
    problem = search.task
    tree = search.open
    search.start()
    h = problem.h
    closed = search.closed
    nodes = tree.nodes
    levels = [[tree.root]]
    for _ in range(depth):
        nxt = []
        for tn in levels[-1]:
            rec = tn.rec
            rec.expanded = True
            tn.expanded = True
            g = rec.g + 1
            kids = tn.children
            for op, s in problem.successors(rec.state):
                child = SearchNode(s, g, rec, op)
                child.hs = (h(s),)
                child.evaluated = True
                closed[s] = child
                ctn = TreeNode(child, tn, g)
                nodes[s] = ctn
                kids.append(ctn)
            nxt.extend(kids)
        levels.append(nxt)
    tree.size = tree.peak_size = len(closed)
    for level in reversed(levels):
        for tn in level:
            tree.refresh(tn)
    for attr in ("selections", "descent_edges", "nec_evals", "backprops", "queue_pushes",
                 "queue_pops", "scan_steps", "heap_compares", "burst_expansions"):
        setattr(tree, attr, 0)
    search.metrics.evaluations = 0
    search._depth_sum = 0
    return tree


@dataclass
class ProbeRecord:
    config: str
    branching: int
    depth: int
    expansions: int
    descent_edges: int
    nec_evals: int
    scan_steps: int
    heap_compares: int
    cost: float
    build_seconds: float = field(default=0.0, compare=False)
    run_seconds: float = field(default=0.0, compare=False)


def _probe_once(settings, branching, depth, expansions, seed):
    problem = BalancedTree(branching, seed=seed)
    search = Search(problem, SearchConfig(**settings),
                    heuristics=[TableHeuristic(problem, problem.h)])
    t0 = time.perf_counter()
    was_enabled = gc.isenabled()
    gc.disable()  # a million fresh objects would trigger many useless collections
    try:
        tree = prebuild(search, depth)
    finally:
        if was_enabled:
            gc.enable()
    t1 = time.perf_counter()
    done = 0
    while done < expansions:
        rec = tree.pop()
        if rec is None:
            break
        search.expand(rec)
        done += 1
    if tree._q is not None:
        tree._end_burst()
    t2 = time.perf_counter()
    return tree, done, t1 - t0, t2 - t1


def selection_cost_probe(config: str | dict, branching: int = 3, depth: int = 6,
                         expansions: int = 150, seeds=3) -> ProbeRecord:
    """Per-expansion selection cost, pooled over ``seeds`` independent trees.

    Runs are kept short because every expansion deepens the tree below the
    prebuilt depth; pooling a few hash seeds smooths out where that happens.
    """
    name = config if isinstance(config, str) else "custom"
    settings = PROBE_CONFIGS[config] if isinstance(config, str) else dict(config)
    seeds = range(seeds) if isinstance(seeds, int) else seeds
    done = edges = necs = scans = compares = 0
    build = run = 0.0
    for seed in seeds:
        tree, n, tb, tr = _probe_once(settings, branching, depth, expansions, seed)
        done += n
        edges += tree.descent_edges
        necs += tree.nec_evals
        scans += tree.scan_steps
        compares += tree.heap_compares
        build += tb
        run += tr
        del tree
    cost = (edges + necs + scans + compares) / max(done, 1)
    return ProbeRecord(name, branching, depth, done, edges, necs, scans, compares, cost, build, run)


PROBE_COLUMNS = ("config", "branching", "depth", "expansions", "descent_edges", "nec_evals",
                 "scan_steps", "heap_compares", "cost")


def probe_theorems(branching: int = 3, depths=(6, 8, 10, 12), configs=tuple(PROBE_CONFIGS),
                   expansions: int = 150, seeds=3) -> list[ProbeRecord]:
    """One pooled record per (config, depth), configs outermost."""
    return [selection_cost_probe(c, branching, d, expansions, seeds) for c in configs for d in depths]


def probe_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PROBE_COLUMNS)
    for r in records:
        w.writerow([repr(v) if isinstance(v, float) else v
                    for v in (getattr(r, c) for c in PROBE_COLUMNS)])
    return buf.getvalue()
