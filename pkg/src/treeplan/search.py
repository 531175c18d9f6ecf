"""Search engine: one pop-expand loop over interchangeable open lists.

A :class:`SearchNode` exists once per state and doubles as the closed-table
entry and the predecessor link used for plan extraction. Open lists (queues,
trees, alternations of both) only decide which node is expanded next; the
engine owns goal detection, duplicate handling, evaluation and limits.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

from .bilevel import Budget, CollapsePolicy
from .heuristics import DEAD_END, HEURISTICS, Heuristic, make_heuristic
from .novelty import NOT_NOVEL, NoveltyStore
from .queues import make_queue
from .tree import TreeOpenList

SEARCHES = ("gbfs", "guct", "guctn2", "bilevel", "fixed")
BANDITS = ("ucb1", "normal2", "greedy")


class SearchNode:
    __slots__ = ("state", "g", "parent", "op", "hs", "preferred", "novelty", "expanded",
                 "evaluated", "dead")

    def __init__(self, state, g, parent=None, op=None):
        self.state = state
        self.g = g
        self.parent = parent
        self.op = op
        self.hs = ()
        self.preferred = None  # op id -> bitmask of heuristics preferring it
        self.novelty = ()
        self.expanded = False
        self.evaluated = False
        self.dead = False

    @property
    def h(self):
        return self.hs[0]

    def path(self):
        ops = []
        n = self
        while n.parent is not None:
            ops.append(n.op)
            n = n.parent
        ops.reverse()
        return ops

    def __repr__(self):
        return f"SearchNode(state={self.state}, g={self.g}, hs={self.hs})"


class ClosedTable(dict):
    """state -> SearchNode holding the best g found and the predecessor."""

    def best_g(self, state):
        n = self.get(state)
        return None if n is None else n.g


class QueueOpenList:
    """Best-first queue keyed by one heuristic, optionally novelty first.

    With novelty on, entries live in one queue per novelty value so the order
    is lexicographic in ``(w, h)``.
    """

    kind = "queue"

    def __init__(self, queue="bucket", hidx=0, nidx=None, preferred_only=False, name=None):
        self.queue_kind = queue
        self.hidx = hidx
        self.nidx = nidx
        self.preferred_only = preferred_only
        self.name = name or ("pr" if preferred_only else "queue")
        tiers = 1 if nidx is None else NOT_NOVEL
        self.tiers = [make_queue(queue) for _ in range(tiers)]

    def __len__(self):
        return sum(len(q) for q in self.tiers)

    def _push(self, rec):
        h = rec.hs[self.hidx]
        if h == DEAD_END:
            return
        tier = 0 if self.nidx is None else rec.novelty[self.nidx] - 1
        self.tiers[tier].push(int(h), rec)

    def insert_root(self, rec):
        if not self.preferred_only:
            self._push(rec)

    def on_expanded(self, prec, children, flags):
        bit = 1 << self.hidx
        for rec, f in zip(children, flags):
            if rec.dead or rec.expanded:
                continue
            if self.preferred_only and not f & bit:
                continue
            self._push(rec)

    def pop(self):
        for q in self.tiers:
            while len(q):
                rec = q.popmin()[1]
                if not rec.expanded:
                    return rec
        return None

    @property
    def scan_steps(self):
        return sum(q.scan_steps for q in self.tiers)

    @property
    def heap_compares(self):
        return sum(getattr(q, "compares", 0) for q in self.tiers)

    @property
    def queue_pushes(self):
        return sum(q.pushes for q in self.tiers)


@dataclass
class SearchConfig:
    search: str = "guctn2"
    heuristic: str = "hff"
    bandit: str | None = None
    ucb1_c: float = 1.0
    queue: str = "bucket"
    budget: str = "depth"
    collapse: str = "off"
    eval: str = "eager"
    reopen: bool = False
    graft: bool = False
    novelty: str = "off"
    novelty_partition: str = "hff"
    novelty_max_bits: int | None = None
    alternate: tuple | None = None
    config: str | None = None
    boost: int = 10
    include_own_sample: bool = True
    max_nodes: int | None = None
    max_expansions: int | None = None
    time_limit: float | None = None
    seed: int = 0
    backend: str | None = None
    trace: bool = False

    def __post_init__(self):
        if self.config == "nebula-lite" and self.alternate is None:
            from .portfolio import NEBULA_LITE
            self.search = "bilevel"
            self.alternate = NEBULA_LITE
            self.novelty = "w2"
            if self.novelty_partition == "hff":
                self.novelty_partition = "hff,goalcount"
            if self.collapse == "off":
                self.collapse = "dtc"
        elif self.config not in (None, "nebula-lite"):
            raise ValueError(f"unknown config {self.config!r}")
        if self.search not in SEARCHES:
            raise ValueError(f"unknown search {self.search!r}; choose from {SEARCHES}")
        if self.bandit is not None and self.bandit not in BANDITS:
            raise ValueError(f"unknown bandit {self.bandit!r}; choose from {BANDITS}")
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.eval not in ("eager", "lazy"):
            raise ValueError(f"unknown evaluation mode {self.eval!r}")
        if self.novelty not in ("off", "w2"):
            raise ValueError(f"unknown novelty mode {self.novelty!r}")
        if self.queue not in ("bucket", "heap"):
            raise ValueError(f"unknown queue {self.queue!r}")
        Budget.parse(self.budget)
        CollapsePolicy.parse(self.collapse)
        for name in self.novelty_partition.split(","):
            if name not in HEURISTICS:
                raise ValueError(f"unknown partition heuristic {name!r}")
        if isinstance(self.alternate, str):
            self.alternate = tuple(s for s in self.alternate.split(",") if s)
        if self.alternate is not None:
            self.alternate = tuple(self.alternate)
            for spec in self.alternate:
                kind, _ = parse_list_spec(spec)
                if kind in ("n2", "w") and self.novelty == "off":
                    raise ValueError(f"open list {spec!r} needs --novelty w2")
        if self.boost < 0:
            raise ValueError("boost must be non-negative")
        for lim in ("max_nodes", "max_expansions"):
            v = getattr(self, lim)
            if v is not None and v < 1:
                raise ValueError(f"{lim} must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")

    def label(self) -> str:
        """Compact identifier of the settings that change search behaviour."""
        if self.config:
            parts = [self.config]
        elif self.alternate:
            parts = ["alt[" + "+".join(self.alternate) + "]"]
        else:
            parts = [self.search, self.heuristic]
            if self.search != "gbfs":
                parts.append(self.tree_policy())
            if self.search == "gbfs" or self.search in ("bilevel", "fixed"):
                parts.append(self.queue)
        if self.search in ("bilevel", "fixed") and not self.alternate:
            parts.append(str(self.effective_budget()))
        if self.collapse != "off" and not self.config:
            parts.append(f"collapse={self.collapse}")
        if self.eval != "eager":
            parts.append(self.eval)
        if self.novelty != "off" and not self.config:
            parts.append(f"w2[{self.novelty_partition}]")
        if self.reopen:
            parts.append("reopen")
        if self.graft:
            parts.append("graft")
        return "/".join(parts)

    def tree_policy(self) -> str:
        if self.bandit is not None:
            base = self.bandit
        elif self.search == "guct":
            base = "ucb1"
        else:
            base = "normal2"
        if self.novelty == "w2" and base == "normal2":
            return "n2"
        return base

    def effective_budget(self) -> Budget:
        b = Budget.parse(self.budget)
        if self.search == "fixed" and b.mode != "fixed":
            return Budget("fixed", 100)
        return b

    def tree_mode(self) -> str:
        return {"bilevel": "bilevel", "fixed": "fixed"}.get(self.search, "plain")

    def as_dict(self):
        return asdict(self)


def parse_list_spec(spec: str) -> tuple[str, str]:
    """``kind:heuristic`` with kind in h (queue), w (novelty queue), pr, tree, n2."""
    kind, _, h = spec.partition(":")
    if kind not in ("h", "w", "pr", "tree", "n2") or h not in HEURISTICS:
        raise ValueError(f"bad open-list spec {spec!r}; expected KIND:HEURISTIC with KIND in "
                         f"h,w,pr,tree,n2 and HEURISTIC in {sorted(HEURISTICS)}")
    return kind, h


@dataclass
class Metrics:
    expansions: int = 0
    evaluations: int = 0
    generated: int = 0
    wall_time: float = 0.0
    evals_per_sec: float = 0.0
    mean_eval_depth: float = 0.0
    descent_edges: int = 0
    nec_evals: int = 0
    selections: int = 0
    scan_steps: int = 0
    heap_compares: int = 0
    queue_pushes: int = 0
    backprops: int = 0
    peak_tree_size: int = 0
    collapses: int = 0
    reopened: int = 0
    grafts: int = 0
    boosted_pops: int = 0
    novelty_refused: int = 0
    novelty_partitions: int = 0
    closed_size: int = 0
    trace: list = field(default_factory=list, repr=False)


@dataclass
class SearchResult:
    status: str  # solved | exhausted | resource-limit
    plan: list | None
    metrics: Metrics
    reason: str = ""

    @property
    def solved(self) -> bool:
        return self.status == "solved"


class ResourceLimit(Exception):
    pass


class Search:
    """A configured search over ``task``.

    ``task`` needs ``init``, ``successors(s)`` and ``is_goal(s)``; operators
    are only consulted for novelty. ``heuristics`` may be given to override
    the configured evaluators (e.g. table heuristics on synthetic tasks).
    """

    def __init__(self, task, config: SearchConfig | None = None, heuristics=None):
        self.task = task
        self.config = cfg = config or SearchConfig()
        self.metrics = Metrics()
        self.closed = ClosedTable()
        self._build(heuristics)
        self.root = None
        self.goal_node = None
        self._depth_sum = 0
        self._start = None
        self._deadline = None
        self._graft = cfg.graft and isinstance(self.open, TreeOpenList)

    # -- construction -------------------------------------------------------

    def _build(self, heuristics):
        cfg = self.config
        specs = cfg.alternate or ()
        names = []

        def hid(name):
            if name not in names:
                names.append(name)
            return names.index(name)

        if not specs:
            hid(cfg.heuristic)
        for spec in specs:
            hid(parse_list_spec(spec)[1])
        partition = None
        if cfg.novelty == "w2":
            partition = tuple(hid(n) for n in cfg.novelty_partition.split(","))
        if heuristics is not None:
            if isinstance(heuristics, Heuristic) or callable(heuristics):
                heuristics = [heuristics]
            self.heuristics = list(heuristics)
            self.names = [getattr(h, "name", f"h{i}") for i, h in enumerate(self.heuristics)]
        else:
            self.heuristics = [make_heuristic(n, self.task, cfg.backend) for n in names]
            self.names = names
        self.partition = partition
        self.novelty = None
        if partition is not None:
            self.novelty = NoveltyStore(len(self.task.facts), cfg.novelty_max_bits)
        self._pref_needed = set()
        collapse = CollapsePolicy.parse(cfg.collapse)
        budget = cfg.effective_budget()
        mode = cfg.tree_mode()

        def tree(policy, hidx):
            return TreeOpenList(policy=policy, mode=mode, budget=budget, collapse_policy=collapse,
                                queue=cfg.queue, hidx=hidx, nidx=0, c=cfg.ucb1_c,
                                include_own=cfg.include_own_sample, graft=cfg.graft)

        if not specs:
            if cfg.search == "gbfs":
                self.open = QueueOpenList(cfg.queue, 0, 0 if partition else None, name="gbfs")
            else:
                self.open = tree(cfg.tree_policy(), 0)
            self._alt = None
            return
        from .portfolio import AlternationSet

        lists = []
        for spec in specs:
            kind, name = parse_list_spec(spec)
            i = names.index(name)
            if kind in ("n2", "w") and partition is None:
                raise ValueError(f"{spec!r} needs novelty enabled")
            if kind == "h":
                lists.append(QueueOpenList(cfg.queue, i, name=spec))
            elif kind == "w":
                lists.append(QueueOpenList(cfg.queue, i, 0, name=spec))
            elif kind == "pr":
                self._pref_needed.add(i)
                lists.append(QueueOpenList(cfg.queue, i, preferred_only=True, name=spec))
            else:
                policy = "n2" if kind == "n2" else cfg.tree_policy().replace("n2", "normal2")
                t = tree(policy, i)
                t.name = spec
                t.graft = False
                lists.append(t)
        self.open = self._alt = AlternationSet(lists, boost=cfg.boost)

    # -- evaluation ---------------------------------------------------------

    def _evaluate(self, rec):
        hs = []
        pref = {}
        for i, h in enumerate(self.heuristics):
            if i in self._pref_needed:
                ev = h.evaluate(rec.state)
                hs.append(ev.h)
                for o in ev.preferred:
                    pref[o] = pref.get(o, 0) | (1 << i)
            else:
                hs.append(h(rec.state))
        rec.hs = tuple(hs)
        rec.preferred = pref
        rec.evaluated = True
        rec.dead = DEAD_END in rec.hs
        m = self.metrics
        m.evaluations += 1
        self._depth_sum += rec.g
        if self._alt is not None and not rec.dead:
            self._alt.observe(rec.hs)

    def _assess(self, rec, parent, op):
        if self.novelty is None:
            return
        key = tuple(rec.hs[i] for i in self.partition)
        fired = None
        if parent is not None and parent.hs and tuple(parent.hs[i] for i in self.partition) == key:
            fired = self.task.operators[op].add
        rec.novelty = (self.novelty.assess_and_record(rec.state, fired, key),)

    # -- main loop ----------------------------------------------------------

    def start(self):
        self._start = time.monotonic()
        if self.config.time_limit is not None:
            self._deadline = self._start + self.config.time_limit
        task = self.task
        root = self.root = SearchNode(task.init, 0)
        self.closed[task.init] = root
        if task.is_goal(task.init):
            self.goal_node = root
            return
        self._evaluate(root)
        self._assess(root, None, None)
        self.open.insert_root(root)

    def step(self):
        """Pop and expand one node. Returns False once the open list is exhausted."""
        rec = self.open.pop()
        if rec is None:
            return False
        self.expand(rec)
        return True

    def expand(self, rec):
        """Expand ``rec``; sets ``goal_node`` when a goal successor is generated."""
        cfg = self.config
        if not rec.evaluated:
            self._evaluate(rec)
            if rec.dead:
                rec.expanded = True
                self.open.on_expanded(rec, [], [])
                return None
        rec.expanded = True
        m = self.metrics
        m.expansions += 1
        if cfg.trace:
            m.trace.append(rec.state)
        task = self.task
        closed = self.closed
        lazy = cfg.eval == "lazy"
        pref = rec.preferred
        g2 = rec.g + 1
        children, flags = [], []
        for op, s2 in task.successors(rec.state):
            m.generated += 1
            old = closed.get(s2)
            if old is None:
                child = SearchNode(s2, g2, rec, op)
                closed[s2] = child
                if task.is_goal(s2):
                    self.goal_node = child
                    return child
                if lazy:
                    child.hs = rec.hs
                    child.dead = rec.dead
                else:
                    self._evaluate(child)
                self._assess(child, rec, op)
            elif cfg.reopen and g2 < old.g and not old.dead:
                old.g, old.parent, old.op = g2, rec, op
                m.reopened += 1
                if not self._graft:
                    old.expanded = False
                child = old
            else:
                continue
            children.append(child)
            flags.append(pref.get(op, 0) if pref else 0)
        self.open.on_expanded(rec, children, flags)
        if cfg.max_nodes is not None and len(closed) > cfg.max_nodes:
            raise ResourceLimit(f"node limit {cfg.max_nodes} exceeded")
        return None

    def iteration(self):
        """Run one tree selection and its whole burst (single-tree searches only)."""
        tree = self.open
        if not isinstance(tree, TreeOpenList):
            raise TypeError("iteration() needs a single tree open list")
        rec = tree.pop()
        if rec is None:
            return "exhausted"
        while rec is not None:
            if self.expand(rec) is not None:
                return "goal"
            if tree._q is None:
                break
            rec = tree._burst_pop()
        return "continue"

    def run(self) -> SearchResult:
        cfg = self.config
        status, reason = "exhausted", ""
        try:
            if self.root is None:
                self.start()
            if self.goal_node is None:
                max_exp = cfg.max_expansions
                deadline = self._deadline
                m = self.metrics
                if cfg.max_nodes is not None and len(self.closed) > cfg.max_nodes:
                    raise ResourceLimit(f"node limit {cfg.max_nodes} exceeded")
                while True:
                    if deadline is not None and time.monotonic() > deadline:
                        raise ResourceLimit(f"time limit {cfg.time_limit}s exceeded")
                    if max_exp is not None and m.expansions >= max_exp:
                        raise ResourceLimit(f"expansion limit {max_exp} reached")
                    rec = self.open.pop()
                    if rec is None:
                        reason = "open list exhausted"
                        break
                    if self.expand(rec) is not None:
                        break
        except ResourceLimit as e:
            status, reason = "resource-limit", str(e)
        except MemoryError:
            status, reason = "resource-limit", "out of memory"
        plan = None
        if self.goal_node is not None:
            status, reason, plan = "solved", "", self.goal_node.path()
        self._finish()
        return SearchResult(status, plan, self.metrics, reason)

    def _finish(self):
        m = self.metrics
        m.wall_time = max(time.monotonic() - (self._start or time.monotonic()), 1e-9)
        m.evals_per_sec = m.evaluations / m.wall_time
        m.mean_eval_depth = self._depth_sum / m.evaluations if m.evaluations else 0.0
        m.closed_size = len(self.closed)
        lists = self._alt.queues if self._alt is not None else [self.open]
        for ol in lists:
            m.scan_steps += ol.scan_steps
            m.heap_compares += ol.heap_compares
            m.queue_pushes += ol.queue_pushes
            if isinstance(ol, TreeOpenList):
                m.descent_edges += ol.descent_edges
                m.nec_evals += ol.nec_evals
                m.selections += ol.selections
                m.backprops += ol.backprops
                m.peak_tree_size = max(m.peak_tree_size, ol.peak_size)
                m.collapses += ol.collapses
                m.grafts += ol.grafts
        if self._alt is not None:
            m.boosted_pops = self._alt.boosted_pops
        if self.novelty is not None:
            m.novelty_refused = self.novelty.refused
            m.novelty_partitions = len(self.novelty.partitions)

    @property
    def tree(self):
        return self.open if isinstance(self.open, TreeOpenList) else None


def run_search(task, config: SearchConfig | None = None, heuristics=None, **kwargs) -> SearchResult:
    if config is None:
        config = SearchConfig(**kwargs)
    elif kwargs:
        raise TypeError("pass either a config or keyword settings, not both")
    return Search(task, config, heuristics).run()
