"""Tree-based open list: bandit descent, budgeted bursts and g-ordered backup.

Every tree node summarizes its subtree two ways: streaming statistics of the
heuristic samples below it (Monte-Carlo backup) and ``key``, the minimum over
unlocked children of their keys (Bellman backup). Leaves use their own
heuristic value or novelty as key. Selection descends from the root picking
the argmin child under the tree's policy:

    ucb1     mean - c * sqrt(2 ln T / t)
    normal2  mean - sigma * sqrt(2 ln T)
    greedy   key (min heuristic value below), no exploration
    n2       key first, normal2 among equal keys

Ties always go to the earliest child.
"""
from __future__ import annotations

import math
from heapq import heappop, heappush

from .bilevel import Budget, CollapsePolicy, collapse, effective_theta
from .queues import make_queue

INF = math.inf
NEG_INF = -math.inf
POLICIES = ("ucb1", "normal2", "greedy", "n2")


class TreeNode:
    __slots__ = ("rec", "parent", "children", "t", "mean", "m2", "key", "locked", "pinned",
                 "depth", "expanded", "removed", "inb")

    def __init__(self, rec, parent=None, depth=0):
        self.rec = rec
        self.parent = parent
        self.children = []
        self.t = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.key = INF
        self.locked = False
        self.pinned = False  # locked as an inferior duplicate; never unlocked
        self.depth = depth
        self.expanded = False
        self.removed = False
        self.inb = False

    @property
    def g(self):
        return self.rec.g

    @property
    def stats(self):
        from .bandit import ArmStats
        return ArmStats(self.t, self.mean, self.m2)

    def __repr__(self):
        return (f"TreeNode(state={self.rec.state}, depth={self.depth}, t={self.t}, "
                f"mean={self.mean:.3g}, key={self.key}, locked={self.locked})")


class BackpropQueue:
    """Set of tree nodes popped in decreasing g (deepest first)."""

    def __init__(self):
        self._heap = []
        self._seq = 0
        self._n = 0

    def __len__(self):
        return self._n

    def __bool__(self):
        return self._n > 0

    def add(self, tn):
        if tn.inb:
            return
        tn.inb = True
        self._n += 1
        heappush(self._heap, (-tn.rec.g, self._seq, tn))
        self._seq += 1

    def discard(self, tn):
        if tn.inb:
            tn.inb = False
            self._n -= 1

    def popmax(self):
        heap = self._heap
        while heap:
            tn = heappop(heap)[2]
            if tn.inb:
                tn.inb = False
                self._n -= 1
                return tn
        raise IndexError("pop from an empty backpropagation queue")


class TreeOpenList:
    """One search tree used as an open list.

    ``mode`` is ``plain`` (one expansion per selection), ``bilevel`` (a
    best-first burst whose budget is the descent length) or ``fixed`` (burst
    budget ``budget.n``). The burst frontier lives here, so each ``pop`` hands
    out a single node; backpropagation runs once the burst is over.

    ``hidx`` picks the heuristic component of search records feeding the
    statistics; ``nidx`` picks the novelty component used as leaf key by ``n2``.
    """

    kind = "tree"
    preferred_only = False

    def __init__(self, policy="normal2", mode="plain", budget: Budget | None = None,
                 collapse_policy: CollapsePolicy | None = None, queue="bucket", hidx=0, nidx=0,
                 c=1.0, include_own=True, graft=False, name=None):
        if policy not in POLICIES:
            raise ValueError(f"unknown tree policy {policy!r}; choose from {POLICIES}")
        if mode not in ("plain", "bilevel", "fixed"):
            raise ValueError(f"unknown tree mode {mode!r}")
        if budget is None:
            budget = Budget("fixed", 100) if mode == "fixed" else Budget("depth")
        if mode == "fixed" and budget.mode != "fixed":
            raise ValueError("fixed mode needs a fixed:N budget")
        self.policy = policy
        self.mode = mode
        self.budget = budget
        self.collapse_policy = collapse_policy or CollapsePolicy()
        self.queue_kind = queue
        self.hidx = hidx
        self.nidx = nidx
        self.c = c
        self.include_own = include_own
        self.graft = graft
        self.name = name or f"tree({policy})"
        self.root = None
        self.nodes = {}  # state -> live tree node
        self.B = BackpropQueue()
        self._q = None
        self._left = 0
        self._current = None
        # counters
        self.size = 0
        self.peak_size = 0
        self.selections = 0
        self.descent_edges = 0
        self.nec_evals = 0
        self.backprops = 0
        self.collapses = 0
        self.grafts = 0
        self.burst_expansions = 0
        self.queue_pushes = 0
        self.queue_pops = 0
        self.scan_steps = 0
        self.heap_compares = 0

    # -- node bookkeeping -------------------------------------------------

    def _new(self, rec, parent):
        tn = TreeNode(rec, parent, 0 if parent is None else parent.depth + 1)
        self.nodes[rec.state] = tn
        self.size += 1
        if self.size > self.peak_size:
            self.peak_size = self.size
        self.refresh(tn)
        return tn

    def insert_root(self, rec):
        self.root = self._new(rec, None)

    def __len__(self):
        return 0 if self.root is None or self.root.locked else 1

    def refresh(self, tn) -> bool:
        """Recompute ``tn``'s statistics, key and lock from its children.

        Returns True when anything changed.
        """
        rec = tn.rec
        h = rec.hs[self.hidx]
        ch = tn.children
        if h != INF and (self.include_own or not ch):
            t, mean, m2 = 1, float(h), 0.0
        else:
            t, mean, m2 = 0, 0.0, 0.0
        if ch:
            key = INF
            all_locked = True
            for c in ch:
                ct = c.t
                if ct:
                    if t:
                        n = t + ct
                        delta = c.mean - mean
                        mean += delta * ct / n
                        m2 += c.m2 + delta * delta * t * ct / n
                        t = n
                    else:
                        t, mean, m2 = ct, c.mean, c.m2
                if not c.locked:
                    all_locked = False
                    if c.key < key:
                        key = c.key
        else:
            all_locked = True
            if self.policy == "n2":
                key = rec.novelty[self.nidx]
            else:
                key = h
        locked = tn.pinned or rec.dead or h == INF or (tn.expanded and all_locked)
        changed = (t != tn.t or mean != tn.mean or m2 != tn.m2 or key != tn.key
                   or locked != tn.locked)
        tn.t, tn.mean, tn.m2, tn.key, tn.locked = t, mean, m2, key, locked
        return changed

    def drain(self):
        B = self.B
        n = 0
        while B:
            tn = B.popmax()
            if tn.removed:
                continue
            n += 1
            if self.refresh(tn) and tn.parent is not None:
                B.add(tn.parent)
        self.backprops += n

    # -- selection ----------------------------------------------------------

    def select_child(self, node):
        """Argmin child of ``node`` under the tree policy; None if all are locked."""
        cands = [c for c in node.children if not c.locked]
        self.nec_evals += len(cands)
        if not cands:
            return None
        policy = self.policy
        if policy == "greedy":
            best = cands[0]
            for c in cands:
                if c.key < best.key:
                    best = c
            return best
        if policy == "n2":
            k = min(c.key for c in cands)
            cands = [c for c in cands if c.key == k]
            if len(cands) == 1:
                return cands[0]
            policy = "normal2"
        T = 0
        for c in cands:
            T += c.t
        logT = math.log(T) if T > 1 else 0.0
        best, best_v = None, INF
        if policy == "normal2":
            scale = math.sqrt(2.0 * logT)
            for c in cands:
                t = c.t
                if t < 2:
                    return c
                v = c.mean - math.sqrt(c.m2 / (t - 1)) * scale
                if v < best_v or best is None:
                    best, best_v = c, v
        else:
            cc = self.c
            for c in cands:
                t = c.t
                if t < 1:
                    return c
                v = c.mean - cc * math.sqrt(2.0 * logT / t)
                if v < best_v or best is None:
                    best, best_v = c, v
        return best

    def select_leaf(self):
        """Descend from the root to a leaf; returns ``(leaf, descent_edges)``."""
        n = self.root
        if n is None or n.locked:
            raise LookupError("the tree is exhausted")
        edges = 0
        while n.children:
            nxt = self.select_child(n)
            if nxt is None:
                raise RuntimeError("unlocked node with only locked children; backpropagation pending")
            n = nxt
            edges += 1
        self.selections += 1
        self.descent_edges += edges
        return n, edges

    # -- open-list protocol -------------------------------------------------

    def _burst_key(self, tn):
        return int(tn.rec.hs[self.hidx])

    def _end_burst(self):
        q = self._q
        if q is not None:
            self.queue_pushes += q.pushes
            self.queue_pops += q.pops
            self.scan_steps += q.scan_steps
            self.heap_compares += getattr(q, "compares", 0)
            self._q = None
        self._left = 0
        self.drain()

    def _burst_pop(self):
        q = self._q
        while self._left > 0 and len(q):
            tn = q.popmin()[1]
            if tn.removed or tn.children or tn.locked or tn.rec.expanded:
                continue
            self._left -= 1
            self._current = tn
            self.burst_expansions += 1
            return tn.rec
        self._end_burst()
        return None

    def pop(self):
        if self._q is not None:
            rec = self._burst_pop()
            if rec is not None:
                return rec
        if self.B:
            self.drain()
        while True:
            if self.root is None or self.root.locked:
                return None
            leaf, edges = self.select_leaf()
            if self.mode == "plain":
                if leaf.rec.expanded:  # expanded elsewhere without reaching this tree
                    leaf.expanded = True
                    self.B.add(leaf)
                    self.drain()
                    continue
                self._current = leaf
                return leaf.rec
            q = make_queue(self.queue_kind)
            q.push(self._burst_key(leaf), leaf)
            self._q = q
            self._left = self.budget.initial(edges)
            rec = self._burst_pop()
            if rec is not None:
                return rec

    def on_generate(self, rec, flags=0):
        pass  # trees attach children in on_expanded

    def on_expanded(self, prec, children, flags=None):
        tn = self.nodes.get(prec.state)
        if tn is None or tn.removed:
            return
        tn.expanded = True
        own = tn is self._current
        q = self._q if own else None
        for crec in children:
            old = self.nodes.get(crec.state)
            if old is not None and not old.removed:
                if self.graft and self._graft(old, tn):
                    if q is not None and not old.locked and not old.children:
                        q.push(self._burst_key(old), old)
                    continue
                old.pinned = True
                if old.parent is not None:
                    self.B.add(old.parent)
                self.B.add(old)
            ctn = self._new(crec, tn)
            tn.children.append(ctn)
            if q is not None and not ctn.locked:
                q.push(self._burst_key(ctn), ctn)
        node = tn
        if own:
            self._current = None
            if tn.children and self.collapse_policy.kind != "off":
                node = collapse(tn, effective_theta(self.collapse_policy, tn))
                if node is not tn:
                    self.collapses += 1
                    self.size -= 1
                    self.B.discard(tn)
                    if self.nodes.get(prec.state) is tn:
                        del self.nodes[prec.state]
        self.B.add(node)
        if q is None or self._left <= 0 or not len(q):
            if q is not None:
                self._end_burst()
            else:
                self.drain()

    def _graft(self, old, new_parent) -> bool:
        """Move ``old``'s subtree under ``new_parent``; False if that makes a cycle."""
        a = new_parent
        while a is not None:
            if a is old:
                return False
            a = a.parent
        prev = old.parent
        if prev is not None:
            prev.children.remove(old)
            self.B.add(prev)
        old.parent = new_parent
        new_parent.children.append(old)
        stack = [(old, new_parent.depth + 1)]
        while stack:
            n, d = stack.pop()
            n.depth = d
            r = n.rec
            if r.parent is not None and r.parent.g + 1 < r.g:
                r.g = r.parent.g + 1
            stack.extend((c, d + 1) for c in n.children)
        self.B.add(old)
        self.grafts += 1
        return True

    # -- auditing -----------------------------------------------------------

    def iter_nodes(self):
        if self.root is None:
            return
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def leaves(self, node=None):
        node = node or self.root
        out = []
        stack = [node]
        while stack:
            n = stack.pop()
            if n.children:
                stack.extend(reversed(n.children))
            else:
                out.append(n)
        return out
