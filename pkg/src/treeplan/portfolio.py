"""Round-robin alternation over open lists with boosted preferred queues."""
from __future__ import annotations

from .bandit import ArmStats, BanditContext, index_normal2

DEFAULT_BOOST = 10


class AlternationSet:
    """Several open lists popped in turn.

    After a node improves the best value seen for some heuristic, the next
    ``boost`` pops come from preferred-operator queues only. When those are
    all empty the pop falls back to the regular rotation and the credit is
    kept for later.
    """

    kind = "alternation"

    def __init__(self, queues, boost: int = DEFAULT_BOOST):
        if not queues:
            raise ValueError("alternation needs at least one open list")
        self.queues = list(queues)
        self.cursor = 0
        self.pcursor = 0
        self.boost = boost
        self.boost_credit = 0
        self.best_h_watch = None  # set from the root's values
        self.boosted_pops = 0
        self.improvements = 0
        self.pops = [0] * len(self.queues)
        self._preferred = [i for i, q in enumerate(self.queues) if q.preferred_only]

    def insert_root(self, rec):
        self.best_h_watch = list(rec.hs)
        for q in self.queues:
            q.insert_root(rec)

    def observe(self, hs) -> int:
        """Update the watch with a freshly evaluated node; returns the boosts granted."""
        watch = self.best_h_watch
        if watch is None:
            return 0
        gained = 0
        for i, h in enumerate(hs):
            if h < watch[i]:
                watch[i] = h
                gained += 1
        if gained:
            self.improvements += gained
            if self._preferred:
                self.boost_credit += gained * self.boost
        return gained

    def on_expanded(self, prec, children, flags):
        for q in self.queues:
            q.on_expanded(prec, children, flags)

    def pop(self):
        queues = self.queues
        if self.boost_credit > 0:
            pref = self._preferred
            m = len(pref)
            for k in range(m):
                i = pref[(self.pcursor + k) % m]
                rec = queues[i].pop()
                if rec is not None:
                    self.pcursor = (self.pcursor + k + 1) % m
                    self.boost_credit -= 1
                    self.boosted_pops += 1
                    self.pops[i] += 1
                    return rec
        n = len(queues)
        for k in range(n):
            i = (self.cursor + k) % n
            rec = queues[i].pop()
            if rec is not None:
                self.cursor = (i + 1) % n
                self.pops[i] += 1
                return rec
        return None

    def pop_with_source(self):
        before = list(self.pops)
        rec = self.pop()
        if rec is None:
            return None, None
        src = next(i for i, (a, b) in enumerate(zip(before, self.pops)) if a != b)
        return rec, self.queues[src]


def alternation_pop(aset: AlternationSet):
    rec, source = aset.pop_with_source()
    if rec is None:
        raise IndexError("every queue is empty")
    return rec, source


def n2_select(keys, stats, ctx: BanditContext | None = None, locked=None) -> int:
    """Child position with the least key; Normal2 index breaks key ties.

    ``ctx`` defaults to T = total pulls over the candidates.
    """
    cands = [i for i in range(len(keys)) if locked is None or not locked[i]]
    if not cands:
        raise ValueError("every child is locked")
    k = min(keys[i] for i in cands)
    tied = [i for i in cands if keys[i] == k]
    if len(tied) == 1:
        return tied[0]
    if ctx is None:
        ctx = BanditContext(max(1, sum(stats[i].t for i in tied)))
    best, best_v = tied[0], index_normal2(ArmStats(*stats[tied[0]]), ctx)
    for i in tied[1:]:
        v = index_normal2(ArmStats(*stats[i]), ctx)
        if v < best_v:
            best, best_v = i, v
    return best


NEBULA_LITE = ("n2:hff", "pr:hff", "n2:goalcount", "pr:goalcount")


def build_nebula_lite(task, **overrides):
    """Search over four alternating lists: novelty trees and preferred queues.

    Two heuristic streams (h_ff and goal count) each feed a novelty-keyed
    tree (bilevel bursts, dynamic collapsing) and a preferred-operator
    queue. Novelty is partitioned by both heuristic values.
    """
    from .search import Search, SearchConfig

    cfg = dict(search="bilevel", alternate=NEBULA_LITE, novelty="w2",
               novelty_partition="hff,goalcount", collapse="dtc", eval="eager",
               boost=DEFAULT_BOOST, config="nebula-lite")
    cfg.update(overrides)
    return Search(task, SearchConfig(**cfg))
