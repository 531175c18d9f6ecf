"""Pure-Python task kernel (fallback for ``_relaxed_c``).

Both backends expose the same class with the same results bit for bit; the
compiled one is preferred at import time by :mod:`treeplan.kernels`.
"""
from heapq import heappop, heappush

DEAD = -1


class TaskKernel:
    """Applicability tests plus a Dijkstra-style delete-relaxation fixpoint.

    Operator cost is 1 plus the aggregate (sum or max) of its precondition
    costs. Each reachable fact records a best supporter: the achiever of
    minimal cost, lowest operator id on ties.
    """

    def __init__(self, num_facts, pre_lists, add_lists, goal):
        self.num_facts = num_facts
        self.num_ops = len(pre_lists)
        self.pre = [tuple(p) for p in pre_lists]
        self.add = [tuple(a) for a in add_lists]
        self.npre = [len(p) for p in self.pre]
        self.goal = tuple(goal)
        self.pre_of = [[] for _ in range(num_facts)]
        for o, pre in enumerate(self.pre):
            for f in pre:
                self.pre_of[f].append(o)
        self.free_ops = [o for o in range(self.num_ops) if not self.pre[o]]
        self._masks = [sum(1 << f for f in pre) for pre in self.pre]

    def _fixpoint(self, state, use_max):
        INF = float("inf")
        cost = [INF] * self.num_facts
        sup = [-1] * self.num_facts
        unsat = self.npre[:]
        acc = [0] * self.num_ops
        heap = []
        s = state
        while s:
            low = s & -s
            f = low.bit_length() - 1
            cost[f] = 0
            heap.append((0, f))
            s ^= low
        add = self.add

        def fire(o, oc):
            for g in add[o]:
                c = cost[g]
                if oc < c:
                    cost[g] = oc
                    sup[g] = o
                    heappush(heap, (oc, g))
                elif oc == c and o < sup[g]:
                    sup[g] = o

        for o in self.free_ops:
            fire(o, 1)
        pre_of = self.pre_of
        while heap:
            c, f = heappop(heap)
            if c > cost[f]:
                continue
            for o in pre_of[f]:
                unsat[o] -= 1
                if use_max:
                    if c > acc[o]:
                        acc[o] = c
                else:
                    acc[o] += c
                if unsat[o] == 0:
                    fire(o, acc[o] + 1)
        return cost, sup

    def hmax(self, state):
        cost, _ = self._fixpoint(state, True)
        h = 0
        for g in self.goal:
            if cost[g] == float("inf"):
                return DEAD
            if cost[g] > h:
                h = cost[g]
        return h

    def hadd(self, state):
        cost, _ = self._fixpoint(state, False)
        h = 0
        for g in self.goal:
            if cost[g] == float("inf"):
                return DEAD
            h += cost[g]
        return h

    def hff(self, state):
        """Return ``(h, preferred)``; preferred is sorted by operator id."""
        cost, sup = self._fixpoint(state, False)
        stack = []
        marked = set()
        for g in self.goal:
            if cost[g] == float("inf"):
                return DEAD, []
            if cost[g] > 0 and g not in marked:
                marked.add(g)
                stack.append(g)
        plan = set()
        pre = self.pre
        while stack:
            o = sup[stack.pop()]
            if o in plan:
                continue
            plan.add(o)
            for p in pre[o]:
                if cost[p] > 0 and p not in marked:
                    marked.add(p)
                    stack.append(p)
        preferred = sorted(o for o in plan if all(cost[p] == 0 for p in pre[o]))
        return len(plan), preferred

    def applicable(self, state):
        """Ids of operators whose preconditions hold in ``state``, ascending."""
        return [o for o, m in enumerate(self._masks) if state & m == m]
