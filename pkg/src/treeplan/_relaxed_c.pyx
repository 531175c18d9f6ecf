# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled delete-relaxation kernel; same interface and results as ``_relaxed_py``."""
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cdef enum:
    INF = 0x3fffffff


cdef class TaskKernel:
    cdef public int num_facts, num_ops
    cdef int *pre_start
    cdef int *pre_ids
    cdef int *add_start
    cdef int *add_ids
    cdef int *preof_start
    cdef int *preof_ids
    cdef int *npre
    cdef int *goal
    cdef int ngoal
    cdef int *free_ops
    cdef int nfree
    cdef Py_ssize_t nbytes
    # scratch, reused between calls
    cdef int *cost
    cdef int *sup
    cdef int *unsat
    cdef int *acc
    cdef int *heap_c
    cdef int *heap_f
    cdef int heap_cap
    cdef int *stack
    cdef char *marked
    cdef char *inplan
    cdef int *count

    def __cinit__(self, int num_facts, pre_lists, add_lists, goal):
        cdef int o, i, f, n, total
        self.num_facts = num_facts
        self.num_ops = len(pre_lists)
        self.nbytes = (num_facts + 7) // 8
        n = self.num_ops
        self.pre_start = <int *> malloc((n + 1) * sizeof(int))
        self.add_start = <int *> malloc((n + 1) * sizeof(int))
        self.npre = <int *> malloc((n + 1) * sizeof(int))
        total = 0
        for o in range(n):
            self.pre_start[o] = total
            total += len(pre_lists[o])
        self.pre_start[n] = total
        self.pre_ids = <int *> malloc((total + 1) * sizeof(int))
        counts = [0] * num_facts
        for o in range(n):
            i = self.pre_start[o]
            self.npre[o] = len(pre_lists[o])
            for f in pre_lists[o]:
                self.pre_ids[i] = f
                counts[f] += 1
                i += 1
        total = 0
        for o in range(n):
            self.add_start[o] = total
            total += len(add_lists[o])
        self.add_start[n] = total
        self.add_ids = <int *> malloc((total + 1) * sizeof(int))
        for o in range(n):
            i = self.add_start[o]
            for f in add_lists[o]:
                self.add_ids[i] = f
                i += 1
        self.heap_cap = num_facts + total + 1
        self.preof_start = <int *> malloc((num_facts + 1) * sizeof(int))
        total = 0
        for f in range(num_facts):
            self.preof_start[f] = total
            total += counts[f]
        self.preof_start[num_facts] = total
        self.preof_ids = <int *> malloc((total + 1) * sizeof(int))
        fill = [self.preof_start[f] for f in range(num_facts)]
        for o in range(n):
            for f in pre_lists[o]:
                self.preof_ids[fill[f]] = o
                fill[f] += 1
        goal = list(goal)
        self.ngoal = len(goal)
        self.goal = <int *> malloc((self.ngoal + 1) * sizeof(int))
        for i in range(self.ngoal):
            self.goal[i] = goal[i]
        free_ops = [o for o in range(n) if len(pre_lists[o]) == 0]
        self.nfree = len(free_ops)
        self.free_ops = <int *> malloc((self.nfree + 1) * sizeof(int))
        for i in range(self.nfree):
            self.free_ops[i] = free_ops[i]
        self.cost = <int *> malloc((num_facts + 1) * sizeof(int))
        self.sup = <int *> malloc((num_facts + 1) * sizeof(int))
        self.unsat = <int *> malloc((n + 1) * sizeof(int))
        self.acc = <int *> malloc((n + 1) * sizeof(int))
        self.heap_c = <int *> malloc(self.heap_cap * sizeof(int))
        self.heap_f = <int *> malloc(self.heap_cap * sizeof(int))
        self.stack = <int *> malloc((num_facts + 1) * sizeof(int))
        self.marked = <char *> malloc(num_facts + 1)
        self.inplan = <char *> malloc(n + 1)
        self.count = <int *> malloc((n + 1) * sizeof(int))

    def __dealloc__(self):
        free(self.pre_start); free(self.pre_ids); free(self.add_start); free(self.add_ids)
        free(self.preof_start); free(self.preof_ids); free(self.npre); free(self.goal)
        free(self.free_ops); free(self.cost); free(self.sup); free(self.unsat); free(self.acc)
        free(self.heap_c); free(self.heap_f); free(self.stack); free(self.marked); free(self.inplan)
        free(self.count)

    cdef inline void _push(self, int *size, int c, int f) nogil:
        # binary min-heap on (cost, fact)
        cdef int i = size[0]
        cdef int parent
        size[0] += 1
        while i > 0:
            parent = (i - 1) >> 1
            if self.heap_c[parent] < c or (self.heap_c[parent] == c and self.heap_f[parent] <= f):
                break
            self.heap_c[i] = self.heap_c[parent]
            self.heap_f[i] = self.heap_f[parent]
            i = parent
        self.heap_c[i] = c
        self.heap_f[i] = f

    cdef inline void _pop(self, int *size, int *c, int *f) nogil:
        cdef int n, i, child, lc, lf
        c[0] = self.heap_c[0]
        f[0] = self.heap_f[0]
        size[0] -= 1
        n = size[0]
        if n == 0:
            return
        lc = self.heap_c[n]
        lf = self.heap_f[n]
        i = 0
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and (self.heap_c[child + 1] < self.heap_c[child] or
                                  (self.heap_c[child + 1] == self.heap_c[child] and
                                   self.heap_f[child + 1] < self.heap_f[child])):
                child += 1
            if lc < self.heap_c[child] or (lc == self.heap_c[child] and lf <= self.heap_f[child]):
                break
            self.heap_c[i] = self.heap_c[child]
            self.heap_f[i] = self.heap_f[child]
            i = child
        self.heap_c[i] = lc
        self.heap_f[i] = lf

    cdef inline void _fire(self, int o, int oc, int *size) nogil:
        cdef int k, g
        for k in range(self.add_start[o], self.add_start[o + 1]):
            g = self.add_ids[k]
            if oc < self.cost[g]:
                self.cost[g] = oc
                self.sup[g] = o
                self._push(size, oc, g)
            elif oc == self.cost[g] and o < self.sup[g]:
                self.sup[g] = o

    cdef void _fixpoint(self, object state, bint use_max) except *:
        cdef bytes raw = state.to_bytes(self.nbytes, "little")
        cdef const unsigned char *bits = raw
        cdef int f, o, k, c, size = 0
        cdef int n = self.num_facts
        for f in range(n):
            self.cost[f] = INF
            self.sup[f] = -1
        for o in range(self.num_ops):
            self.unsat[o] = self.npre[o]
            self.acc[o] = 0
        for f in range(n):
            if bits[f >> 3] & (1 << (f & 7)):
                self.cost[f] = 0
                self.heap_c[size] = 0
                self.heap_f[size] = f
                size += 1
        # all initial entries share cost 0 and were appended in fact order: already a heap
        for k in range(self.nfree):
            self._fire(self.free_ops[k], 1, &size)
        while size > 0:
            self._pop(&size, &c, &f)
            if c > self.cost[f]:
                continue
            for k in range(self.preof_start[f], self.preof_start[f + 1]):
                o = self.preof_ids[k]
                self.unsat[o] -= 1
                if use_max:
                    if c > self.acc[o]:
                        self.acc[o] = c
                else:
                    self.acc[o] += c
                if self.unsat[o] == 0:
                    self._fire(o, self.acc[o] + 1, &size)

    def hmax(self, state):
        cdef int i, g, h = 0
        self._fixpoint(state, True)
        for i in range(self.ngoal):
            g = self.goal[i]
            if self.cost[g] >= INF:
                return -1
            if self.cost[g] > h:
                h = self.cost[g]
        return h

    def hadd(self, state):
        cdef int i, g
        cdef long h = 0
        self._fixpoint(state, False)
        for i in range(self.ngoal):
            g = self.goal[i]
            if self.cost[g] >= INF:
                return -1
            h += self.cost[g]
        return h

    def hff(self, state):
        cdef int i, g, o, k, p, top = 0, count = 0
        cdef bint applicable
        self._fixpoint(state, False)
        memset(self.marked, 0, self.num_facts)
        memset(self.inplan, 0, self.num_ops)
        for i in range(self.ngoal):
            g = self.goal[i]
            if self.cost[g] >= INF:
                return -1, []
            if self.cost[g] > 0 and not self.marked[g]:
                self.marked[g] = 1
                self.stack[top] = g
                top += 1
        while top > 0:
            top -= 1
            o = self.sup[self.stack[top]]
            if self.inplan[o]:
                continue
            self.inplan[o] = 1
            count += 1
            for k in range(self.pre_start[o], self.pre_start[o + 1]):
                p = self.pre_ids[k]
                if self.cost[p] > 0 and not self.marked[p]:
                    self.marked[p] = 1
                    self.stack[top] = p
                    top += 1
        preferred = []
        for o in range(self.num_ops):
            if self.inplan[o]:
                applicable = True
                for k in range(self.pre_start[o], self.pre_start[o + 1]):
                    if self.cost[self.pre_ids[k]] != 0:
                        applicable = False
                        break
                if applicable:
                    preferred.append(o)
        return count, preferred

    def applicable(self, state):
        """Ids of operators whose preconditions hold in ``state``, ascending."""
        cdef bytes raw = state.to_bytes(self.nbytes, "little")
        cdef const unsigned char *bits = raw
        cdef int f, k, o
        cdef int n = self.num_facts
        memset(self.count, 0, self.num_ops * sizeof(int))
        for f in range(n):
            if bits[f >> 3] & (1 << (f & 7)):
                for k in range(self.preof_start[f], self.preof_start[f + 1]):
                    self.count[self.preof_ids[k]] += 1
        out = []
        for o in range(self.num_ops):
            if self.count[o] == self.npre[o]:
                out.append(o)
        return out
