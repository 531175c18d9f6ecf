"""Width-2 novelty over facts, partitioned by heuristic-value tuples.

Each partition keeps two packed bitvectors: ``v1`` over facts and ``v2`` over
unordered fact pairs ``i < j``. Assessing a state only inspects tuples that
contain a newly added fact; that is exact as long as the state's parent was
recorded in the same partition, otherwise the caller passes the whole state.
"""
from __future__ import annotations

from typing import Hashable, Iterable

from .task import State, state_facts

W_MAX = 2
NOT_NOVEL = W_MAX + 1


def pair_index(i: int, j: int) -> int:
    """Colex packing of the pair ``i < j``; pairs below ``n`` fill ``[0, n(n-1)/2)``."""
    if not 0 <= i < j:
        raise ValueError(f"need 0 <= i < j, got ({i}, {j})")
    return j * (j - 1) // 2 + i


class _Partition:
    __slots__ = ("v1", "v2", "fresh")

    def __init__(self, n: int):
        self.v1 = bytearray((n + 7) >> 3)
        self.v2 = bytearray((n * (n - 1) // 2 + 7) >> 3)
        self.fresh = True


class NoveltyStore:
    def __init__(self, num_facts: int, max_bits: int | None = None):
        self.num_facts = num_facts
        self.bits_per_partition = num_facts + num_facts * (num_facts - 1) // 2
        self.max_partitions = None if max_bits is None else max_bits // max(1, self.bits_per_partition)
        self.partitions: dict[Hashable, _Partition] = {}
        self.refused = 0  # assessments answered "not novel" because the cap was hit

    @property
    def total_bits(self) -> int:
        return len(self.partitions) * self.bits_per_partition

    @property
    def disabled(self) -> bool:
        return self.max_partitions is not None and len(self.partitions) >= self.max_partitions

    def _partition(self, key):
        part = self.partitions.get(key)
        if part is None:
            if self.disabled:
                return None
            part = self.partitions[key] = _Partition(self.num_facts)
        return part

    def assess_and_record(self, s: State, fired_adds: Iterable[int] | None, h_tuple: Hashable) -> int:
        """Novelty of ``s`` in ``h_tuple``'s partition; marks every inspected tuple.

        ``fired_adds=None`` means the whole state is inspected.
        """
        part = self._partition(h_tuple)
        if part is None:
            self.refused += 1
            return NOT_NOVEL
        facts = state_facts(s)
        n = self.num_facts
        if facts and facts[-1] >= n:
            raise ValueError(f"fact id {facts[-1]} out of range for {n} facts")
        if fired_adds is None:
            new = facts
        else:
            new = sorted(fired_adds)
            for f in new:
                if not 0 <= f < n:
                    raise ValueError(f"fact id {f} out of range for {n} facts")
                if not s >> f & 1:
                    raise ValueError(f"fired fact {f} does not hold in the state")
        v1, v2 = part.v1, part.v2
        w = NOT_NOVEL
        for f in new:
            byte, bit = f >> 3, 1 << (f & 7)
            if not v1[byte] & bit:
                v1[byte] |= bit
                w = 1
        for f in new:
            base = f * (f - 1) // 2
            for g in facts:
                if g == f:
                    continue
                idx = base + g if g < f else g * (g - 1) // 2 + f
                byte, bit = idx >> 3, 1 << (idx & 7)
                if not v2[byte] & bit:
                    v2[byte] |= bit
                    if w > 2:
                        w = 2
        if part.fresh:
            part.fresh = False
            w = 1
        return w


def assess_and_record(store: NoveltyStore, s: State, fired_adds, h_tuple) -> int:
    return store.assess_and_record(s, fired_adds, h_tuple)
