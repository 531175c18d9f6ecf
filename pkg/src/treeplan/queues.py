"""Integer-keyed priority queues with operation counters.

Both queues order entries by ``(key, seq)`` where ``seq`` is a per-queue
insertion counter, so they pop identical sequences for identical workloads.
The counters let callers measure popmin cost: cursor advances for the bucket
queue, key comparisons for the heap.
"""
from __future__ import annotations

from collections import deque
from typing import Any


class BucketQueue:
    """Dial-style array of FIFO buckets with a min-key cursor."""

    def __init__(self, capacity: int = 16):
        self._buckets: list[deque | None] = [None] * max(1, capacity)
        self._min = 0
        self._len = 0
        self._seq = 0
        self.pushes = 0
        self.pops = 0
        self.scan_steps = 0

    def __len__(self) -> int:
        return self._len

    def push(self, key: int, payload: Any) -> None:
        if key < 0:
            raise ValueError(f"keys must be non-negative, got {key}")
        buckets = self._buckets
        if key >= len(buckets):
            buckets.extend([None] * max(key + 1 - len(buckets), len(buckets)))
        b = buckets[key]
        if b is None:
            b = buckets[key] = deque()
        b.append((self._seq, payload))
        self._seq += 1
        if self._len == 0 or key < self._min:
            self._min = key
        self._len += 1
        self.pushes += 1

    def popmin(self) -> tuple[int, Any]:
        if not self._len:
            raise IndexError("pop from an empty queue")
        buckets = self._buckets
        k = self._min
        while not buckets[k]:
            k += 1
            self.scan_steps += 1
        self._min = k
        _, payload = buckets[k].popleft()
        self._len -= 1
        self.pops += 1
        return k, payload

    def min_key(self) -> int:
        if not self._len:
            raise IndexError("empty queue has no minimum")
        buckets = self._buckets
        k = self._min
        while not buckets[k]:
            k += 1
            self.scan_steps += 1
        self._min = k
        return k

    def op_counters(self) -> tuple[int, int, int]:
        return self.pushes, self.pops, self.scan_steps


class HeapQueue:
    """Binary min-heap over ``(key, seq)``; counts key comparisons."""

    def __init__(self):
        self._keys: list[tuple[int, int]] = []
        self._items: list[Any] = []
        self._seq = 0
        self.pushes = 0
        self.pops = 0
        self.scan_steps = 0
        self.compares = 0

    def __len__(self) -> int:
        return len(self._keys)

    def push(self, key: int, payload: Any) -> None:
        if key < 0:
            raise ValueError(f"keys must be non-negative, got {key}")
        keys, items = self._keys, self._items
        entry = (key, self._seq)
        self._seq += 1
        keys.append(entry)
        items.append(payload)
        i = len(keys) - 1
        compares = 0
        while i:
            parent = (i - 1) >> 1
            compares += 1
            if keys[parent] <= entry:
                break
            keys[i] = keys[parent]
            items[i] = items[parent]
            i = parent
        keys[i] = entry
        items[i] = payload
        self.compares += compares
        self.pushes += 1

    def popmin(self) -> tuple[int, Any]:
        keys, items = self._keys, self._items
        if not keys:
            raise IndexError("pop from an empty queue")
        top_key, top = keys[0], items[0]
        last_key, last = keys.pop(), items.pop()
        n = len(keys)
        if n:
            i = 0
            compares = 0
            while True:
                child = 2 * i + 1
                if child >= n:
                    break
                if child + 1 < n:
                    compares += 1
                    if keys[child + 1] < keys[child]:
                        child += 1
                compares += 1
                if last_key <= keys[child]:
                    break
                keys[i] = keys[child]
                items[i] = items[child]
                i = child
            keys[i] = last_key
            items[i] = last
            self.compares += compares
        self.pops += 1
        return top_key[0], top

    def min_key(self) -> int:
        if not self._keys:
            raise IndexError("empty queue has no minimum")
        return self._keys[0][0]

    def op_counters(self) -> tuple[int, int, int]:
        return self.pushes, self.pops, self.scan_steps


QUEUES = {"bucket": BucketQueue, "heap": HeapQueue}


def make_queue(kind: str):
    try:
        return QUEUES[kind]()
    except KeyError:
        raise ValueError(f"unknown queue {kind!r}; choose from {sorted(QUEUES)}") from None


def push(q, key: int, payload: Any) -> None:
    q.push(key, payload)


def popmin(q) -> tuple[int, Any]:
    return q.popmin()


def op_counters(q) -> tuple[int, int, int]:
    return q.op_counters()
