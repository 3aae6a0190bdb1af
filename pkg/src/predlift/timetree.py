"""Random binary decomposition of the day range [1, T].

Every divider d between day d and day d+1 draws an independent uniform
priority; each window splits at its minimum-priority divider.  This is
distributed identically to recursive uniform splitting, and it can be built
in O(T) with a monotone stack (a Cartesian tree over the priorities).

Windows are stored in flat arrays indexed by node id; leaves are single
days.  An interval [a, b] is a window of the tree exactly when the dividers
bordering it both rank below every divider inside it, with the boundary of
the full range acting as rank minus-infinity.
"""

from __future__ import annotations

import random
from collections import deque

import numpy as np


class PartitionTree:
    """Binary partition tree over days [1, T].

    Node arrays: ``start``/``end`` are inclusive day bounds, ``left``/
    ``right``/``parent`` are node ids (-1 for none).  The root is node 0.
    """

    def __init__(self, T: int, priorities: np.ndarray, seed: int | None = None):
        if T < 1:
            raise ValueError("T must be at least 1")
        if len(priorities) != T - 1:
            raise ValueError("need exactly T-1 divider priorities")
        self.T = T
        self.seed = seed
        self.priorities = priorities
        self._build(priorities)

    @classmethod
    def build(cls, T: int, seed: int) -> "PartitionTree":
        rng = np.random.default_rng(seed)
        return cls(T, rng.random(T - 1), seed=seed)

    def _build(self, pr: np.ndarray) -> None:
        T = self.T
        n_nodes = 2 * T - 1
        self.start = [0] * n_nodes
        self.end = [0] * n_nodes
        self.left = [-1] * n_nodes
        self.right = [-1] * n_nodes
        self.parent = [-1] * n_nodes

        if T == 1:
            self.start[0] = self.end[0] = 1
            self.leaf_of = [0, 0]  # 1-indexed by day
            return

        # Min-Cartesian tree over divider indices 0..T-2 via monotone stack.
        cleft = [-1] * (T - 1)
        cright = [-1] * (T - 1)
        stack: list[int] = []
        for i in range(T - 1):
            last = -1
            while stack and pr[stack[-1]] > pr[i]:
                last = stack.pop()
            cleft[i] = last
            if stack:
                cright[stack[-1]] = i
            stack.append(i)
        croot = stack[0]

        # Window for divider d over day interval [a, b]: children are the
        # sub-Cartesian-trees on [a, d+1] and [d+2, b] (days are 1-indexed).
        self.start = []
        self.end = []
        self.left = []
        self.right = []
        self.parent = []
        self.leaf_of = [0] * (T + 1)

        def new_node(a: int, b: int, parent: int) -> int:
            nid = len(self.start)
            self.start.append(a)
            self.end.append(b)
            self.left.append(-1)
            self.right.append(-1)
            self.parent.append(parent)
            if a == b:
                self.leaf_of[a] = nid
            return nid

        root = new_node(1, T, -1)
        work = [(croot, 1, T, root)]
        while work:
            d, a, b, nid = work.pop()
            mid = d + 1  # divider d splits [a, b] into [a, d+1], [d+2, b]
            lid = new_node(a, mid, nid)
            rid = new_node(mid + 1, b, nid)
            self.left[nid] = lid
            self.right[nid] = rid
            if cleft[d] != -1:
                work.append((cleft[d], a, mid, lid))
            if cright[d] != -1:
                work.append((cright[d], mid + 1, b, rid))

    # -- queries ---------------------------------------------------------

    def n_nodes(self) -> int:
        return len(self.start)

    def is_leaf(self, nid: int) -> bool:
        return self.left[nid] == -1

    def span(self, nid: int) -> tuple[int, int]:
        return self.start[nid], self.end[nid]

    def subtree_leaves(self, nid: int) -> int:
        return self.end[nid] - self.start[nid] + 1

    def smallest_window(self, t1: int, t2: int) -> int:
        """Lowest common ancestor of the leaves for days t1 and t2."""
        if not (1 <= t1 <= self.T and 1 <= t2 <= self.T):
            raise ValueError(f"days ({t1}, {t2}) out of range [1, {self.T}]")
        lo, hi = min(t1, t2), max(t1, t2)
        nid = 0
        while self.left[nid] != -1:
            l = self.left[nid]
            if hi <= self.end[l]:
                nid = l
            elif lo >= self.start[self.right[nid]]:
                nid = self.right[nid]
            else:
                break
        return nid

    def depth(self) -> int:
        """Maximum root-to-leaf edge count."""
        best = 0
        stack = [(0, 0)]
        while stack:
            nid, d = stack.pop()
            if self.left[nid] == -1:
                best = max(best, d)
            else:
                stack.append((self.left[nid], d + 1))
                stack.append((self.right[nid], d + 1))
        return best

    def windows_starting_at(self, day: int) -> list[int]:
        """Windows whose span starts at ``day``, topmost first.  They form a
        prefix-closed run of the chain from the highest such window down the
        left spine."""
        out = []
        nid = self.leaf_of[day]
        while nid != -1 and self.start[nid] == day:
            out.append(nid)
            nid = self.parent[nid]
        out.reverse()
        return out

    def bfs_descendants(self, nid: int):
        """Yield strict descendants of nid in breadth-first order."""
        q = deque()
        if self.left[nid] != -1:
            q.append(self.left[nid])
            q.append(self.right[nid])
        while q:
            w = q.popleft()
            yield w
            if self.left[w] != -1:
                q.append(self.left[w])
                q.append(self.right[w])

    def dump(self) -> str:
        lines = []
        stack = [(0, 0)]
        while stack:
            nid, d = stack.pop()
            lines.append("  " * d + f"[{self.start[nid]}, {self.end[nid]}]")
            if self.left[nid] != -1:
                stack.append((self.right[nid], d + 1))
                stack.append((self.left[nid], d + 1))
        return "\n".join(lines)


def is_window_interval(priorities: np.ndarray, a: int, b: int) -> bool:
    """Interval test used to cross-check construction: [a, b] is a window
    iff its bordering dividers rank strictly below all dividers inside it
    (range boundaries count as rank minus-infinity)."""
    T = len(priorities) + 1
    if a == 1 and b == T:
        return True
    inner = priorities[a - 1 : b - 1]
    if len(inner) == 0:
        return True  # single day: always a leaf window
    m = float(inner.min())
    lo = priorities[a - 2] if a >= 2 else -np.inf
    hi = priorities[b - 1] if b <= T - 1 else -np.inf
    return lo < m and hi < m


def smallest_window_size(priorities: np.ndarray, t1: int, t2: int) -> int:
    """Size in days of the smallest window containing both t1 and t2,
    straight from divider priorities (no tree build).

    The separator is the minimum-priority divider between the two days; the
    window extends left and right to the first dividers ranking below it.
    """
    T = len(priorities) + 1
    lo, hi = min(t1, t2), max(t1, t2)
    if lo == hi:
        return 1
    # interior dividers of [lo, hi] are divider numbers lo..hi-1 (0-based lo-1..hi-2)
    m = float(priorities[lo - 1 : hi - 1].min())
    # expand left: last divider index j in [0, lo-2] with priority < m
    a = 1
    left_region = priorities[: lo - 1]
    idx = np.flatnonzero(left_region < m)
    if idx.size:
        a = int(idx[-1]) + 2
    # expand right: first divider index j in [hi-1, T-2] with priority < m
    b = T
    right_region = priorities[hi - 1 :]
    idx = np.flatnonzero(right_region < m)
    if idx.size:
        b = hi + int(idx[0])
    return b - a + 1
