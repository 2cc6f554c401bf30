"""Safe intervals of a cell with respect to a set of fixed trajectories."""
from __future__ import annotations

import bisect
from typing import Optional

from .geometry import EPS_PLAN, INF, MotionSegment, TimeInterval
from .grid import Cell
from .trajectory import as_index

EPS_SI = 1e-9


class SafeIntervalList:
    """Sorted, disjoint, maximal closed intervals on [0, inf)."""

    __slots__ = ("intervals", "_los")

    def __init__(self, intervals):
        self.intervals = tuple(TimeInterval(*iv) for iv in intervals)
        self._los = [iv.lo for iv in self.intervals]

    def __len__(self):
        return len(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]

    def __iter__(self):
        return iter(self.intervals)

    def __repr__(self):
        return f"SafeIntervalList({[tuple(iv) for iv in self.intervals]})"

    def locate(self, t: float, tol: float = 0.0) -> Optional[int]:
        i = bisect.bisect_right(self._los, t + tol) - 1
        if i >= 0 and t <= self.intervals[i].hi + tol:
            return i
        return None

    def next_safe_start(self, t: float) -> Optional[float]:
        i = bisect.bisect_right(self._los, t) - 1
        if i >= 0 and t <= self.intervals[i].hi:
            return t
        if i + 1 < len(self.intervals):
            return self.intervals[i + 1].lo
        return None

    @property
    def unbounded(self) -> bool:
        return bool(self.intervals) and self.intervals[-1].hi == INF


def complement(blocked, eps: float = EPS_SI) -> SafeIntervalList:
    """Safe intervals left over on [0, inf) after removing open blocked windows."""
    out = []
    cursor = 0.0
    for lo, hi in sorted(blocked):
        if hi <= cursor:
            continue
        if lo - cursor >= eps:
            out.append((cursor, lo))
        cursor = max(cursor, hi)
        if cursor == INF:
            break
    if cursor != INF:
        out.append((cursor, INF))
    return SafeIntervalList(out)


def blocked_windows(cell: Cell, fixed, R: float, eps: float = EPS_PLAN) -> list:
    probe = MotionSegment.wait(cell, 0.0, INF)
    return as_index(fixed, R).windows(probe, R, eps)


def safe_intervals_for(cell: Cell, fixed, R: float, eps: float = EPS_PLAN) -> SafeIntervalList:
    if R <= 0:
        raise ValueError("R must be positive")
    return complement(blocked_windows(cell, fixed, R, eps))


def locate(si: SafeIntervalList, t: float) -> Optional[int]:
    return si.locate(t)


def next_safe_start(si: SafeIntervalList, t: float) -> Optional[float]:
    return si.next_safe_start(t)
