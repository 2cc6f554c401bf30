"""Egocentric single-agent planners: cardinal A* and any-angle Theta*.

Both ignore other agents' motion; ``extra_blocked`` lets the caller forbid
cells (other agents' endpoints) without touching the map.  Ties on f are
broken toward larger g, then by neighbour order up/left/down/right.
"""
from __future__ import annotations

import heapq
import math
from itertools import count
from typing import Iterable, Optional, Sequence

from .grid import Cell, GridMap, MOVES4, line_of_sight

GeomPath = tuple  # tuple of Cell, first = start, last = goal


def _reconstruct(parent: dict, goal: Cell) -> GeomPath:
    path = [goal]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def astar_cardinal(
    m: GridMap, start: Cell, goal: Cell, extra_blocked: Iterable[Cell] = frozenset()
) -> Optional[GeomPath]:
    """Shortest 4-connected path, or None if goal is unreachable."""
    start, goal = tuple(start), tuple(goal)
    if start == goal:
        return (start,)
    blocked = m.blocked
    W, H = m.width, m.height
    gx, gy = goal
    tie = count()
    g = {start: 0}
    parent = {start: None}
    closed = set()
    open_ = [(abs(start[0] - gx) + abs(start[1] - gy), 0, next(tie), start)]
    while open_:
        _, neg_g, _, cur = heapq.heappop(open_)
        if cur in closed:
            continue
        if cur == goal:
            return _reconstruct(parent, goal)
        closed.add(cur)
        gc = -neg_g + 1
        cx, cy = cur
        for dx, dy in MOVES4:
            nx, ny = cx + dx, cy + dy
            n = (nx, ny)
            if not (0 <= nx < W and 0 <= ny < H) or n in blocked or n in extra_blocked or n in closed:
                continue
            if gc < g.get(n, math.inf):
                g[n] = gc
                parent[n] = cur
                heapq.heappush(open_, (gc + abs(nx - gx) + abs(ny - gy), -gc, next(tie), n))
    return None


def _dist(a: Cell, b: Cell) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def thetastar_anyangle(
    m: GridMap, start: Cell, goal: Cell, extra_blocked: Iterable[Cell] = frozenset()
) -> Optional[GeomPath]:
    """Theta* over the 4-connected expansion with disk-clearance line of sight."""
    start, goal = tuple(start), tuple(goal)
    if start == goal:
        return (start,)
    blocked = m.blocked
    W, H = m.width, m.height
    tie = count()
    g = {start: 0.0}
    parent = {start: None}
    closed = set()
    los_cache = {}

    def los(a, b):
        key = (a, b) if a <= b else (b, a)
        hit = los_cache.get(key)
        if hit is None:
            hit = los_cache[key] = line_of_sight(m, a, b, extra_blocked)
        return hit

    open_ = [(_dist(start, goal), -0.0, next(tie), start)]
    while open_:
        _, neg_g, _, cur = heapq.heappop(open_)
        if cur in closed:
            continue
        if cur == goal:
            return _reconstruct(parent, goal)
        closed.add(cur)
        gc = g[cur]
        pc = parent[cur]
        cx, cy = cur
        for dx, dy in MOVES4:
            nx, ny = cx + dx, cy + dy
            n = (nx, ny)
            if not (0 <= nx < W and 0 <= ny < H) or n in blocked or n in extra_blocked or n in closed:
                continue
            if pc is not None and los(pc, n):
                cand, par = g[pc] + _dist(pc, n), pc
            else:
                cand, par = gc + 1.0, cur
            if cand < g.get(n, math.inf) - 1e-12:
                g[n] = cand
                parent[n] = par
                heapq.heappush(open_, (cand + _dist(n, goal), -cand, next(tie), n))
    return None


def path_length(path: Sequence[Cell]) -> float:
    return sum(_dist(path[i], path[i + 1]) for i in range(len(path) - 1))
