"""Occupancy grids, MovingAI map I/O and disk-clearance line of sight.

Cells are ``(col, row)`` tuples; the center of a cell sits at the integer
point ``(col, row)`` and every cell is a unit square around it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

Cell = tuple[int, int]

PASSABLE = frozenset(".G")
BLOCKED = frozenset("@OT")

# up, left, down, right (row 0 is the first map line)
MOVES4 = ((0, -1), (-1, 0), (0, 1), (1, 0))

LOS_CLEARANCE = 0.5


class MapFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    blocked: frozenset = field(default_factory=frozenset)
    name: str = ""

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"map dimensions must be positive, got {self.width}x{self.height}")
        for c in self.blocked:
            if not self.in_bounds(c):
                raise ValueError(f"blocked cell {c} outside {self.width}x{self.height} map")

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def passable(self, c: Cell) -> bool:
        return self.in_bounds(c) and c not in self.blocked

    @cached_property
    def occupancy(self) -> np.ndarray:
        """Boolean array indexed ``[row, col]``, True where blocked."""
        grid = np.zeros((self.height, self.width), dtype=bool)
        for col, row in self.blocked:
            grid[row, col] = True
        return grid

    def free_cells(self) -> list[Cell]:
        return [(c, r) for r in range(self.height) for c in range(self.width) if (c, r) not in self.blocked]


def empty_map(width: int, height: int, name: str = "") -> GridMap:
    return GridMap(width, height, frozenset(), name or f"empty-{width}-{height}")


def parse_map(text: str, name: str = "") -> GridMap:
    lines = text.splitlines()
    header = {}
    i = 0
    while True:
        if i >= len(lines):
            raise MapFormatError(f"line {i + 1}: unexpected end of file inside header")
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line == "map":
            break
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("type", "height", "width"):
            raise MapFormatError(f"line {i}: malformed header line {line!r}")
        if parts[0] in header:
            raise MapFormatError(f"line {i}: duplicate header key {parts[0]!r}")
        header[parts[0]] = parts[1]
    for key in ("type", "height", "width"):
        if key not in header:
            raise MapFormatError(f"line {i}: header is missing {key!r}")
    try:
        height, width = int(header["height"]), int(header["width"])
    except ValueError:
        raise MapFormatError(f"line {i}: non-integer map dimensions") from None
    if height < 1 or width < 1:
        raise MapFormatError(f"line {i}: map dimensions must be positive")

    rows = lines[i:]
    while rows and not rows[-1].strip():
        rows.pop()
    if len(rows) != height:
        raise MapFormatError(
            f"line {i + min(len(rows), height) + 1}: expected {height} map rows, found {len(rows)}"
        )
    blocked = set()
    for r, row in enumerate(rows):
        lineno = i + r + 1
        row = row.rstrip("\r")
        if len(row) != width:
            raise MapFormatError(f"line {lineno}: expected {width} characters, found {len(row)}")
        for c, ch in enumerate(row):
            if ch in BLOCKED:
                blocked.add((c, r))
            elif ch not in PASSABLE:
                raise MapFormatError(f"line {lineno}: unknown map character {ch!r}")
    return GridMap(width, height, frozenset(blocked), name)


def serialize_map(m: GridMap) -> str:
    out = ["type octile", f"height {m.height}", f"width {m.width}", "map"]
    for r in range(m.height):
        out.append("".join("@" if (c, r) in m.blocked else "." for c in range(m.width)))
    return "\n".join(out) + "\n"


def load_map(path) -> GridMap:
    path = Path(path)
    return parse_map(path.read_text(), name=path.stem)


def neighbors4(m: GridMap, c: Cell, extra_blocked: Iterable[Cell] = ()) -> list[Cell]:
    out = []
    for dx, dy in MOVES4:
        n = (c[0] + dx, c[1] + dy)
        if m.passable(n) and n not in extra_blocked:
            out.append(n)
    return out


def _segment_box_distance(ax, ay, bx, by, cx, cy, half=0.5) -> float:
    """Distance between segment a-b and the closed axis-aligned square of half-size ``half`` at c."""
    xmin, xmax, ymin, ymax = cx - half, cx + half, cy - half, cy + half
    # Liang-Barsky clip: does the segment enter the square?
    dx, dy = bx - ax, by - ay
    t0, t1 = 0.0, 1.0
    hit = True
    for p, q in ((-dx, ax - xmin), (dx, xmax - ax), (-dy, ay - ymin), (dy, ymax - ay)):
        if p == 0.0:
            if q < 0.0:
                hit = False
                break
        else:
            r = q / p
            if p < 0.0:
                t0 = max(t0, r)
            else:
                t1 = min(t1, r)
            if t0 > t1:
                hit = False
                break
    if hit:
        return 0.0

    def point_box(px, py):
        ex = max(xmin - px, 0.0, px - xmax)
        ey = max(ymin - py, 0.0, py - ymax)
        return math.hypot(ex, ey)

    def point_seg(px, py):
        L = dx * dx + dy * dy
        t = 0.0 if L == 0.0 else min(max(((px - ax) * dx + (py - ay) * dy) / L, 0.0), 1.0)
        return math.hypot(ax + t * dx - px, ay + t * dy - py)

    return min(
        point_box(ax, ay),
        point_box(bx, by),
        point_seg(xmin, ymin),
        point_seg(xmin, ymax),
        point_seg(xmax, ymin),
        point_seg(xmax, ymax),
    )


def _corridor_candidates(a: Cell, b: Cell, reach: float):
    """Superset of the cells whose square may come within ``reach - 0.5`` of segment a-b."""
    ax, ay = a
    bx, by = b
    if abs(bx - ax) >= abs(by - ay):
        lo, hi = (ax, bx) if ax <= bx else (bx, ax)
        slope = 0.0 if bx == ax else (by - ay) / (bx - ax)
        for x in range(math.floor(lo - reach), math.ceil(hi + reach) + 1):
            # y-range of the segment over the column's x-band widened by the reach
            x0, x1 = max(x - reach, lo), min(x + reach, hi)
            if x0 > x1:
                continue
            ya, yb = ay + (x0 - ax) * slope, ay + (x1 - ax) * slope
            for y in range(math.floor(min(ya, yb) - reach), math.ceil(max(ya, yb) + reach) + 1):
                yield x, y
    else:
        lo, hi = (ay, by) if ay <= by else (by, ay)
        slope = (bx - ax) / (by - ay)
        for y in range(math.floor(lo - reach), math.ceil(hi + reach) + 1):
            y0, y1 = max(y - reach, lo), min(y + reach, hi)
            if y0 > y1:
                continue
            xa, xb = ax + (y0 - ay) * slope, ax + (y1 - ay) * slope
            for x in range(math.floor(min(xa, xb) - reach), math.ceil(max(xa, xb) + reach) + 1):
                yield x, y


def swept_cells(a: Cell, b: Cell, clearance: float = LOS_CLEARANCE) -> list:
    """Cells whose closed square lies strictly closer than ``clearance`` to segment a-b."""
    ax, ay = a
    bx, by = b
    return [
        c for c in _corridor_candidates(a, b, 0.5 + clearance)
        if _segment_box_distance(ax, ay, bx, by, c[0], c[1]) < clearance
    ]


def line_of_sight(m: GridMap, a: Cell, b: Cell, extra_blocked: Iterable[Cell] = frozenset()) -> bool:
    """True iff a radius-0.5 disk sweeping from center(a) to center(b) touches no blocked square.

    Squares outside the map count as blocked. Boundary contact is allowed.
    """
    ax, ay = a
    bx, by = b
    blocked = m.blocked
    W, H = m.width, m.height
    for c in _corridor_candidates(a, b, 0.5 + LOS_CLEARANCE):
        if c in blocked or c in extra_blocked or not (0 <= c[0] < W and 0 <= c[1] < H):
            if _segment_box_distance(ax, ay, bx, by, c[0], c[1]) < LOS_CLEARANCE:
                return False
    return True
