"""Timed trajectories: waits at waypoints, constant speed between them,
parked at the goal forever after arrival."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .geometry import EPS_PLAN, INF, MotionSegment, Point2, _window
from .grid import Cell


class TimedWaypoint(NamedTuple):
    cell: Cell
    t_arrive: float
    t_depart: float

    @property
    def wait(self) -> float:
        return self.t_depart - self.t_arrive


@dataclass(frozen=True)
class Trajectory:
    agent_id: int
    points: tuple
    speed: float = 1.0

    @property
    def cells(self) -> tuple:
        return tuple(p.cell for p in self.points)

    @property
    def arrival_time(self) -> float:
        """Time the agent reaches its goal and parks."""
        return self.points[-1].t_arrive

    @property
    def start_time(self) -> float:
        return self.points[0].t_arrive

    @property
    def waits(self) -> list[float]:
        return [p.wait for p in self.points[:-1]]


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def trajectory_from_departures(
    path: Sequence[Cell], departures: Sequence[float], speed: float = 1.0, agent_id: int = 0, t_start: float = 0.0
) -> Trajectory:
    """Build a trajectory given the departure time from every waypoint but the last."""
    if len(departures) != len(path) - 1:
        raise ValueError("need one departure time per move")
    points = []
    t_arr = t_start
    for k, cell in enumerate(path[:-1]):
        dep = departures[k]
        if dep < t_arr:
            raise ValueError(f"departure {dep} before arrival {t_arr} at waypoint {k}")
        points.append(TimedWaypoint(tuple(cell), t_arr, dep))
        t_arr = dep + _dist(cell, path[k + 1]) / speed
    points.append(TimedWaypoint(tuple(path[-1]), t_arr, t_arr))
    return Trajectory(agent_id, tuple(points), speed)


def nominal_trajectory(path: Sequence[Cell], speed: float = 1.0, t0: float = 0.0, agent_id: int = 0) -> Trajectory:
    """Zero-wait timing of a path, leaving the first waypoint at ``t0``."""
    if speed <= 0:
        raise ValueError("speed must be positive")
    departures = []
    t = t0
    for k in range(len(path) - 1):
        departures.append(t)
        t += _dist(path[k], path[k + 1]) / speed
    return trajectory_from_departures(path, departures, speed, agent_id, t_start=t0)


def position_at(tr: Trajectory, t: float) -> Point2:
    pts = tr.points
    if t <= pts[0].t_depart:
        c = pts[0].cell
        return Point2(float(c[0]), float(c[1]))
    for k in range(len(pts) - 1):
        a, b = pts[k], pts[k + 1]
        if t <= a.t_depart:
            return Point2(float(a.cell[0]), float(a.cell[1]))
        if t < b.t_arrive:
            f = (t - a.t_depart) / (b.t_arrive - a.t_depart)
            return Point2(a.cell[0] + f * (b.cell[0] - a.cell[0]), a.cell[1] + f * (b.cell[1] - a.cell[1]))
    c = pts[-1].cell
    return Point2(float(c[0]), float(c[1]))


def segments_of(tr: Trajectory) -> list[MotionSegment]:
    segs = []
    pts = tr.points
    for k in range(len(pts) - 1):
        p = pts[k]
        if p.t_depart > p.t_arrive:
            segs.append(MotionSegment.wait(p.cell, p.t_arrive, p.t_depart))
        segs.append(MotionSegment.move(p.cell, pts[k + 1].cell, p.t_depart, tr.speed))
    segs.append(MotionSegment.wait(pts[-1].cell, pts[-1].t_arrive, INF))
    return segs


class SegmentIndex:
    """Spatial hash of the segments of a set of fixed trajectories.

    Each segment is registered in every tile its path comes within ``reach``
    of, so a query only has to look at the tiles its own path covers.
    """

    def __init__(self, reach: float = 1.0, tile: int = 2):
        self.reach = reach
        self.tile = tile
        self.tiles: dict = {}
        self.trajectories: list[Trajectory] = []
        self.latest_arrival = 0.0
        self.total_duration = 0.0

    @classmethod
    def build(cls, fixed: Iterable[Trajectory], reach: float = 1.0) -> "SegmentIndex":
        idx = cls(reach)
        for tr in fixed:
            idx.add(tr)
        return idx

    def _tiles_for(self, seg: MotionSegment, reach: float):
        p = seg.origin
        q = seg.end_point
        T = self.tile
        length = math.hypot(q.x - p.x, q.y - p.y)
        pieces = max(1, math.ceil(length / (T / 2)))
        keys = set()
        for i in range(pieces):
            f0, f1 = i / pieces, (i + 1) / pieces
            x0, x1 = p.x + f0 * (q.x - p.x), p.x + f1 * (q.x - p.x)
            y0, y1 = p.y + f0 * (q.y - p.y), p.y + f1 * (q.y - p.y)
            for tx in range(math.floor((min(x0, x1) - reach) / T), math.floor((max(x0, x1) + reach) / T) + 1):
                for ty in range(math.floor((min(y0, y1) - reach) / T), math.floor((max(y0, y1) + reach) / T) + 1):
                    keys.add((tx, ty))
        return keys

    def add(self, tr: Trajectory) -> None:
        self.trajectories.append(tr)
        self.latest_arrival = max(self.latest_arrival, tr.arrival_time)
        self.total_duration += tr.arrival_time
        for seg in segments_of(tr):
            entry = (seg, tr.agent_id)
            for key in self._tiles_for(seg, self.reach):
                self.tiles.setdefault(key, []).append(entry)

    def candidates(self, seg: MotionSegment):
        seen = set()
        t0, t1 = seg.t_start, seg.t_end
        for key in self._tiles_for(seg, 0.0):
            for entry in self.tiles.get(key, ()):
                s = entry[0]
                if s.t_start > t1 or s.t_end < t0:
                    continue
                k = id(s)
                if k in seen:
                    continue
                seen.add(k)
                yield entry

    def first_conflict(self, seg: MotionSegment, R: float, eps: float = EPS_PLAN) -> Optional[tuple]:
        best = None
        for other, aid in self.candidates(seg):
            w = _window(seg, other, R, eps)
            if w is not None and (best is None or w[0] < best[0]):
                best = (w[0], aid)
        return best

    def windows(self, seg: MotionSegment, R: float, eps: float = EPS_PLAN) -> list:
        out = []
        for other, _ in self.candidates(seg):
            w = _window(seg, other, R, eps)
            if w is not None:
                out.append(w)
        return out


def as_index(fixed, R: float) -> SegmentIndex:
    if isinstance(fixed, SegmentIndex):
        return fixed
    return SegmentIndex.build(fixed, reach=R)


def first_conflict(seg: MotionSegment, fixed, R: float, eps: float = EPS_PLAN) -> Optional[tuple]:
    """Earliest strict collision of ``seg`` with any fixed trajectory as ``(time, agent_id)``."""
    return as_index(fixed, R).first_conflict(seg, R, eps)
