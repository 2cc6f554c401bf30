"""Continuous collision detection for constant-velocity disks."""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

INF = math.inf

# Collision is strict: squared distance must drop below R^2 - EPS_COL.
EPS_COL = 1e-9
# Planners test against a slightly tighter threshold so that times placed
# exactly on a computed root never register as a sliver in the validator.
EPS_PLAN = 5e-10


class Point2(NamedTuple):
    x: float
    y: float


class TimeInterval(NamedTuple):
    lo: float
    hi: float

    def contains(self, t: float) -> bool:
        return self.lo <= t <= self.hi

    @property
    def length(self) -> float:
        return self.hi - self.lo


class MotionSegment(NamedTuple):
    """Constant-velocity motion: position is ``origin + velocity * (t - t_start)``."""

    origin: Point2
    velocity: Point2
    t_start: float
    t_end: float

    def position(self, t: float) -> Point2:
        dt = t - self.t_start
        if dt == 0.0 or (self.velocity.x == 0.0 and self.velocity.y == 0.0):
            return self.origin
        return Point2(self.origin.x + self.velocity.x * dt, self.origin.y + self.velocity.y * dt)

    @property
    def end_point(self) -> Point2:
        if self.t_end == INF:
            return self.origin
        return self.position(self.t_end)

    @classmethod
    def wait(cls, p, t_start: float, t_end: float = INF) -> "MotionSegment":
        return cls(Point2(float(p[0]), float(p[1])), Point2(0.0, 0.0), t_start, t_end)

    @classmethod
    def move(cls, p, q, t_start: float, speed: float) -> "MotionSegment":
        dx, dy = q[0] - p[0], q[1] - p[1]
        dist = math.hypot(dx, dy)
        if dist == 0.0:
            return cls.wait(p, t_start, t_start)
        duration = dist / speed
        return cls(
            Point2(float(p[0]), float(p[1])),
            Point2(dx / duration, dy / duration),
            t_start,
            t_start + duration,
        )


def _window(a: MotionSegment, b: MotionSegment, R: float, eps: float):
    lo = max(a.t_start, b.t_start)
    hi = min(a.t_end, b.t_end)
    if lo > hi:
        return None
    (aox, aoy), (avx, avy), at0, _ = a
    (box, boy), (bvx, bvy), bt0, _ = b
    da = lo - at0
    db = lo - bt0
    wx = (box + bvx * db) - (aox + avx * da)
    wy = (boy + bvy * db) - (aoy + avy * da)
    vx = bvx - avx
    vy = bvy - avy
    c = wx * wx + wy * wy - (R * R - eps)
    A = vx * vx + vy * vy
    if A <= 1e-18:
        return (lo, hi) if c < 0.0 else None
    bh = wx * vx + wy * vy
    disc = bh * bh - A * c
    if disc <= 0.0:
        return None
    q = -(bh + math.copysign(math.sqrt(disc), bh))
    s1 = q / A
    s2 = c / q
    if s1 > s2:
        s1, s2 = s2, s1
    span = hi - lo
    if s2 <= 0.0 or s1 >= span:
        return None
    return lo + max(s1, 0.0), lo + min(s2, span)


def first_collision(a: MotionSegment, b: MotionSegment, R: float, eps: float = EPS_COL) -> Optional[float]:
    """Earliest time (infimum) at which the two disks overlap strictly, or None."""
    w = _window(a, b, R, eps)
    return None if w is None else w[0]


def collision_window(a: MotionSegment, b: MotionSegment, R: float, eps: float = EPS_COL) -> Optional[TimeInterval]:
    """Maximal open time interval of strict overlap inside the common time span."""
    w = _window(a, b, R, eps)
    return None if w is None else TimeInterval(*w)


def min_separation(a: MotionSegment, b: MotionSegment) -> Optional[float]:
    """Closest center distance over the common time span (None if disjoint in time)."""
    lo = max(a.t_start, b.t_start)
    hi = min(a.t_end, b.t_end)
    if lo > hi:
        return None
    pa, pb = a.position(lo), b.position(lo)
    wx, wy = pb.x - pa.x, pb.y - pa.y
    vx, vy = b.velocity.x - a.velocity.x, b.velocity.y - a.velocity.y
    A = vx * vx + vy * vy
    s = 0.0
    if A > 0.0:
        s = min(max(-(wx * vx + wy * vy) / A, 0.0), hi - lo)
    return math.hypot(wx + vx * s, wy + vy * s)


def collision_windows_batch(
    ao: np.ndarray, av: np.ndarray, at: np.ndarray,
    bo: np.ndarray, bv: np.ndarray, bt: np.ndarray,
    R: float, eps: float = EPS_COL,
):
    """Vectorised collision windows for paired segment arrays.

    ``*o`` and ``*v`` have shape (N, 2), ``*t`` has shape (N, 2) holding
    (t_start, t_end).  Returns ``(hit, lo, hi)`` arrays.
    """
    lo = np.maximum(at[:, 0], bt[:, 0])
    hi = np.minimum(at[:, 1], bt[:, 1])
    overlap = lo <= hi
    lo_f = np.where(overlap, lo, 0.0)
    pa = ao + av * (lo_f - at[:, 0])[:, None]
    pb = bo + bv * (lo_f - bt[:, 0])[:, None]
    w = pb - pa
    v = bv - av
    c = np.einsum("ij,ij->i", w, w) - (R * R - eps)
    A = np.einsum("ij,ij->i", v, v)
    bh = np.einsum("ij,ij->i", w, v)
    span = hi - lo
    still = A <= 1e-18
    disc = bh * bh - A * c
    moving = ~still & (disc > 0.0)
    s1 = np.full(lo.shape, np.inf)
    s2 = np.full(lo.shape, -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = -(bh + np.copysign(np.sqrt(np.where(moving, disc, 0.0)), bh))
        r1 = q / A
        r2 = c / q
    s1[moving] = np.minimum(r1, r2)[moving]
    s2[moving] = np.maximum(r1, r2)[moving]
    hit_static = still & (c < 0.0)
    s1[hit_static] = -np.inf
    s2[hit_static] = np.inf
    hit = overlap & (s2 > 0.0) & (s1 < span)
    w_lo = lo + np.maximum(s1, 0.0)
    w_hi = lo + np.minimum(s2, span)
    return hit, w_lo, w_hi
