"""Cardinal prioritized SIPP baseline (C-SIPP).

A* over (cell, safe interval) states.  The earliest departure from a state
is found by subtracting, in closed form, the set of departure times whose
unit move would collide with some fixed segment.
"""
from __future__ import annotations

import heapq
import math
import time
from typing import Iterable, NamedTuple, Optional

from .geometry import EPS_PLAN, INF, MotionSegment
from .grid import Cell, GridMap, neighbors4
from .instances import Instance
from .repair import TIME_TOL, PlanningError, RepairConfig, Solution
from .safe_intervals import complement
from .trajectory import SegmentIndex, Trajectory, as_index, trajectory_from_departures

# bad-departure windows closer than this are merged; an isolated free
# instant between them is not a usable departure
MERGE_TOL = 1e-12


class SippState(NamedTuple):
    cell: Cell
    interval: int
    arrival: float


def _roots(c0x, c0y, dx, dy, r2):
    """Roots of |c0 + lam * d|^2 = r2, sorted, or None if no real pair."""
    A = dx * dx + dy * dy
    if A <= 1e-18:
        return None
    bh = c0x * dx + c0y * dy
    c = c0x * c0x + c0y * c0y - r2
    disc = bh * bh - A * c
    if disc < 0.0:
        return None
    if disc == 0.0:
        r = -bh / A
        return r, r
    q = -(bh + math.copysign(math.sqrt(disc), bh))
    r1, r2_ = q / A, c / q
    return (r1, r2_) if r1 <= r2_ else (r2_, r1)


def blocked_departures(u, vel, d: float, f: MotionSegment, R: float, eps: float = EPS_PLAN):
    """Open interval of departure times for which a move from ``u`` with velocity
    ``vel`` lasting ``d`` strictly collides with segment ``f``; None if empty.

    In (departure tau, elapsed s) coordinates the colliding set is a convex
    region (quadratic sublevel set cut by a parallelogram), so its projection
    on tau is a single interval whose ends are found among a finite set of
    boundary candidates.
    """
    r2 = R * R - eps
    mx, my = vel
    (fox, foy), (ax, ay), t0, t1 = f
    px, py = fox - u[0], foy - u[1]
    # reject when the swept boxes are more than R apart
    if t1 != INF:
        fex, fey = px + ax * (t1 - t0), py + ay * (t1 - t0)
    else:
        fex, fey = px, py
    mex, mey = mx * d, my * d
    if (min(px, fex) >= max(0.0, mex) + R or max(px, fex) <= min(0.0, mex) - R
            or min(py, fey) >= max(0.0, mey) + R or max(py, fey) <= min(0.0, mey) - R):
        return None

    if ax == 0.0 and ay == 0.0:
        # static f: find the elapsed-time window, then slide it over f's span
        roots = _roots(px, py, -mx, -my, r2)
        if roots is None:
            return None
        s1, s2 = roots
        if s1 == s2 or s2 <= 0.0 or s1 >= d:
            return None
        s1, s2 = max(s1, 0.0), min(s2, d)
        return t0 - s2, t1 - s1

    L = t1 - t0
    bx, by = ax - mx, ay - my

    def w(tau, s):
        return px + ax * tau + bx * s, py + ay * tau + by * s

    B = bx * bx + by * by
    if B <= 1e-18:
        roots = _roots(px, py, ax, ay, r2)
        if roots is None or roots[0] == roots[1]:
            return None
        lo, hi = max(roots[0], -d), min(roots[1], L)
        if lo >= hi and not (lo == hi and d == 0.0):
            return None
        return t0 + lo, t0 + hi

    verts = ((0.0, 0.0), (L, 0.0), (L - d, d), (-d, d))
    cands = []
    for i in range(4):
        p, q = verts[i], verts[(i + 1) % 4]
        wpx, wpy = w(*p)
        if wpx * wpx + wpy * wpy <= r2:
            cands.append(p[0])
        wqx, wqy = w(*q)
        roots = _roots(wpx, wpy, wqx - wpx, wqy - wpy, r2)
        if roots is not None:
            for lam in roots:
                if 0.0 <= lam <= 1.0:
                    cands.append(p[0] + lam * (q[0] - p[0]))

    # tangency with the tau-direction: d/ds |w|^2 = 0
    nb = math.sqrt(B)
    ex, ey = -by / nb, bx / nb
    ea = ex * ax + ey * ay
    if abs(ea) > 1e-15:
        ep = ex * px + ey * py
        rr = math.sqrt(r2)
        for sign in (1.0, -1.0):
            tau = (sign * rr - ep) / ea
            s = -(bx * (px + ax * tau) + by * (py + ay * tau)) / B
            if -1e-12 <= s <= d + 1e-12 and -1e-12 <= tau + s <= L + 1e-12:
                cands.append(tau)
    if not cands:
        return None
    lo, hi = min(cands), max(cands)
    if hi - lo <= 1e-15:
        return None
    return t0 + lo, t0 + hi


def _merge(intervals):
    out = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1] + MERGE_TOL:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def _earliest_free(bad, lo: float, hi: float) -> Optional[float]:
    """Smallest tau in [lo, hi] outside every open interval in ``bad`` (merged, sorted)."""
    tau = lo
    for bl, bh in bad:
        if bh <= tau:
            continue
        if bl >= tau:
            break
        tau = bh
    return tau if tau <= hi else None


def sipp_plan(
    m: GridMap,
    start: Cell,
    goal: Cell,
    extra_blocked: Iterable[Cell],
    fixed,
    cfg: RepairConfig = RepairConfig(),
    agent_id: int = 0,
) -> Optional[Trajectory]:
    """Time-optimal cardinal trajectory with waits, or None if the goal is unreachable."""
    start, goal = tuple(start), tuple(goal)
    R = cfg.R
    speed = cfg.speed
    d = 1.0 / speed
    index = as_index(fixed, R)
    si_cache: dict = {}
    bad_cache: dict = {}

    def safe(c):
        si = si_cache.get(c)
        if si is None:
            si = si_cache[c] = complement(index.windows(MotionSegment.wait(c, 0.0, INF), R))
        return si

    def bad(u, v):
        key = (u, v)
        out = bad_cache.get(key)
        if out is None:
            vel = ((v[0] - u[0]) * speed, (v[1] - u[1]) * speed)
            wins = []
            for f, _ in _corridor(index, u, v):
                wdw = blocked_departures(u, vel, d, f, R)
                if wdw is not None:
                    wins.append(wdw)
            out = bad_cache[key] = _merge(wins)
        return out

    si0 = safe(start)
    i0 = si0.locate(0.0)
    if i0 is None:
        return None
    gx, gy = goal

    def h(c):
        return (abs(c[0] - gx) + abs(c[1] - gy)) / speed

    best = {(start, i0): 0.0}
    parent = {(start, i0): None}
    closed = set()
    # ties on f: fewer waits, then later arrival (deeper node), then cell
    open_ = [(h(start), 0, -0.0, start, i0)]
    while open_:
        _, waits, neg_g, u, iu = heapq.heappop(open_)
        g = -neg_g
        key = (u, iu)
        if key in closed:
            continue
        closed.add(key)
        si_u = safe(u)
        if u == goal and si_u[iu].hi == INF:
            return _reconstruct(parent, key, best, speed, agent_id)
        t_hi = si_u[iu].hi
        for v in neighbors4(m, u, extra_blocked):
            si_v = safe(v)
            bad_uv = None
            for jv, iv in enumerate(si_v):
                if (v, jv) in closed:
                    continue
                lo = max(g, iv.lo - d)
                hi = min(t_hi, iv.hi - d)
                if lo > hi + TIME_TOL:
                    continue
                if bad_uv is None:
                    bad_uv = bad(u, v)
                tau = _earliest_free(bad_uv, lo, hi + TIME_TOL)
                if tau is None:
                    continue
                arrival = tau + d
                if arrival < best.get((v, jv), INF):
                    best[(v, jv)] = arrival
                    parent[(v, jv)] = (key, tau)
                    w = waits + (1 if tau > g + 1e-12 else 0)
                    heapq.heappush(open_, (arrival + h(v), w, -arrival, v, jv))
    return None


def _corridor(index: SegmentIndex, u, v):
    """Fixed segments whose path passes within reach of the move u -> v, at any time."""
    seg = MotionSegment.move(u, v, 0.0, 1.0)
    seen = set()
    for key in index._tiles_for(seg, 0.0):
        for entry in index.tiles.get(key, ()):
            k = id(entry[0])
            if k not in seen:
                seen.add(k)
                yield entry


def _reconstruct(parent, key, best, speed, agent_id) -> Trajectory:
    cells, deps = [key[0]], []
    while parent[key] is not None:
        prev, tau = parent[key]
        cells.append(prev[0])
        deps.append(tau)
        key = prev
    cells.reverse()
    deps.reverse()
    return trajectory_from_departures(cells, deps, speed, agent_id)


def sipp_plan_all(instance: Instance, cfg: RepairConfig = RepairConfig()) -> Solution:
    t_begin = time.perf_counter()
    index = SegmentIndex(reach=cfg.R)
    trajectories, paths = [], []
    for i, a in enumerate(instance.agents):
        tr = sipp_plan(instance.map, a.start, a.goal, instance.others_endpoints(i), index, cfg, agent_id=a.id)
        if tr is None:
            raise PlanningError(f"agent {a.id}: SIPP found no trajectory from {a.start} to {a.goal}")
        index.add(tr)
        trajectories.append(tr)
        paths.append(tr.cells)
    return Solution(trajectories, "c-sipp", time.perf_counter() - t_begin, paths)
