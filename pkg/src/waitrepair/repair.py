"""Wait-only repair of egocentric paths and the prioritized loop around it.

Each agent's path is planned in the static map (other agents' endpoints
treated as walls) and then only its timing is changed: waits are grown in
steps of ``delta`` at the waypoint preceding a conflicting move, and when a
wait would overrun the safe interval of its cell, the required arrival time
is pushed back to the previous waypoint, possibly all the way to the start.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .geometry import INF, MotionSegment
from .grid import Cell
from .instances import Instance
from .planners import astar_cardinal, path_length, thetastar_anyangle
from .safe_intervals import SafeIntervalList, complement
from .trajectory import SegmentIndex, Trajectory, as_index, nominal_trajectory, trajectory_from_departures

MODES = ("c-repair", "aa-repair")

# slack for interval membership of times that were themselves derived from
# interval endpoints; well inside the planner/validator collision margin
TIME_TOL = 5e-11


class PlanningError(RuntimeError):
    """No egocentric path exists (the instance is not well formed)."""


class RepairError(RuntimeError):
    """A path could not be made conflict-free by waiting (the input is not well formed)."""


@dataclass(frozen=True)
class RepairConfig:
    delta: float = 0.1
    radius: float = 0.5
    speed: float = 1.0
    # absolute-time cap on departures; None derives it from the fixed set
    max_wait_horizon: Optional[float] = None
    # bound on backward propagation steps for a single path
    max_iterations: int = 1_000_000

    def __post_init__(self):
        for name in ("delta", "radius", "speed"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def R(self) -> float:
        return 2.0 * self.radius


@dataclass
class Solution:
    trajectories: list
    algorithm: str
    runtime: float = 0.0  # seconds of wall clock spent planning
    paths: list = field(default_factory=list)

    @property
    def flowtime(self) -> float:
        return sum(tr.arrival_time for tr in self.trajectories)

    @property
    def makespan(self) -> float:
        return max((tr.arrival_time for tr in self.trajectories), default=0.0)


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def repair_path(
    path: Sequence[Cell], fixed, cfg: RepairConfig = RepairConfig(), agent_id: int = 0, t0: float = 0.0
) -> Trajectory:
    """Time ``path`` so that it is strictly collision-free against ``fixed``.

    ``fixed`` is a list of trajectories or a prebuilt :class:`SegmentIndex`.
    The waypoint sequence is never changed; only waits at waypoints are added.
    """
    path = [tuple(c) for c in path]
    R = cfg.R
    index = as_index(fixed, R)
    speed, delta = cfg.speed, cfg.delta
    m = len(path) - 1
    durs = [_dist(path[k], path[k + 1]) / speed for k in range(m)]
    horizon = cfg.max_wait_horizon
    if horizon is None:
        horizon = t0 + index.total_duration + sum(durs) + 10.0

    si_cache: dict = {}

    def safe(k) -> SafeIntervalList:
        si = si_cache.get(k)
        if si is None:
            probe = MotionSegment.wait(path[k], 0.0, INF)
            si = si_cache[k] = complement(index.windows(probe, R))
        return si

    arr = [0.0] * (m + 1)
    dep = [0.0] * m
    floor = [-INF] * m  # earliest admissible departure imposed by later waypoints
    arr[0] = t0
    k = 0
    for _ in range(cfg.max_iterations):
        if k == m:
            park = MotionSegment.wait(path[m], arr[m], INF)
            if index.first_conflict(park, R) is None:
                break
            si = safe(m)
            if not si.unbounded or m == 0:
                raise RepairError(f"agent {agent_id}: goal {path[m]} is occupied forever by a fixed agent")
            t_req = si[len(si) - 1].lo
            floor[m - 1] = max(floor[m - 1], t_req - durs[m - 1])
            k = m - 1
            continue

        start = max(arr[k], floor[k])
        a, b = path[k], path[k + 1]
        j = 0
        while True:
            t_leave = start + j * delta
            if t_leave > horizon:
                raise RepairError(
                    f"agent {agent_id}: move {a}->{b} still conflicts at t={t_leave:.3f} "
                    f"beyond horizon {horizon:.3f}; instance is not well formed"
                )
            if index.first_conflict(MotionSegment.move(a, b, t_leave, speed), R) is None:
                break
            j += 1

        if t_leave > arr[k]:
            si = safe(k)
            i_arr = si.locate(arr[k], TIME_TOL)
            i_leave = si.locate(t_leave, TIME_TOL)
            if i_arr is None or i_arr != i_leave:
                if k == 0:
                    raise RepairError(f"agent {agent_id}: cannot wait at start {a}; a fixed agent passes through it")
                # arrive later: at t_leave itself, or at the next safe interval after it
                t_req = t_leave if i_leave is not None else si.next_safe_start(t_leave)
                if t_req is None:
                    raise RepairError(f"agent {agent_id}: cell {a} is never free after t={t_leave:.3f}")
                floor[k - 1] = max(floor[k - 1], t_req - durs[k - 1])
                k -= 1
                continue

        dep[k] = t_leave
        arr[k + 1] = t_leave + durs[k]
        k += 1
    else:
        raise RepairError(f"agent {agent_id}: repair did not converge")

    return trajectory_from_departures(path, dep, speed, agent_id, t_start=t0)


def plan_path(instance: Instance, i: int, mode: str = "c-repair"):
    a = instance.agents[i]
    extra = instance.others_endpoints(i)
    if mode == "c-repair":
        path = astar_cardinal(instance.map, a.start, a.goal, extra)
    elif mode == "aa-repair":
        path = thetastar_anyangle(instance.map, a.start, a.goal, extra)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if path is None:
        raise PlanningError(f"agent {a.id}: no path from {a.start} to {a.goal} with other endpoints blocked")
    return path


def plan_all(instance: Instance, mode: str = "c-repair", cfg: RepairConfig = RepairConfig()) -> Solution:
    """Prioritized C-Repair / AA-Repair over the whole instance."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    t_begin = time.perf_counter()
    index = SegmentIndex(reach=cfg.R)
    trajectories, paths = [], []
    for i, a in enumerate(instance.agents):
        path = plan_path(instance, i, mode)
        tr = repair_path(path, index, cfg, agent_id=a.id)
        index.add(tr)
        trajectories.append(tr)
        paths.append(path)
    return Solution(trajectories, mode, time.perf_counter() - t_begin, paths)


def naive_schedule(instance: Instance, cfg: RepairConfig = RepairConfig(), mode: str = "c-repair") -> Solution:
    """Sequential release: agent k waits at its start until all earlier agents are done."""
    t_begin = time.perf_counter()
    trajectories, paths = [], []
    released = 0.0
    for i, a in enumerate(instance.agents):
        path = plan_path(instance, i, mode)
        if len(path) > 1:
            shifted = nominal_trajectory(path, cfg.speed, t0=released, agent_id=a.id)
            tr = trajectory_from_departures(path, [p.t_depart for p in shifted.points[:-1]], cfg.speed, a.id)
        else:
            tr = nominal_trajectory(path, cfg.speed, agent_id=a.id)
        released += path_length(path) / cfg.speed
        trajectories.append(tr)
        paths.append(path)
    return Solution(trajectories, "naive", time.perf_counter() - t_begin, paths)
