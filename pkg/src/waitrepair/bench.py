"""Lower bounds, exact solution validation, benchmark sweeps and serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, field, fields
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .geometry import EPS_COL, collision_windows_batch
from .grid import GridMap, load_map
from .instances import Instance, generate_wfi_instance
from .planners import astar_cardinal, path_length
from .repair import PlanningError, RepairConfig, RepairError, Solution, naive_schedule, plan_all
from .sipp import sipp_plan_all
from .trajectory import TimedWaypoint, Trajectory

ALGORITHMS = ("c-repair", "aa-repair", "c-sipp", "naive")


class ValidationFailure(RuntimeError):
    """A planner returned a solution that does not validate (a bug, never acceptable)."""


def solve(instance: Instance, algo: str, cfg: RepairConfig = RepairConfig()) -> Solution:
    if algo in ("c-repair", "aa-repair"):
        return plan_all(instance, algo, cfg)
    if algo == "c-sipp":
        return sipp_plan_all(instance, cfg)
    if algo == "naive":
        return naive_schedule(instance, cfg)
    raise ValueError(f"unknown algorithm {algo!r}; expected one of {ALGORITHMS}")


def lower_bounds(instance: Instance, speed: float = 1.0) -> tuple[float, float]:
    """(flowtime, makespan) of independent cardinal shortest paths on the bare map."""
    lengths = []
    for a in instance.agents:
        p = astar_cardinal(instance.map, a.start, a.goal)
        if p is None:
            raise PlanningError(f"agent {a.id}: goal unreachable even on the bare map")
        lengths.append(path_length(p) / speed)
    return sum(lengths), max(lengths, default=0.0)


# --- validation -----------------------------------------------------------


class Conflict(NamedTuple):
    agent_a: int
    agent_b: int
    t_lo: float
    t_hi: float


@dataclass
class ValidationReport:
    conflicts: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.conflicts and not self.errors

    def first_conflict_time(self) -> Optional[float]:
        return min((c.t_lo for c in self.conflicts), default=None)

    def summary(self) -> str:
        if self.ok:
            return "valid: no conflicts"
        lines = [f"{len(self.conflicts)} conflict(s), {len(self.errors)} structural error(s)"]
        lines += [f"  agents {c.agent_a} & {c.agent_b} collide during ({c.t_lo:.6f}, {c.t_hi:.6f})" for c in self.conflicts[:20]]
        lines += [f"  {e}" for e in self.errors[:20]]
        return "\n".join(lines)


def _raw_segments(tr: Trajectory):
    """Segments built directly from the recorded times (independent of the planners' helpers)."""
    out = []
    pts = tr.points
    for k in range(len(pts) - 1):
        p, q = pts[k], pts[k + 1]
        if p.t_depart > p.t_arrive:
            out.append((p.cell, (0.0, 0.0), p.t_arrive, p.t_depart))
        dt = q.t_arrive - p.t_depart
        if dt > 0:
            v = ((q.cell[0] - p.cell[0]) / dt, (q.cell[1] - p.cell[1]) / dt)
        else:
            v = (0.0, 0.0)
        out.append((p.cell, v, p.t_depart, q.t_arrive))
    out.append((pts[-1].cell, (0.0, 0.0), pts[-1].t_arrive, math.inf))
    return out


def _structure_errors(instance: Instance, sol: Solution, speed: Optional[float]) -> list:
    errs = []
    if len(sol.trajectories) != len(instance.agents):
        return [f"expected {len(instance.agents)} trajectories, got {len(sol.trajectories)}"]
    for a, tr in zip(instance.agents, sol.trajectories):
        pts = tr.points
        if not pts:
            errs.append(f"agent {a.id}: empty trajectory")
            continue
        if tuple(pts[0].cell) != a.start:
            errs.append(f"agent {a.id}: starts at {pts[0].cell}, expected {a.start}")
        if tuple(pts[-1].cell) != a.goal:
            errs.append(f"agent {a.id}: ends at {pts[-1].cell}, expected goal {a.goal}")
        if abs(pts[0].t_arrive) > 1e-12:
            errs.append(f"agent {a.id}: trajectory begins at t={pts[0].t_arrive}, expected 0")
        vmax = speed if speed is not None else tr.speed
        for k, p in enumerate(pts):
            if p.t_depart < p.t_arrive - 1e-12:
                errs.append(f"agent {a.id}: departs waypoint {k} before arriving")
            if k + 1 < len(pts):
                q = pts[k + 1]
                dist = math.hypot(q.cell[0] - p.cell[0], q.cell[1] - p.cell[1])
                if dist == 0:
                    errs.append(f"agent {a.id}: repeated waypoint {p.cell} at index {k}")
                if q.t_arrive - p.t_depart < dist / vmax - 1e-9:
                    errs.append(f"agent {a.id}: move {k} exceeds speed {vmax}")
    return errs


def validate_solution(
    instance: Instance, sol: Solution, R: float, speed: Optional[float] = None, eps: float = EPS_COL
) -> ValidationReport:
    """Exhaustive pairwise check of every segment pair, waits and parking included."""
    report = ValidationReport(errors=_structure_errors(instance, sol, speed))
    segs = []
    for tr in sol.trajectories:
        for cell, v, t0, t1 in _raw_segments(tr):
            segs.append((cell[0], cell[1], v[0], v[1], t0, t1, tr.agent_id))
    if not segs:
        return report
    S = np.array(segs, dtype=float)
    O, V, T, A = S[:, 0:2], S[:, 2:4], S[:, 4:6], S[:, 6].astype(int)
    # swept bounding boxes for a cheap prefilter
    end = O + V * np.where(np.isfinite(T[:, 1:2]), T[:, 1:2] - T[:, 0:1], 0.0)
    lo_xy = np.minimum(O, end) - R
    hi_xy = np.maximum(O, end) + R
    order = list(dict.fromkeys(A.tolist()))
    rank = {aid: i for i, aid in enumerate(order)}
    R_ = np.array([rank[a] for a in A])
    for ai, aid in enumerate(order):
        mine = np.nonzero(R_ == ai)[0]
        others = np.nonzero(R_ > ai)[0]
        if len(mine) == 0 or len(others) == 0:
            continue
        i, j = np.meshgrid(mine, others, indexing="ij")
        i, j = i.ravel(), j.ravel()
        keep = (
            (np.maximum(T[i, 0], T[j, 0]) <= np.minimum(T[i, 1], T[j, 1]))
            & (lo_xy[i, 0] <= hi_xy[j, 0] - R) & (lo_xy[j, 0] <= hi_xy[i, 0] - R)
            & (lo_xy[i, 1] <= hi_xy[j, 1] - R) & (lo_xy[j, 1] <= hi_xy[i, 1] - R)
        )
        i, j = i[keep], j[keep]
        if len(i) == 0:
            continue
        hit, wlo, whi = collision_windows_batch(O[i], V[i], T[i], O[j], V[j], T[j], R, eps)
        for k in np.nonzero(hit)[0]:
            report.conflicts.append(Conflict(int(A[i[k]]), int(A[j[k]]), float(wlo[k]), float(whi[k])))
    report.conflicts.sort(key=lambda c: (c.t_lo, c.agent_a, c.agent_b))
    return report


# --- serialization ---------------------------------------------------------


def solution_to_dict(sol: Solution) -> dict:
    return {
        "algorithm": sol.algorithm,
        "runtime_ms": sol.runtime * 1000.0,
        "agents": [
            {
                "id": tr.agent_id,
                "speed": tr.speed,
                "points": [
                    {"x": p.cell[0], "y": p.cell[1], "t_arrive": p.t_arrive, "t_depart": p.t_depart}
                    for p in tr.points
                ],
            }
            for tr in sol.trajectories
        ],
    }


def solution_from_dict(data: dict) -> Solution:
    trs = []
    for ag in data["agents"]:
        pts = tuple(
            TimedWaypoint((int(p["x"]), int(p["y"])), float(p["t_arrive"]), float(p["t_depart"])) for p in ag["points"]
        )
        trs.append(Trajectory(int(ag["id"]), pts, float(ag.get("speed", 1.0))))
    return Solution(trs, data.get("algorithm", ""), float(data.get("runtime_ms", 0.0)) / 1000.0, [t.cells for t in trs])


def save_solution(sol: Solution, path) -> None:
    # json writes floats with repr, i.e. 17 significant digits
    Path(path).write_text(json.dumps(solution_to_dict(sol), indent=1))


def load_solution(path) -> Solution:
    return solution_from_dict(json.loads(Path(path).read_text()))


# --- benchmark ---------------------------------------------------------------


@dataclass
class MetricsRow:
    map: str
    algorithm: str
    n_agents: int
    instance: int
    success: bool
    runtime_ms: Optional[float] = None
    flowtime: Optional[float] = None
    makespan: Optional[float] = None
    norm_flowtime: Optional[float] = None
    norm_makespan: Optional[float] = None


CSV_COLUMNS = [f.name for f in fields(MetricsRow)]


def _ratio(x: float, lb: float) -> float:
    if lb == 0:
        return 1.0 if x == 0 else math.inf
    return x / lb


def instance_seed(seed: int, n: int, instance_id: int) -> int:
    return int(np.random.SeedSequence([seed, n, instance_id]).generate_state(1)[0])


def evaluate(instance: Instance, algo: str, cfg: RepairConfig, map_name: str, instance_id: int) -> MetricsRow:
    """Plan, validate and score one instance with one algorithm."""
    n = len(instance.agents)
    try:
        sol = solve(instance, algo, cfg)
    except (PlanningError, RepairError):
        return MetricsRow(map_name, algo, n, instance_id, False)
    report = validate_solution(instance, sol, cfg.R, cfg.speed)
    if not report.ok:
        raise ValidationFailure(f"{algo} on {map_name} n={n} instance {instance_id}:\n{report.summary()}")
    lb_flow, lb_make = lower_bounds(instance, cfg.speed)
    return MetricsRow(
        map_name, algo, n, instance_id, True,
        sol.runtime * 1000.0, sol.flowtime, sol.makespan,
        _ratio(sol.flowtime, lb_flow), _ratio(sol.makespan, lb_make),
    )


def _run_point(args):
    m, pool, algos, n, i, seed, cfg = args
    inst = generate_wfi_instance(m, n, instance_seed(seed, n, i), pool)
    return [evaluate(inst, algo, cfg, m.name, i) for algo in algos]


def run_benchmark(
    m,
    algos: Sequence[str],
    n_agents: Iterable[int],
    instances: int,
    seed: int = 0,
    delta: float = 0.1,
    radius: float = 0.5,
    speed: float = 1.0,
    endpoint_pool=None,
    csv_path=None,
    workers: int = 1,
) -> list:
    """Sweep (algorithm x agent count x instance) and return one MetricsRow each.

    The same generated instance is shared by every algorithm at a given
    (n, instance id).  ``m`` is a GridMap or a path to a ``.map`` file.
    """
    if not isinstance(m, GridMap):
        m = load_map(m)
    for a in algos:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}; expected one of {ALGORITHMS}")
    cfg = RepairConfig(delta=delta, radius=radius, speed=speed)
    tasks = [(m, endpoint_pool, tuple(algos), n, i, seed, cfg) for n in n_agents for i in range(instances)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers) as ex:
            batches = list(ex.map(_run_point, tasks))
    else:
        batches = [_run_point(t) for t in tasks]
    rows = [r for b in batches for r in b]
    algo_rank = {a: k for k, a in enumerate(algos)}
    rows.sort(key=lambda r: (algo_rank[r.algorithm], r.n_agents, r.instance))
    if csv_path is not None:
        write_metrics_csv(rows, csv_path)
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def metrics_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in astuple(r)])
    return buf.getvalue()


def write_metrics_csv(rows, path) -> None:
    Path(path).write_text(metrics_csv(rows))


def read_metrics_csv(path) -> list:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            def num(k):
                return float(rec[k]) if rec[k] != "" else None

            rows.append(MetricsRow(
                rec["map"], rec["algorithm"], int(rec["n_agents"]), int(rec["instance"]), rec["success"] == "true",
                num("runtime_ms"), num("flowtime"), num("makespan"), num("norm_flowtime"), num("norm_makespan"),
            ))
    return rows


def summarize(rows) -> list:
    """Per (map, algorithm, n) means over successful rows, for plotting elsewhere."""
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.map, r.algorithm, r.n_agents), []).append(r)
    out = []
    for (mp, algo, n), rs in groups.items():
        ok = [r for r in rs if r.success]

        def mean(attr):
            return statistics.fmean(getattr(r, attr) for r in ok) if ok else None

        out.append({
            "map": mp, "algorithm": algo, "n_agents": n,
            "instances": len(rs), "success_rate": len(ok) / len(rs),
            "mean_runtime_ms": mean("runtime_ms"),
            "median_runtime_ms": statistics.median(r.runtime_ms for r in ok) if ok else None,
            "mean_flowtime": mean("flowtime"), "mean_makespan": mean("makespan"),
            "mean_norm_flowtime": mean("norm_flowtime"), "mean_norm_makespan": mean("norm_makespan"),
        })
    return out


def summary_csv(summary) -> str:
    if not summary:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(summary[0]), lineterminator="\n")
    w.writeheader()
    for rec in summary:
        w.writerow({k: _fmt(v) for k, v in rec.items()})
    return buf.getvalue()
