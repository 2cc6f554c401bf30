"""Acceptance criteria, one test each.  Every test records a PASS/FAIL line,
repeated in the terminal summary (see conftest.py).

The slow sweeps share their results through module-scoped fixtures.
"""
import math
import random
import statistics
import time

import numpy as np
import pytest

from waitrepair.bench import instance_seed, run_benchmark, solve, validate_solution
from waitrepair.geometry import INF, MotionSegment, Point2, first_collision
from waitrepair.grid import GridMap, empty_map
from waitrepair.instances import (
    Agent,
    Instance,
    empty64_map,
    generate_wfi_instance,
    warehouse_endpoint_pool,
    warehouse_map,
)
from waitrepair.repair import RepairConfig, naive_schedule, plan_all, plan_path
from waitrepair.safe_intervals import locate, safe_intervals_for
from waitrepair.sipp import sipp_plan_all
from waitrepair.trajectory import nominal_trajectory, trajectory_from_departures

from oracles import (
    min_grid_wait_arrival,
    optimal_arrival,
    sampled_cell_safety,
    sampled_first_collision,
    sampled_min_separation,
)

SEED = 1
CFG = RepairConfig(delta=0.1, radius=0.5, speed=1.0)
ALGOS = ("c-repair", "aa-repair", "c-sipp", "naive")

VERDICTS = []


def verdict(num, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def points(tr):
    return [(p.cell, p.t_arrive, p.t_depart) for p in tr.points]


# --- shared data -----------------------------------------------------------


@pytest.fixture(scope="module")
def completeness_run():
    """100 instances, 50 agents, empty 64x64; every algorithm, every solution validated."""
    m = empty64_map()
    out = []
    t_begin = time.perf_counter()
    for i in range(100):
        inst = generate_wfi_instance(m, 50, instance_seed(SEED, 50, i))
        rec = {"instance": inst, "solutions": {}, "reports": {}, "errors": {}}
        for algo in ALGOS:
            try:
                sol = solve(inst, algo, CFG)
            except Exception as exc:  # recorded as a failure below
                rec["errors"][algo] = repr(exc)
                continue
            rec["solutions"][algo] = sol
            rec["reports"][algo] = validate_solution(inst, sol, CFG.R, CFG.speed)
        out.append(rec)
    return out, time.perf_counter() - t_begin


@pytest.fixture(scope="module")
def sweep_rows():
    return run_benchmark(empty64_map(), ["c-repair", "c-sipp"], [50, 100, 150], 25, seed=SEED, delta=CFG.delta,
                         radius=CFG.radius, speed=CFG.speed)


# --- 1 -----------------------------------------------------------------------


def test_criterion_1_completeness(completeness_run):
    runs, elapsed = completeness_run
    lines = []
    ok = True
    for algo in ALGOS:
        solved = sum(algo in r["solutions"] for r in runs)
        valid = sum(algo in r["reports"] and r["reports"][algo].ok for r in runs)
        ok &= solved == valid == len(runs)
        lines.append(f"{algo} {solved}/{len(runs)} solved, {valid} valid")
    verdict(1, ok, "; ".join(lines) + f" ({elapsed:.0f} s incl. validation)")


# --- 2 -----------------------------------------------------------------------


def test_criterion_2_spatial_preservation(completeness_run):
    runs, _ = completeness_run
    checked = mismatched = 0
    for r in runs:
        inst = r["instance"]
        for algo, mode in (("c-repair", "c-repair"), ("aa-repair", "aa-repair"), ("naive", "c-repair")):
            sol = r["solutions"].get(algo)
            if sol is None:
                mismatched += 1
                continue
            for i, tr in enumerate(sol.trajectories):
                checked += 1
                if tuple(tr.cells) != tuple(plan_path(inst, i, mode)):
                    mismatched += 1
    verdict(2, mismatched == 0 and checked > 0, f"{checked} trajectories checked, {mismatched} differ from their egocentric path")


# --- 3 -----------------------------------------------------------------------


def _random_segment(rng, parked_ok):
    t0 = rng.uniform(0, 3)
    o = Point2(rng.uniform(-2, 2), rng.uniform(-2, 2))
    if parked_ok and rng.random() < 0.1:
        return MotionSegment.wait(o, t0, INF)
    if rng.random() < 0.2:
        v = Point2(0.0, 0.0)
    else:
        v = Point2(rng.uniform(-2, 2), rng.uniform(-2, 2))
    return MotionSegment(o, v, t0, t0 + rng.uniform(0, 5))


def test_criterion_3_ccd_oracle():
    rng = random.Random(SEED)
    dt = 1e-3
    t_begin = time.perf_counter()
    disagree = excused = collide = 0
    for _ in range(10_000):
        a = _random_segment(rng, False)
        b = _random_segment(rng, True)
        R = rng.uniform(0.3, 2.0)
        cap = a.t_end if b.t_end == INF else None
        analytic = first_collision(a, b, R)
        sampled = sampled_first_collision(a, b, R, dt=dt, t_cap=cap)
        agree = (analytic is None) == (sampled is None)
        if agree and analytic is not None:
            collide += 1
            agree = abs(analytic - sampled) <= dt + 1e-9
        if not agree:
            sep = sampled_min_separation(a, b, dt=dt / 10, t_cap=cap)
            if abs(sep - R) < 1e-3:
                excused += 1
            else:
                disagree += 1
    elapsed = time.perf_counter() - t_begin
    verdict(3, disagree == 0, f"10000 pairs ({collide} colliding), {disagree} disagreements, "
                              f"{excused} inside the tangency band; {elapsed:.1f} s")


# --- 4 -----------------------------------------------------------------------


def _random_fixed(rng, count):
    trajs = []
    for k in range(count):
        path = [(rng.randint(0, 6), rng.randint(0, 6))]
        for _ in range(rng.randint(1, 6)):
            dx, dy = rng.choice([(1, 0), (-1, 0), (0, 1), (0, -1)])
            path.append((path[-1][0] + dx, path[-1][1] + dy))
        deps, t = [], rng.uniform(0, 3)
        for _ in range(len(path) - 1):
            t += rng.choice([0.0, 0.0, rng.uniform(0, 1.5)])
            deps.append(t)
            t += 1.0
        trajs.append(trajectory_from_departures(path, deps, agent_id=k))
    return trajs


def test_criterion_4_safe_interval_oracle():
    rng = random.Random(SEED)
    dt = 1e-3
    t_begin = time.perf_counter()
    bad_cases = 0
    samples = 0
    for _ in range(1000):
        fixed = _random_fixed(rng, rng.randint(0, 4))
        cell = (rng.randint(0, 6), rng.randint(0, 6))
        R = rng.choice([0.5, 1.0, 1.5])
        si = safe_intervals_for(cell, fixed, R)
        horizon = max([tr.arrival_time for tr in fixed] + [0.0]) + 2.0
        ts = np.arange(0.0, horizon, dt)
        truth = sampled_cell_safety(cell, [points(tr) for tr in fixed], R, ts)
        computed = np.array([locate(si, t) is not None for t in ts])
        edges = [iv.lo for iv in si] + [iv.hi for iv in si if iv.hi != INF]
        near = np.zeros(len(ts), dtype=bool)
        for e in edges:
            near |= np.abs(ts - e) < dt
        samples += int((~near).sum())
        if not (truth == computed)[~near].all():
            bad_cases += 1
    elapsed = time.perf_counter() - t_begin
    verdict(4, bad_cases == 0, f"1000 cases, {samples} samples outside endpoint bands, "
                               f"{bad_cases} cases misclassified; {elapsed:.1f} s")


# --- 5 -----------------------------------------------------------------------


def test_criterion_5_crossing_exactness():
    a_path = [(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)]
    b_path = [(2, 0), (2, 1), (2, 2), (2, 3), (2, 4)]
    A = nominal_trajectory(a_path)
    steps, placements = min_grid_wait_arrival(b_path, [points(A)], CFG.delta, CFG.R, max_steps=20)
    inst = Instance(empty_map(5, 5), [Agent(0, (0, 2), (4, 2)), Agent(1, (2, 0), (2, 4))])
    sol = plan_all(inst, "c-repair", CFG)
    B = sol.trajectories[1]
    waits = [(p.cell, p.wait) for p in B.points[:-1] if p.wait > 0]
    ok = (
        steps == 15
        and (0, 15, 0, 0) in placements
        and len(waits) == 1
        and waits[0][0] == (2, 1)
        and abs(waits[0][1] - 1.5) <= 1e-9
        and abs(sol.flowtime - 9.5) <= 1e-9
        and abs(sol.makespan - 5.5) <= 1e-9
        and validate_solution(inst, sol, CFG.R).ok
    )
    verdict(5, ok, f"oracle minimum wait {steps} x delta; repair waits {waits}, "
                   f"flowtime {sol.flowtime:.12g}, makespan {sol.makespan:.12g}")


# --- 6 -----------------------------------------------------------------------


def _by(rows, algo, n):
    return sorted((r for r in rows if r.algorithm == algo and r.n_agents == n), key=lambda r: r.instance)


def test_criterion_6_runtime_trend(sweep_rows):
    parts, ok = [], True
    for n in (50, 100, 150):
        rep, sipp = _by(sweep_rows, "c-repair", n), _by(sweep_rows, "c-sipp", n)
        ok &= all(r.success for r in rep + sipp)
        mr = statistics.median(r.runtime_ms for r in rep)
        ms = statistics.median(r.runtime_ms for r in sipp)
        ok &= mr <= 0.5 * ms
        parts.append(f"n={n}: {mr:.0f} ms vs {ms:.0f} ms (x{ms / mr:.1f})")
    verdict(6, ok, "median C-Repair vs C-SIPP planning time; " + ", ".join(parts))


# --- 7 -----------------------------------------------------------------------


def test_criterion_7_cost_band(sweep_rows):
    parts, ok, all_ratios = [], True, []
    for n in (50, 100, 150):
        rep, sipp = _by(sweep_rows, "c-repair", n), _by(sweep_rows, "c-sipp", n)
        ratios = [a.flowtime / b.flowtime for a, b in zip(rep, sipp)]
        all_ratios += ratios
        mean = statistics.fmean(ratios)
        ok &= mean >= 1.0
        parts.append(f"n={n}: {mean:.3f}")
    overall = statistics.fmean(all_ratios)
    ok &= 1.05 <= overall <= 3.5

    wh_rows = run_benchmark(warehouse_map(), ["c-repair"], [50, 100, 150, 200], 25, seed=SEED,
                            endpoint_pool=warehouse_endpoint_pool())
    wh = []
    for n in (50, 100, 150, 200):
        rs = _by(wh_rows, "c-repair", n)
        ok &= all(r.success for r in rs)
        wh.append(statistics.fmean(r.norm_flowtime for r in rs))
    ok &= all(b >= a for a, b in zip(wh, wh[1:]))
    verdict(7, ok, f"mean flowtime ratio C-Repair/C-SIPP {overall:.3f} ({', '.join(parts)}); "
                   f"warehouse norm_flowtime by n=50..200: {', '.join(f'{x:.3f}' for x in wh)}")


# --- 8 -----------------------------------------------------------------------


def test_criterion_8_naive_domination(completeness_run):
    runs, _ = completeness_run
    valid = all("naive" in r["reports"] and r["reports"]["naive"].ok for r in runs)
    rep = [r["solutions"]["c-repair"].flowtime for r in runs]
    naive = [r["solutions"]["naive"].flowtime for r in runs]
    wins = sum(a < b for a, b in zip(rep, naive))
    ok = valid and statistics.fmean(rep) < statistics.fmean(naive) and wins >= 0.95 * len(runs)
    verdict(8, ok, f"naive always valid: {valid}; mean flowtime {statistics.fmean(rep):.1f} vs "
                   f"{statistics.fmean(naive):.1f}; C-Repair better on {wins}/{len(runs)}")


# --- 9 -----------------------------------------------------------------------


def _small_instances(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        size = rng.randint(4, 8)
        m = GridMap(size, size, frozenset((c, r) for c in range(size) for r in range(size) if rng.random() < 0.15))
        k = rng.randint(2, 3)
        if len(m.free_cells()) < 2 * k + 2:
            continue
        try:
            out.append(generate_wfi_instance(m, k, rng.randrange(10**6)))
        except Exception:
            continue
    return out


def test_criterion_9_sipp_optimality():
    worst, compared, waited = 0.0, 0, 0
    for inst in _small_instances(50, SEED):
        sol = sipp_plan_all(inst, CFG)
        for i, a in enumerate(inst.agents):
            tr = sol.trajectories[i]
            fixed = [points(t) for t in sol.trajectories[:i]]
            expected = optimal_arrival(inst.map, a.start, a.goal, inst.others_endpoints(i), fixed, CFG.R)
            got = tr.arrival_time
            worst = max(worst, math.inf if expected is None else abs(got - expected))
            compared += 1
            waited += any(w > 0 for w in tr.waits)
    verdict(9, worst <= 1e-6, f"{compared} agents on 50 instances ({waited} with waits); "
                              f"largest arrival-time gap {worst:.2e}")


# --- 10 ----------------------------------------------------------------------


def test_criterion_10_prefix_stability():
    cases = []
    for i in range(10):
        cases.append(generate_wfi_instance(empty_map(24, 24, "empty-24-24"), 30, instance_seed(SEED, 30, i)))
    wm, pool = warehouse_map(), warehouse_endpoint_pool()
    for i in range(10):
        cases.append(generate_wfi_instance(wm, 30, instance_seed(SEED, 30, i), pool))
    planners = {
        "c-repair": lambda inst: plan_all(inst, "c-repair", CFG),
        "aa-repair": lambda inst: plan_all(inst, "aa-repair", CFG),
        "c-sipp": lambda inst: sipp_plan_all(inst, CFG),
        "naive": lambda inst: naive_schedule(inst, CFG),
    }
    diffs, checks = 0, 0
    for inst in cases:
        for name, plan in planners.items():
            full = plan(inst).trajectories
            for i in range(1, len(inst) + 1):
                checks += 1
                if plan(inst.prefix(i)).trajectories != full[:i]:
                    diffs += 1
    verdict(10, diffs == 0, f"20 instances x 30 agents x {len(planners)} planners: {checks} prefixes, {diffs} differ")
