"""
Repairing a path by waiting
===========================

B's shortest path crosses A's.  Repair keeps B's cells and only adds waits;
SIPP may pick any timing; the naive schedule lets B start after A is done.
"""
from waitrepair import Agent, Instance, RepairConfig, empty_map, naive_schedule, plan_all, sipp_plan_all, validate_solution

inst = Instance(empty_map(5, 5), [Agent(0, (0, 2), (4, 2)), Agent(1, (2, 0), (2, 4))])
cfg = RepairConfig(delta=0.1, radius=0.5)

for name, sol in [
    ("c-repair", plan_all(inst, "c-repair", cfg)),
    ("c-sipp", sipp_plan_all(inst, cfg)),
    ("naive", naive_schedule(inst, cfg)),
]:
    b = sol.trajectories[1]
    waits = [(p.cell, round(p.wait, 6)) for p in b.points if p.wait > 0]
    ok = validate_solution(inst, sol, cfg.R).ok
    print(f"{name:9s} flowtime {sol.flowtime:7.4f}  makespan {sol.makespan:7.4f}  B waits {waits}  valid {ok}")
