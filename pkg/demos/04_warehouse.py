"""
A warehouse instance
====================

Endpoints sit on rack faces, so an agent parked on one never blocks an
aisle.  Every algorithm solves the same instance and every answer is checked
by the validator.
"""
from waitrepair import (
    generate_wfi_instance,
    lower_bounds,
    validate_solution,
    warehouse_endpoint_pool,
    warehouse_map,
)
from waitrepair.bench import solve
from waitrepair.grid import serialize_map

m = warehouse_map()
print("\n".join(serialize_map(m).splitlines()[4:14]))  # top of the map
print("...")

inst = generate_wfi_instance(m, 100, seed=7, endpoint_pool=warehouse_endpoint_pool())
lb_flow, lb_make = lower_bounds(inst)
print(f"100 agents, lower bounds: flowtime {lb_flow:.0f}, makespan {lb_make:.0f}")

for algo in ("c-repair", "aa-repair", "c-sipp", "naive"):
    sol = solve(inst, algo)
    report = validate_solution(inst, sol, 1.0)
    print(f"{algo:9s} {sol.runtime * 1000:8.1f} ms  flowtime x{sol.flowtime / lb_flow:5.2f}  "
          f"makespan x{sol.makespan / lb_make:5.2f}  {report.summary()}")
