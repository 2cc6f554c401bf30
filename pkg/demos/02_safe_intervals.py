"""
Safe intervals of a cell
========================

A cell is safe at time t when a disk parked on it would not overlap any
moving agent.  Agents park at their goal forever, so a goal cell is never
safe again once its owner arrives.
"""
from waitrepair import nominal_trajectory, safe_intervals_for

A = nominal_trajectory([(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)])

print("(2,2), passed through:", safe_intervals_for((2, 2), [A], 1.0))
print("(4,2), A's goal:     ", safe_intervals_for((4, 2), [A], 1.0))
print("(2,1), touched only: ", safe_intervals_for((2, 1), [A], 1.0))

si = safe_intervals_for((2, 2), [A], 1.0)
for t in (0.5, 2.0, 3.0):
    print(f"t={t}: interval {si.locate(t)}, next safe start {si.next_safe_start(t)}")
