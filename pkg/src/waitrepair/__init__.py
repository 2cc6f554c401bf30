"""Prioritized multi-agent path finding by wait-only repair of egocentric paths."""
from .geometry import MotionSegment, Point2, TimeInterval, collision_window, first_collision
from .grid import GridMap, empty_map, line_of_sight, load_map, neighbors4, parse_map, serialize_map
from .instances import (
    Agent,
    Instance,
    check_well_formed,
    empty64_map,
    generate_wfi_instance,
    read_agents,
    warehouse_endpoint_pool,
    warehouse_map,
    write_agents,
)
from .planners import astar_cardinal, path_length, thetastar_anyangle
from .repair import PlanningError, RepairConfig, RepairError, Solution, naive_schedule, plan_all, repair_path
from .safe_intervals import SafeIntervalList, safe_intervals_for
from .sipp import sipp_plan, sipp_plan_all
from .trajectory import Trajectory, TimedWaypoint, first_conflict, nominal_trajectory, position_at, segments_of
from .bench import lower_bounds, run_benchmark, validate_solution

__version__ = "0.1.0"
