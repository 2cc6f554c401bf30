"""Problem instances, well-formedness certification, generation and agents CSV."""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple, Optional

import numpy as np
from scipy import ndimage

from .grid import Cell, GridMap, parse_map

AGENTS_HEADER = ["id", "start_x", "start_y", "goal_x", "goal_y"]
MAX_ATTEMPTS = 10_000


class MalformedInstanceError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


class Agent(NamedTuple):
    id: int
    start: Cell
    goal: Cell


@dataclass(frozen=True)
class Instance:
    """A map plus agents; list order is priority order (index 0 first)."""

    map: GridMap
    agents: tuple
    # endpoints of agents left out of this instance that must still be avoided
    reserved: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(Agent(a[0], tuple(a[1]), tuple(a[2])) for a in self.agents))
        object.__setattr__(self, "reserved", frozenset(tuple(c) for c in self.reserved))

    def __len__(self):
        return len(self.agents)

    def endpoints(self) -> set:
        return {c for a in self.agents for c in (a.start, a.goal)}

    def others_endpoints(self, i: int) -> frozenset:
        """Starts and goals of every agent except the i-th."""
        out = set(self.reserved)
        for j, a in enumerate(self.agents):
            if j != i:
                out.add(a.start)
                out.add(a.goal)
        return frozenset(out)

    def prefix(self, n: int) -> "Instance":
        """The first ``n`` agents; endpoints of the rest stay reserved."""
        dropped = {c for a in self.agents[n:] for c in (a.start, a.goal)}
        return Instance(self.map, self.agents[:n], self.reserved | dropped)


@dataclass
class WellFormedReport:
    ok: bool
    violators: list

    def __bool__(self):
        return self.ok


def _validate_endpoints(instance: Instance) -> None:
    seen = {}
    m = instance.map
    for a in instance.agents:
        for c in (a.start, a.goal):
            if not m.passable(c):
                raise MalformedInstanceError(f"agent {a.id}: endpoint {c} is blocked or out of bounds")
            if c in seen and not (seen[c] == a.id and a.start == a.goal):
                raise MalformedInstanceError(f"endpoint {c} shared by agents {seen[c]} and {a.id}")
            if c in instance.reserved:
                raise MalformedInstanceError(f"agent {a.id}: endpoint {c} is reserved")
            seen[c] = a.id


def check_well_formed(instance: Instance) -> WellFormedReport:
    """Every agent must reach its goal with all other endpoints treated as walls."""
    _validate_endpoints(instance)
    base = instance.map.occupancy
    free = ~base
    ends = [(a.start, a.goal) for a in instance.agents]
    cells = [c for e in ends for c in e] + sorted(instance.reserved)
    all_cols = np.array([c[0] for c in cells], dtype=int)
    all_rows = np.array([c[1] for c in cells], dtype=int)
    violators = []
    for i, a in enumerate(instance.agents):
        if a.start == a.goal:
            continue
        grid = free.copy()
        grid[all_rows, all_cols] = False
        grid[a.start[1], a.start[0]] = True
        grid[a.goal[1], a.goal[0]] = True
        labels, _ = ndimage.label(grid)
        if labels[a.start[1], a.start[0]] != labels[a.goal[1], a.goal[0]]:
            violators.append(a.id)
    return WellFormedReport(not violators, violators)


def generate_wfi_instance(
    m: GridMap, n: int, seed: int, endpoint_pool: Optional[Iterable[Cell]] = None
) -> Instance:
    """Rejection-sample ``n`` agents with distinct endpoints until the instance is well formed."""
    pool = sorted(set(endpoint_pool)) if endpoint_pool is not None else m.free_cells()
    pool = [tuple(c) for c in pool if m.passable(tuple(c))]
    if n < 0:
        raise ValueError("n must be nonnegative")
    if 2 * n > len(pool):
        raise GenerationError(f"cannot place {n} agents on {m.name or 'map'}: pool has only {len(pool)} cells")
    rng = random.Random(seed)
    for _ in range(MAX_ATTEMPTS):
        cells = rng.sample(pool, 2 * n)
        agents = [Agent(i, cells[i], cells[n + i]) for i in range(n)]
        inst = Instance(m, agents)
        if check_well_formed(inst).ok:
            return inst
    raise GenerationError(f"no well-formed instance with {n} agents on {m.name or 'map'} after {MAX_ATTEMPTS} attempts")


def write_agents(agents, dest=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGENTS_HEADER)
    for a in agents:
        w.writerow([a.id, a.start[0], a.start[1], a.goal[0], a.goal[1]])
    text = buf.getvalue()
    if dest is not None:
        Path(dest).write_text(text)
    return text


def read_agents(source) -> list:
    """Parse an agents CSV given as a path or as the file text itself."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).exists()):
        text = Path(source).read_text()
    else:
        text = source
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != AGENTS_HEADER:
        raise MalformedInstanceError(f"line 1: expected header {','.join(AGENTS_HEADER)}")
    agents = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != 5:
            raise MalformedInstanceError(f"line {lineno}: expected 5 fields, found {len(row)}")
        try:
            aid, sx, sy, gx, gy = (int(f.strip()) for f in row)
        except ValueError:
            raise MalformedInstanceError(f"line {lineno}: non-integer field in {row}") from None
        agents.append(Agent(aid, (sx, sy), (gx, gy)))
    return agents


def read_cells(source) -> list:
    """Endpoint pool file: CSV with header ``x,y``."""
    text = Path(source).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [h.strip() for h in rows[0]] != ["x", "y"]:
        raise MalformedInstanceError("line 1: expected header x,y")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            out.append((int(row[0]), int(row[1])))
        except (ValueError, IndexError):
            raise MalformedInstanceError(f"line {lineno}: bad cell {row}") from None
    return out


def write_cells(cells, dest) -> None:
    lines = ["x,y"] + [f"{c[0]},{c[1]}" for c in cells]
    Path(dest).write_text("\n".join(lines) + "\n")


# Warehouse layout: 70 columns x 46 rows.  Five columns of 10-cell racks,
# eight rack rows; every rack is two cells deep.  Aisles between rack rows
# are three cells wide and cross aisles three wide (four at the borders),
# so an endpoint on a rack face always borders a free middle lane.
WH_WIDTH, WH_HEIGHT = 70, 46
WH_RACK_LEN, WH_RACK_DEPTH = 10, 2
WH_RACK_COLS = tuple(4 + 13 * i for i in range(5))
WH_RACK_ROWS = tuple(4 + 5 * j for j in range(8))


def build_warehouse() -> tuple[GridMap, list]:
    blocked = set()
    pool = []
    for x0 in WH_RACK_COLS:
        for y0 in WH_RACK_ROWS:
            for x in range(x0, x0 + WH_RACK_LEN):
                for y in range(y0, y0 + WH_RACK_DEPTH):
                    blocked.add((x, y))
                pool.append((x, y0 - 1))
                pool.append((x, y0 + WH_RACK_DEPTH))
    return GridMap(WH_WIDTH, WH_HEIGHT, frozenset(blocked), "warehouse-46-70"), sorted(pool)


def _asset(name: str) -> str:
    return resources.files("waitrepair").joinpath("data", name).read_text()


def warehouse_map() -> GridMap:
    return parse_map(_asset("warehouse-46-70.map"), name="warehouse-46-70")


def warehouse_endpoint_pool() -> list:
    rows = list(csv.reader(io.StringIO(_asset("warehouse-46-70.endpoints.csv"))))[1:]
    return [(int(r[0]), int(r[1])) for r in rows if r]


def empty64_map() -> GridMap:
    return parse_map(_asset("empty-64-64.map"), name="empty-64-64")
