import random

import pytest
from hypothesis import given, settings, strategies as st

from waitrepair.grid import GridMap, empty_map
from waitrepair.instances import (
    Agent,
    GenerationError,
    Instance,
    MalformedInstanceError,
    build_warehouse,
    check_well_formed,
    empty64_map,
    generate_wfi_instance,
    read_agents,
    warehouse_endpoint_pool,
    warehouse_map,
    write_agents,
)

from oracles import bfs_distance


def test_single_agent_connected():
    assert check_well_formed(Instance(empty_map(5, 5), [Agent(0, (0, 0), (4, 4))])).ok


def test_corridor_is_not_well_formed():
    inst = Instance(empty_map(5, 1), [Agent(0, (0, 0), (4, 0)), Agent(1, (2, 0), (3, 0))])
    report = check_well_formed(inst)
    assert not report.ok
    assert report.violators == [0]


def test_duplicate_endpoints_rejected():
    inst = Instance(empty_map(5, 5), [Agent(0, (0, 0), (4, 4)), Agent(1, (4, 4), (1, 1))])
    with pytest.raises(MalformedInstanceError):
        check_well_formed(inst)


def test_blocked_endpoint_rejected():
    inst = Instance(GridMap(3, 3, frozenset({(1, 1)})), [Agent(0, (1, 1), (0, 0))])
    with pytest.raises(MalformedInstanceError):
        check_well_formed(inst)


def _wfi_by_bfs(inst):
    bad = []
    for i, a in enumerate(inst.agents):
        if bfs_distance(inst.map, a.start, a.goal, inst.others_endpoints(i)) is None:
            bad.append(a.id)
    return bad


def test_check_matches_bfs_oracle():
    rng = random.Random(3)
    for _ in range(300):
        w, h = rng.randint(2, 8), rng.randint(1, 8)
        m = GridMap(w, h, frozenset((c, r) for c in range(w) for r in range(h) if rng.random() < 0.2))
        free = m.free_cells()
        k = rng.randint(1, max(1, len(free) // 2))
        if len(free) < 2 * k:
            continue
        cells = rng.sample(free, 2 * k)
        inst = Instance(m, [Agent(i, cells[i], cells[k + i]) for i in range(k)])
        assert check_well_formed(inst).violators == _wfi_by_bfs(inst)


def test_order_invariance():
    rng = random.Random(4)
    for _ in range(100):
        m = GridMap(6, 6, frozenset((c, r) for c in range(6) for r in range(6) if rng.random() < 0.2))
        free = m.free_cells()
        k = 4
        if len(free) < 2 * k:
            continue
        cells = rng.sample(free, 2 * k)
        agents = [Agent(i, cells[i], cells[k + i]) for i in range(k)]
        ok = check_well_formed(Instance(m, agents))
        rng.shuffle(agents)
        ok2 = check_well_formed(Instance(m, agents))
        assert ok.ok == ok2.ok and sorted(ok.violators) == sorted(ok2.violators)


def test_generation_deterministic_and_well_formed():
    m = empty64_map()
    a = generate_wfi_instance(m, 50, 123)
    b = generate_wfi_instance(m, 50, 123)
    assert a == b
    assert check_well_formed(a).ok
    assert len(a.endpoints()) == 100
    assert generate_wfi_instance(m, 50, 124) != a
    assert len(generate_wfi_instance(m, 1, 9).agents) == 1


def test_generation_pool_too_small():
    with pytest.raises(GenerationError):
        generate_wfi_instance(empty_map(3, 3), 5, 0)


def test_generation_gives_up():
    # plus-shaped map; the hub is always drawn, so whoever does not own it is cut off
    plus = GridMap(3, 3, frozenset({(0, 0), (2, 0), (0, 2), (2, 2)}))
    with pytest.raises(GenerationError, match="2 agents"):
        generate_wfi_instance(plus, 2, 0, endpoint_pool=[(1, 1), (1, 0), (0, 1), (2, 1)])


def test_warehouse_instances_are_well_formed():
    m, pool = warehouse_map(), warehouse_endpoint_pool()
    built, built_pool = build_warehouse()
    assert built.blocked == m.blocked and built_pool == pool
    assert len(pool) == 800
    assert all(m.passable(c) for c in pool)
    for seed in range(5):
        inst = generate_wfi_instance(m, 100, seed, pool)
        assert check_well_formed(inst).ok
    # the whole pool at once: every rack-face endpoint borders a free middle lane
    agents = [Agent(i, pool[2 * i], pool[2 * i + 1]) for i in range(len(pool) // 2)]
    assert check_well_formed(Instance(m, agents)).ok


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50), st.integers(-50, 50)), max_size=20))
def test_agents_csv_roundtrip(rows):
    agents = [Agent(i * 3, (r[0], r[1]), (r[2], r[3])) for i, r in enumerate(rows)]
    assert read_agents(write_agents(agents)) == agents


def test_agents_csv_file_roundtrip(tmp_path):
    agents = [Agent(0, (1, 2), (3, 4)), Agent(5, (6, 7), (8, 9))]
    write_agents(agents, tmp_path / "a.csv")
    assert read_agents(tmp_path / "a.csv") == agents
    assert read_agents(str(tmp_path / "a.csv")) == agents


def test_agents_csv_header_only():
    assert read_agents("id,start_x,start_y,goal_x,goal_y\n") == []


@pytest.mark.parametrize(
    "text, line",
    [
        ("id,start_x,start_y,goal_x,goal_y\n0,1,2,3,4\n1,1.5,2,3,4\n", 3),
        ("id,start_x,start_y,goal_x,goal_y\n0,1,2,3\n", 2),
        ("id,x,y\n", 1),
    ],
)
def test_agents_csv_errors(text, line):
    with pytest.raises(MalformedInstanceError, match=rf"line {line}:"):
        read_agents(text)


def test_prefix_keeps_dropped_endpoints_reserved():
    inst = Instance(empty_map(5, 5), [Agent(0, (0, 0), (4, 0)), Agent(1, (2, 2), (3, 3))])
    sub = inst.prefix(1)
    assert sub.agents == inst.agents[:1]
    assert sub.others_endpoints(0) == {(2, 2), (3, 3)}
