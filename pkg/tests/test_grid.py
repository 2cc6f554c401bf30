import random

import pytest
from hypothesis import given, strategies as st

from waitrepair.grid import (
    GridMap,
    MapFormatError,
    empty_map,
    line_of_sight,
    neighbors4,
    parse_map,
    serialize_map,
    swept_cells,
)
from waitrepair.instances import empty64_map, warehouse_map

from oracles import sampled_los


def test_parse_single_row():
    m = parse_map("type octile\nheight 1\nwidth 3\nmap\n.@.\n")
    assert (m.width, m.height) == (3, 1)
    assert m.blocked == {(1, 0)}


def test_parse_characters():
    m = parse_map("type octile\nheight 2\nwidth 3\nmap\n.GT\nO@.\n")
    assert m.blocked == {(2, 0), (0, 1), (1, 1)}


def test_empty_64():
    m = empty64_map()
    assert (m.width, m.height) == (64, 64)
    assert m.blocked == frozenset()


def test_warehouse_asset():
    m = warehouse_map()
    assert (m.width, m.height) == (70, 46)
    assert len(m.blocked) == 800


@pytest.mark.parametrize(
    "text, line",
    [
        ("type octile\nheight 2\nwidth 2\nmap\n..\n..\n..\n", 7),
        ("type octile\nheight 2\nwidth 2\nmap\n..\n", 6),
        ("type octile\nheight 2\nwidth 2\nmap\n..\n.x\n", 6),
        ("type octile\nheight 2\nwidth 3\nmap\n..\n...\n", 5),
        ("type octile\nheight two\nwidth 2\nmap\n..\n..\n", 4),
        ("type octile\nwidth 2\nmap\n..\n", 3),
        ("hello\n", 1),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(MapFormatError, match=rf"line {line}:"):
        parse_map(text)


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_roundtrip(w, h, seed):
    rng = random.Random(seed)
    blocked = frozenset((c, r) for c in range(w) for r in range(h) if rng.random() < 0.3)
    m = GridMap(w, h, blocked)
    back = parse_map(serialize_map(m))
    assert (back.width, back.height, back.blocked) == (w, h, blocked)


def test_neighbors():
    m = empty_map(3, 3)
    assert len(neighbors4(m, (1, 1))) == 4
    assert sorted(neighbors4(m, (0, 0))) == [(0, 1), (1, 0)]
    m2 = GridMap(3, 3, frozenset({(1, 0)}))
    assert neighbors4(m2, (0, 0)) == [(0, 1)]
    assert neighbors4(m, (0, 0), extra_blocked={(1, 0)}) == [(0, 1)]


def test_neighbor_order_up_left_down_right():
    assert neighbors4(empty_map(3, 3), (1, 1)) == [(1, 0), (0, 1), (1, 2), (2, 1)]


def test_los_empty_map():
    m = empty_map(10, 10)
    assert line_of_sight(m, (0, 0), (9, 7))
    assert line_of_sight(m, (3, 3), (3, 3))


def test_los_obstacle_on_line():
    m = GridMap(5, 5, frozenset({(1, 0)}))
    assert not line_of_sight(m, (0, 0), (2, 0))


def test_los_diagonal_clipping_matches_rasterization():
    m = GridMap(5, 5, frozenset({(1, 0)}))
    clear, gap = sampled_los(m, (0, 0), (2, 2))
    # the center line runs through the corner (0.5, 0.5) of the square of (1,0)
    assert not clear
    assert line_of_sight(m, (0, 0), (2, 2)) is clear


def test_los_extra_blocked():
    m = empty_map(5, 5)
    assert not line_of_sight(m, (0, 0), (4, 0), extra_blocked={(2, 0)})
    # adjacent lane: contact only at the boundary
    assert line_of_sight(m, (0, 0), (4, 0), extra_blocked={(2, 1)})


def test_swept_cells_horizontal():
    assert sorted(swept_cells((0, 0), (2, 0))) == [(0, 0), (1, 0), (2, 0)]


def random_map(rng, w, h, p):
    return GridMap(w, h, frozenset((c, r) for c in range(w) for r in range(h) if rng.random() < p))


def test_los_agrees_with_dense_sampling():
    rng = random.Random(7)
    checked = 0
    for _ in range(1000):
        m = random_map(rng, 10, 10, 0.15)
        free = m.free_cells()
        a, b = rng.choice(free), rng.choice(free)
        clear, gap = sampled_los(m, a, b)
        if abs(gap - 0.5) < 2e-3:
            continue
        assert line_of_sight(m, a, b) == clear, (a, b, sorted(m.blocked))
        checked += 1
    assert checked > 700


def test_los_symmetric():
    rng = random.Random(3)
    for _ in range(300):
        m = random_map(rng, 12, 12, 0.2)
        free = m.free_cells()
        a, b = rng.choice(free), rng.choice(free)
        assert line_of_sight(m, a, b) == line_of_sight(m, b, a)
