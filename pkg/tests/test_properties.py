import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmseek.avoidance import DynamicConfig, repel_endpoints
from swarmseek.field import SignalField
from swarmseek.geometry import Polygon, Rect, inflate_polygon, point_in_polygon
from swarmseek.swarm import clamp_velocity, confine_position

ARENA = Rect(0, 0, 5000, 5000)
FIELD = SignalField(ARENA)

coord = st.floats(0, 5000, allow_nan=False)
vel = st.floats(-2000, 2000, allow_nan=False)


@st.composite
def star_polygons(draw):
    k = draw(st.integers(3, 8))
    cx, cy = draw(st.floats(-50, 50)), draw(st.floats(-50, 50))
    angles = sorted(set(draw(st.lists(st.floats(0, 2 * math.pi - 0.05), min_size=k, max_size=k))))
    if len(angles) < 3 or min(b - a for a, b in zip(angles, angles[1:])) < 0.05:
        angles = [2 * math.pi * i / k for i in range(k)]
    radii = draw(st.lists(st.floats(5, 30), min_size=len(angles), max_size=len(angles)))
    return Polygon([(cx + r * math.cos(a), cy + r * math.sin(a)) for a, r in zip(angles, radii)])


@settings(max_examples=80, deadline=None)
@given(star_polygons(), st.floats(0.5, 10))
def test_inflation_contains_original(poly, r):
    big = inflate_polygon(poly, r)
    assert big.area >= poly.area
    for v in poly.vertices:
        assert point_in_polygon(v, big)


@given(vel, vel, st.floats(1, 1000))
def test_clamp_never_exceeds_cap(vx, vy, vmax):
    cx, cy = clamp_velocity((vx, vy), vmax)
    assert math.hypot(cx, cy) <= vmax * (1 + 1e-12)
    if math.hypot(vx, vy) <= vmax:
        assert (cx, cy) == (vx, vy)
    else:
        # same direction: the cross product vanishes up to rounding
        assert cx * vy - cy * vx == pytest.approx(0.0, abs=1e-9 * (abs(vx) + abs(vy)) ** 2 + 1e-9)
        assert cx * vx + cy * vy > 0


@given(coord, coord, vel, vel)
def test_confined_position_stays_in_arena(x, y, vx, vy):
    p = confine_position((x, y), (vx, vy), ARENA)
    assert ARENA.contains(p)


@given(coord, coord)
def test_cost_is_negated_sample(x, y):
    assert FIELD.cost((x, y)) == -FIELD.sample((x, y))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(2000, 3000), st.floats(2000, 3000)), min_size=1, max_size=12),
       st.floats(10, 60))
def test_repel_postcondition(points, R):
    pts, ok = repel_endpoints(points, DynamicConfig(robot_radius=R), ARENA)
    if ok:
        for i, a in enumerate(pts):
            for b in pts[i + 1:]:
                assert math.dist(a, b) >= 2 * R - 1e-6
    assert all(ARENA.contains(p) for p in pts)
