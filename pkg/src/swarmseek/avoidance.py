"""
Obstacle handling for seekers of finite size.

Static obstacles are handled either by a random step whose length is the
obstacle diameter, or by a Bug-1 style circumnavigation that returns to the
best-measured boundary point.  Seekers are then kept apart at their
endpoints by a repulsive force loop and moved one at a time along
visibility-graph paths that treat the others as square obstacles.

All collision checks run in configuration space: obstacles are inflated by
the seeker half-width ``R`` and a seeker is a point that may touch, but not
enter, an inflated obstacle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import GoalInsideObstacle, InvalidConfig, NoPath, StartInsideObstacle
from .geometry import (
    EPS,
    PlannedPath,
    Point,
    Polygon,
    Rect,
    _boundary_params,
    _classify,
    _edge_hits,
    _point_segment_distance,
    clip_ray_to_rect,
    closest_boundary_point,
    dist,
    inflate_polygon,
    plan_path,
    StaticVisibility,
    point_strictly_inside,
    polygon_diameter,
    polygons_overlap,
    segment_crosses_interior,
    square,
)

log = logging.getLogger(__name__)

RANDOM_STEP = "random_step"
BUG1 = "bug1"
STRATEGIES = (RANDOM_STEP, BUG1)

RANDOM_STEP_RETRIES = 100
COINCIDENT_OFFSET = 1e-3
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class DynamicConfig:
    robot_radius: float = 60.0
    force_scale: float = 0.5
    max_force_iterations: int = 200

    def __post_init__(self):
        if self.robot_radius <= 0:
            raise InvalidConfig("robot_radius must be > 0")
        if not 0 < self.force_scale <= 1:
            raise InvalidConfig("force_scale must lie in (0, 1]")
        if self.max_force_iterations < 1:
            raise InvalidConfig("max_force_iterations must be >= 1")


@dataclass(frozen=True, eq=False)
class Obstacle:
    shape: Polygon
    diameter: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "diameter", polygon_diameter(self.shape))

    @classmethod
    def from_coords(cls, coords) -> "Obstacle":
        return cls(Polygon(coords))


class World:
    """Static obstacles in an arena, plus the avoidance settings."""

    def __init__(self, obstacles: Sequence[Obstacle | Polygon], arena: Rect,
                 static_strategy: str = RANDOM_STEP, dynamic: DynamicConfig | None = None):
        if static_strategy not in STRATEGIES:
            raise InvalidConfig(f"unknown static strategy {static_strategy!r}; use one of {STRATEGIES}")
        self.obstacles = tuple(o if isinstance(o, Obstacle) else Obstacle(o) for o in obstacles)
        self.arena = arena
        self.static_strategy = static_strategy
        self.dynamic = dynamic or DynamicConfig()
        for j, ob in enumerate(self.obstacles):
            if not all(arena.contains(v) for v in ob.shape.vertices):
                raise InvalidConfig(f"obstacle {j} extends outside the arena")
        r = self.dynamic.robot_radius
        # configuration-space obstacles used by every collision test
        self.clearance = tuple(inflate_polygon(ob.shape, r) for ob in self.obstacles)
        self.visibility = StaticVisibility(self.clearance)

    def __repr__(self):
        return (f"World({len(self.obstacles)} obstacles, strategy={self.static_strategy!r}, "
                f"R={self.dynamic.robot_radius})")

    def warnings(self) -> list:
        out = []
        for i in range(len(self.obstacles)):
            for j in range(i + 1, len(self.obstacles)):
                if polygons_overlap(self.obstacles[i].shape, self.obstacles[j].shape):
                    out.append(f"obstacles {i} and {j} overlap")
        a = self.arena
        for j, q in enumerate(self.clearance):
            x0, y0, x1, y1 = q.bbox
            if x0 < a.xmin or y0 < a.ymin or x1 > a.xmax or y1 > a.ymax:
                out.append(f"inflated obstacle {j} reaches past the arena wall")
        return out

    def is_free(self, p: Sequence[float]) -> bool:
        return not any(point_strictly_inside(p, q) for q in self.clearance)


def check_static_collision(x_from: Sequence[float], x_to: Sequence[float], world: World) -> Optional[int]:
    """Index of the first obstacle the step ``x_from -> x_to`` runs into, else None."""
    for j, q in enumerate(world.clearance):
        if point_strictly_inside(x_to, q) or segment_crosses_interior(x_from, x_to, q):
            return j
    return None


def strategy_random_step(x: Sequence[float], obstacle_index: int, world: World, rng,
                         max_retries: int = RANDOM_STEP_RETRIES) -> Point:
    """Random-direction step whose length is the blocking obstacle's diameter.

    The proposal is confined to the arena before it is tested.  After
    ``max_retries`` rejected draws the seeker stays where it is.
    """
    d = world.obstacles[obstacle_index].diameter
    for _ in range(max_retries):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        cand = clip_ray_to_rect(x, (d * math.cos(theta), d * math.sin(theta)), world.arena)
        if check_static_collision(x, cand, world) is None:
            return cand
    log.debug("random step gave up after %d draws at %s", max_retries, tuple(x))
    return Point(*x)


@dataclass(frozen=True)
class BugTraversal:
    contact_point: Point
    boundary_samples: tuple  # ((Point, cost), ...) in walking order
    best_point: Point
    return_path: PlannedPath
    perimeter: float
    approach_length: float

    @property
    def traveled(self) -> float:
        return self.approach_length + self.perimeter + self.return_path.length

    @property
    def final(self) -> Point:
        return self.best_point


def _contact(x, intended, q: Polygon):
    """First point of segment x->intended on the boundary of q, and its edge index."""
    edges = q.edges()
    if _classify(x, q) >= 0:
        # already touching (or, defensively, inside): use the nearest boundary point
        c = closest_boundary_point(x, q)
        return c, min(range(len(edges)), key=lambda e: _point_segment_distance(c, *edges[e]))
    best_t, best_edge = math.inf, None
    for e, (p0, p1) in enumerate(edges):
        for t in _edge_hits(x, intended, p0, p1):
            if t < best_t:
                best_t, best_edge = t, e
    if best_edge is None:
        c = closest_boundary_point(intended, q)
        return c, min(range(len(edges)), key=lambda e: _point_segment_distance(c, *edges[e]))
    ax, ay = x
    return Point(ax + best_t * (intended[0] - ax), ay + best_t * (intended[1] - ay)), best_edge


def bug1_traverse(x: Sequence[float], intended: Sequence[float], obstacle_index: int,
                  world: World, field, spacing: float) -> BugTraversal:
    """Circumnavigate an inflated obstacle and stop at its best-signal point.

    The seeker walks from ``x`` to where its step first meets the inflated
    boundary, goes once around counterclockwise measuring the field at every
    vertex and every ``spacing`` millimetres along each edge, then returns to
    the lowest-cost sample along the shorter of the two boundary arcs.
    """
    q = world.clearance[obstacle_index]
    contact, e = _contact(x, intended, q)
    vs = q.vertices
    m = len(vs)
    walk = [contact] + [vs[(e + 1 + i) % m] for i in range(m)] + [contact]
    walk = [p for i, p in enumerate(walk) if i == 0 or dist(p, walk[i - 1]) > EPS]
    if len(walk) == 1:
        walk.append(walk[0])

    samples = []
    arc = []  # arc length from the contact point for each sample
    s = 0.0
    for a, b in zip(walk, walk[1:]):
        length = dist(a, b)
        k = 0
        while k * spacing < length - EPS or k == 0:
            f = k * spacing / length if length > 0 else 0.0
            p = Point(a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]))
            if world.arena.contains(p):
                samples.append((p, field.cost(world.arena.clamp(p))))
                arc.append(s + k * spacing)
            k += 1
        s += length
    perimeter = s

    if samples:
        ib = min(range(len(samples)), key=lambda i: samples[i][1])
        best, s_best = samples[ib][0], arc[ib]
    else:
        best, s_best = contact, 0.0

    # arcs from the contact point, forward (ccw) or backward
    if s_best <= perimeter - s_best:
        pts = [contact]
        acc = 0.0
        for a, b in zip(walk, walk[1:]):
            seg = dist(a, b)
            if acc + seg >= s_best - EPS:
                break
            pts.append(b)
            acc += seg
    else:
        back = list(reversed(walk))
        pts = [contact]
        acc = 0.0
        target = perimeter - s_best
        for a, b in zip(back, back[1:]):
            seg = dist(a, b)
            if acc + seg >= target - EPS:
                break
            pts.append(b)
            acc += seg
    if dist(pts[-1], best) > 0:
        pts.append(best)
    return BugTraversal(
        contact_point=contact,
        boundary_samples=tuple(samples),
        best_point=best,
        return_path=PlannedPath.through(pts),
        perimeter=perimeter,
        approach_length=dist(x, contact),
    )


def seeker_rectangle(center: Sequence[float], R: float) -> Polygon:
    """Axis-aligned square footprint of half-width ``R``."""
    if R <= 0:
        raise ValueError("R must be > 0")
    return square(center, R)


def _ray_exit(p, u, q: Polygon):
    """First boundary point of q along direction u from p, beyond which q is left."""
    far = (p[0] + u[0] * 1e7, p[1] + u[1] * 1e7)
    ts = sorted(set(_boundary_params(p, far, q)))
    for t in ts:
        if t <= 0:
            continue
        s = t * 1e7
        probe = (p[0] + u[0] * (s + 10 * EPS), p[1] + u[1] * (s + 10 * EPS))
        if _classify(probe, q) != 1:
            return Point(p[0] + u[0] * s, p[1] + u[1] * s)
    return closest_boundary_point(p, q)


def _push_out(p: Point, force, obstacles, arena: Rect) -> Point:
    for _ in range(2 * len(obstacles) + 1):
        hit = next((q for q in obstacles if point_strictly_inside(p, q)), None)
        if hit is None:
            return p
        fx, fy = force
        norm = math.hypot(fx, fy)
        if norm <= EPS:
            c = closest_boundary_point(p, hit)
            fx, fy = c[0] - p[0], c[1] - p[1]
            norm = math.hypot(fx, fy)
            if norm <= EPS:
                return c
        p = _ray_exit(p, (fx / norm, fy / norm), hit)
        if not arena.contains(p):
            p = arena.clamp(p)
            if point_strictly_inside(p, hit):
                p = closest_boundary_point(p, hit)
    return p


def _min_pair_distance(pts) -> float:
    n = len(pts)
    best = math.inf
    for i in range(n):
        xi, yi = pts[i]
        for j in range(i + 1, n):
            d = math.hypot(xi - pts[j][0], yi - pts[j][1])
            if d < best:
                best = d
    return best


def repel_endpoints(endpoints: Sequence[Sequence[float]], dyn: DynamicConfig, arena: Rect,
                    obstacles: Sequence[Polygon] = ()) -> tuple:
    """Push endpoints apart until every pair is at least ``2R`` apart.

    Each sweep computes all pairwise forces ``d (2R - |d|) / |d|`` from the
    current positions and then moves every endpoint by ``t`` times its net
    force.  Endpoints are re-confined to the arena and pushed out of any
    (already inflated) obstacle along their force direction after every
    sweep.  Returns ``(points, separated)``; ``separated`` is False when the
    sweep cap was hit first.
    """
    two_r = 2.0 * dyn.robot_radius
    t = dyn.force_scale
    pts = [Point(*p) for p in endpoints]
    n = len(pts)
    limit = two_r - 1e-9
    sweeps = 0
    while n > 1 and _min_pair_distance(pts) < limit:
        if sweeps >= dyn.max_force_iterations:
            return pts, False
        sweeps += 1
        for k in range(n):
            for j in range(k):
                if dist(pts[k], pts[j]) < 1e-9:
                    ang = _GOLDEN_ANGLE * (k + 1)
                    pts[k] = Point(pts[k][0] + COINCIDENT_OFFSET * math.cos(ang),
                                   pts[k][1] + COINCIDENT_OFFSET * math.sin(ang))
        forces = []
        for k in range(n):
            xk, yk = pts[k]
            fx = fy = 0.0
            for j in range(n):
                if j == k:
                    continue
                dx, dy = xk - pts[j][0], yk - pts[j][1]
                d = math.hypot(dx, dy)
                if d < two_r:
                    s = (two_r - d) / d
                    fx += dx * s
                    fy += dy * s
            forces.append((fx, fy))
        moved = []
        for (x, y), (fx, fy) in zip(pts, forces):
            p = arena.clamp((x + t * fx, y + t * fy))
            if obstacles:
                p = _push_out(p, (fx, fy), obstacles, arena)
            moved.append(p)
        pts = moved
    return pts, True


@dataclass
class SequentialPlan:
    paths: list
    failed: list
    final_positions: list


def plan_sequential_moves(current: Sequence[Sequence[float]], targets: Sequence[Sequence[float]],
                          world: World, dyn: DynamicConfig | None = None) -> SequentialPlan:
    """Move seekers one at a time, in index order, around everything else.

    Seeker ``k`` plans against the inflated static obstacles and against a
    square of half-width ``2R`` (the footprint inflated by ``R``) around every
    other seeker: already-moved seekers at their targets, pending ones where
    they stand.  A square that already contains the seeker's start or goal is
    left out, since no path could avoid it.  Seekers with no path stay put.
    """
    dyn = dyn or world.dynamic
    R = dyn.robot_radius
    pos = [Point(*p) for p in current]
    paths, failed = [], []
    for k, (start, goal) in enumerate(zip(current, targets)):
        start, goal = Point(*start), Point(*goal)
        if dist(start, goal) <= EPS:
            paths.append(PlannedPath.through([start, goal]))
            pos[k] = goal
            continue
        blockers = []
        for j, c in enumerate(pos):
            if j == k:
                continue
            sq = seeker_rectangle(c, 2.0 * R)
            if point_strictly_inside(start, sq) or point_strictly_inside(goal, sq):
                continue
            blockers.append(sq)
        try:
            path = plan_path(start, goal, blockers, static=world.visibility)
        except (NoPath, StartInsideObstacle, GoalInsideObstacle) as exc:
            log.debug("seeker %d stays put: %s", k, exc)
            paths.append(PlannedPath.through([start]))
            failed.append(k)
            continue
        paths.append(path)
        pos[k] = goal
    return SequentialPlan(paths, failed, pos)
