"""
Planar geometry for obstacle handling and path planning.

Coordinates are millimetres.  Two points closer than ``EPS`` are treated as
coincident and every predicate below uses that tolerance.  Boundary contact
counts as "inside" for membership tests (collision-conservative), while the
visibility graph only rejects segments that pass through an obstacle's
open interior, so sliding along an edge is allowed.
"""

from __future__ import annotations

import csv
import heapq
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

from .errors import GoalInsideObstacle, InvalidPolygon, NoPath, StartInsideObstacle

EPS = 1e-6


class Point(NamedTuple):
    x: float
    y: float


def dist(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, used for the arena."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def center(self) -> Point:
        return Point(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    def contains(self, p: Sequence[float], eps: float = EPS) -> bool:
        return (self.xmin - eps <= p[0] <= self.xmax + eps
                and self.ymin - eps <= p[1] <= self.ymax + eps)

    def clamp(self, p: Sequence[float]) -> Point:
        return Point(min(max(p[0], self.xmin), self.xmax),
                     min(max(p[1], self.ymin), self.ymax))

    def as_polygon(self) -> "Polygon":
        return Polygon([(self.xmin, self.ymin), (self.xmax, self.ymin),
                        (self.xmax, self.ymax), (self.xmin, self.ymax)])


def clip_ray_to_rect(x: Sequence[float], v: Sequence[float], rect: Rect) -> Point:
    """Move from ``x`` along ``v``, stopping where the ray leaves ``rect``.

    Returns ``x + t*v`` for the largest ``t`` in ``[0, 1]`` that keeps the
    point inside the rectangle.  ``x`` is assumed to be inside already.
    """
    px, py = x
    vx, vy = v
    t = 1.0
    if vx > 0.0:
        t = min(t, (rect.xmax - px) / vx)
    elif vx < 0.0:
        t = min(t, (rect.xmin - px) / vx)
    if vy > 0.0:
        t = min(t, (rect.ymax - py) / vy)
    elif vy < 0.0:
        t = min(t, (rect.ymin - py) / vy)
    t = max(t, 0.0)
    # clamp to absorb rounding so the exit coordinate lands exactly on the wall
    return rect.clamp((px + t * vx, py + t * vy))


@dataclass(frozen=True, eq=False)
class Polygon:
    """Simple polygon with counterclockwise vertices.

    Clockwise input is reversed.  Self-intersecting, degenerate or
    non-finite input raises :class:`InvalidPolygon`.
    """

    vertices: tuple
    bbox: tuple = field(init=False, repr=False)

    def __init__(self, vertices: Iterable[Sequence[float]], *, _checked: bool = True):
        pts = [Point(float(x), float(y)) for x, y in vertices]
        if _checked:
            pts = _validated(pts)
        object.__setattr__(self, "vertices", tuple(pts))
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        object.__setattr__(self, "bbox", (min(xs), min(ys), max(xs), max(ys)))

    def __len__(self):
        return len(self.vertices)

    def __eq__(self, other):
        return isinstance(other, Polygon) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        return sum(dist(a, b) for a, b in self.edges())

    def is_convex(self) -> bool:
        vs = self.vertices
        n = len(vs)
        for i in range(n):
            a, b, c = vs[i - 1], vs[i], vs[(i + 1) % n]
            if _cross(a.x, a.y, b.x, b.y, c.x, c.y) < -1e-12 * (1.0 + dist(a, b) * dist(b, c)):
                return False
        return True


def _signed_area(pts) -> float:
    s = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _validated(pts: list) -> list:
    if len(pts) < 3:
        raise InvalidPolygon(f"polygon needs at least 3 vertices, got {len(pts)}")
    for p in pts:
        if not (math.isfinite(p.x) and math.isfinite(p.y)):
            raise InvalidPolygon(f"non-finite vertex {p}")
    # drop consecutive duplicates
    cleaned = [p for i, p in enumerate(pts) if dist(p, pts[i - 1]) > EPS]
    if len(cleaned) < 3:
        raise InvalidPolygon("polygon collapses to fewer than 3 distinct vertices")
    area = _signed_area(cleaned)
    if abs(area) <= EPS:
        raise InvalidPolygon("polygon has zero area")
    if area < 0:
        cleaned.reverse()
    n = len(cleaned)
    for i, j in combinations(range(n), 2):
        a, b = cleaned[i], cleaned[(i + 1) % n]
        c, d = cleaned[j], cleaned[(j + 1) % n]
        if j == i + 1 or (i == 0 and j == n - 1):
            # adjacent edges may only share their common vertex
            shared, (u, w) = (b, (a, d)) if j == i + 1 else (a, (b, c))
            if _point_segment_distance(u, shared, w) <= EPS or _point_segment_distance(w, shared, u) <= EPS:
                raise InvalidPolygon(f"polygon folds back on itself at vertex {tuple(shared)}")
            continue
        if _segments_touch(a, b, c, d):
            raise InvalidPolygon(f"polygon is not simple: edges {i} and {j} intersect")
    return cleaned


def _point_segment_distance(p, a, b) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return math.hypot(p[0] - ax, p[1] - ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(p[0] - ax - t * dx, p[1] - ay - t * dy)


def _closest_on_segment(p, a, b) -> Point:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    ll = dx * dx + dy * dy
    if ll == 0.0:
        return Point(ax, ay)
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / ll
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return Point(ax + t * dx, ay + t * dy)


def _segments_touch(a, b, c, d) -> bool:
    """Closed-segment intersection test with EPS tolerance."""
    d1 = _cross(c[0], c[1], d[0], d[1], a[0], a[1])
    d2 = _cross(c[0], c[1], d[0], d[1], b[0], b[1])
    d3 = _cross(a[0], a[1], b[0], b[1], c[0], c[1])
    d4 = _cross(a[0], a[1], b[0], b[1], d[0], d[1])
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 and d2 and d3 and d4:
        return True
    return (_point_segment_distance(a, c, d) <= EPS or _point_segment_distance(b, c, d) <= EPS
            or _point_segment_distance(c, a, b) <= EPS or _point_segment_distance(d, a, b) <= EPS)


def _bbox_disjoint(bb, ax, ay, bx, by, pad=EPS) -> bool:
    return (max(ax, bx) < bb[0] - pad or min(ax, bx) > bb[2] + pad
            or max(ay, by) < bb[1] - pad or min(ay, by) > bb[3] + pad)


def _classify(p, poly: Polygon) -> int:
    """-1 outside, 0 on the boundary, 1 strictly inside."""
    px, py = p
    bb = poly.bbox
    if px < bb[0] - EPS or px > bb[2] + EPS or py < bb[1] - EPS or py > bb[3] + EPS:
        return -1
    vs = poly.vertices
    inside = False
    xj, yj = vs[-1]
    for xi, yi in vs:
        if _point_segment_distance(p, (xi, yi), (xj, yj)) <= EPS:
            return 0
        if (yi > py) != (yj > py):
            if px < (xj - xi) * (py - yi) / (yj - yi) + xi:
                inside = not inside
        xj, yj = xi, yi
    return 1 if inside else -1


def point_in_polygon(p: Sequence[float], poly: Polygon) -> bool:
    """True if ``p`` is inside ``poly`` or on its boundary."""
    return _classify(p, poly) >= 0


def point_strictly_inside(p: Sequence[float], poly: Polygon) -> bool:
    return _classify(p, poly) == 1


def on_boundary(p: Sequence[float], poly: Polygon) -> bool:
    return _classify(p, poly) == 0


def segment_intersects_polygon(a: Sequence[float], b: Sequence[float], poly: Polygon) -> bool:
    """True if the closed segment ``ab`` meets the closed polygon region."""
    if _bbox_disjoint(poly.bbox, a[0], a[1], b[0], b[1]):
        return False
    if _classify(a, poly) >= 0 or _classify(b, poly) >= 0:
        return True
    return any(_segments_touch(a, b, p, q) for p, q in poly.edges())


def _edge_hits(a, b, p, q) -> list:
    """Parameters t in [0, 1] where segment ab touches segment pq."""
    ax, ay = a
    bx, by = b
    px, py = p
    qx, qy = q
    if (max(px, qx) < min(ax, bx) - EPS or min(px, qx) > max(ax, bx) + EPS
            or max(py, qy) < min(ay, by) - EPS or min(py, qy) > max(ay, by) + EPS):
        return []
    rx, ry = bx - ax, by - ay
    rr = rx * rx + ry * ry
    rlen = math.sqrt(rr)
    sx, sy = qx - px, qy - py
    slen = math.hypot(sx, sy)
    ts = []
    if rlen == 0.0:
        return [0.0] if _point_segment_distance(a, p, q) <= EPS else ts
    denom = rx * sy - ry * sx
    if slen > 0.0 and abs(denom) > 1e-12 * rlen * slen:
        wx, wy = px - ax, py - ay
        t = (wx * sy - wy * sx) / denom
        u = (wx * ry - wy * rx) / denom
        if -EPS / rlen <= t <= 1.0 + EPS / rlen and -EPS / slen <= u <= 1.0 + EPS / slen:
            ts.append(min(max(t, 0.0), 1.0))
    # endpoints of either segment lying on the other (collinear overlap, grazing);
    # a point can only be that close to a segment if it is close to its line
    near = 1.5 * EPS
    for v in (p, q):
        if (abs(rx * (v[1] - ay) - ry * (v[0] - ax)) <= near * rlen
                and _point_segment_distance(v, a, b) <= EPS):
            t = ((v[0] - ax) * rx + (v[1] - ay) * ry) / rr
            ts.append(min(max(t, 0.0), 1.0))
    if slen == 0.0 or abs(sx * (ay - py) - sy * (ax - px)) <= near * slen:
        if _point_segment_distance(a, p, q) <= EPS:
            ts.append(0.0)
    if slen == 0.0 or abs(sx * (by - py) - sy * (bx - px)) <= near * slen:
        if _point_segment_distance(b, p, q) <= EPS:
            ts.append(1.0)
    return ts


def _boundary_params(a, b, poly: Polygon) -> list:
    """Parameters t in [0, 1] where segment ab touches the polygon boundary."""
    ts = []
    vs = poly.vertices
    prev = vs[-1]
    for v in vs:
        ts.extend(_edge_hits(a, b, prev, v))
        prev = v
    return ts


def segment_crosses_interior(a: Sequence[float], b: Sequence[float], poly: Polygon) -> bool:
    """True if segment ``ab`` passes through the open interior of ``poly``.

    Touching a vertex or running along an edge does not count.
    """
    ax, ay = a
    bx, by = b
    if _bbox_disjoint(poly.bbox, ax, ay, bx, by):
        return False
    length = math.hypot(bx - ax, by - ay)
    if length <= EPS:
        return _classify(a, poly) == 1
    # the polygon sits in one closed half-plane of the supporting line
    dx, dy = (bx - ax) / length, (by - ay) / length
    lo = hi = 0.0
    for vx, vy in poly.vertices:
        s = dx * (vy - ay) - dy * (vx - ax)
        if s < lo:
            lo = s
        elif s > hi:
            hi = s
    if lo >= -EPS or hi <= EPS:
        return False
    ts = _boundary_params(a, b, poly)
    ts.append(0.0)
    ts.append(1.0)
    ts.sort()
    min_gap = EPS / length
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 > min_gap:
            tm = 0.5 * (t0 + t1)
            if _classify((ax + tm * (bx - ax), ay + tm * (by - ay)), poly) == 1:
                return True
    return False


def polygon_diameter(poly: Polygon) -> float:
    """Largest distance between any two vertices of ``poly``."""
    vs = poly.vertices
    return max(math.dist(vs[i], vs[j]) for i, j in combinations(range(len(vs)), 2))


def convex_hull(points: Iterable[Sequence[float]]) -> list:
    """Andrew's monotone chain; counterclockwise, collinear points dropped."""
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return [Point(*p) for p in pts]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(*out[-2], *out[-1], *p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return [Point(*p) for p in lower[:-1] + upper[:-1]]


def _drop_collinear(pts: list) -> list:
    out = list(pts)
    changed = True
    while changed and len(out) > 3:
        changed = False
        for i in range(len(out)):
            a, b, c = out[i - 1], out[i], out[(i + 1) % len(out)]
            if _point_segment_distance(b, a, c) <= EPS:
                del out[i]
                changed = True
                break
    return out


def inflate_polygon(poly: Polygon, r: float) -> Polygon:
    """Minkowski sum of ``poly`` with the axis-aligned square of half-width ``r``."""
    if r < 0:
        raise ValueError("inflation radius must be non-negative")
    if r == 0:
        return poly
    offsets = ((r, r), (-r, r), (-r, -r), (r, -r))
    if poly.is_convex():
        return Polygon(convex_hull((v.x + dx, v.y + dy) for v in poly.vertices for dx, dy in offsets))
    # concave: union of the polygon with every edge swept by the square
    from shapely.geometry import Polygon as ShapelyPolygon
    from shapely.ops import unary_union

    pieces = [ShapelyPolygon(poly.vertices)]
    for p, q in poly.edges():
        hull = convex_hull((v[0] + dx, v[1] + dy) for v in (p, q) for dx, dy in offsets)
        pieces.append(ShapelyPolygon(hull))
    merged = unary_union(pieces)
    if merged.geom_type != "Polygon":
        merged = merged.convex_hull if merged.geom_type != "MultiPolygon" else max(merged.geoms, key=lambda g: g.area)
    # enclosed pockets cannot be reached from outside, so holes are filled
    ring = list(merged.exterior.coords)[:-1]
    return Polygon(_drop_collinear([Point(x, y) for x, y in ring]))


def square(center: Sequence[float], half_width: float) -> Polygon:
    cx, cy = center
    h = half_width
    return Polygon([(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)],
                   _checked=False)


def closest_boundary_point(p: Sequence[float], poly: Polygon) -> Point:
    best = None
    best_d = math.inf
    for a, b in poly.edges():
        c = _closest_on_segment(p, a, b)
        d = dist(c, p)
        if d < best_d:
            best, best_d = c, d
    return best


def polygons_overlap(p1: Polygon, p2: Polygon) -> bool:
    """True if the two polygon interiors share area (edge contact excluded)."""
    b1, b2 = p1.bbox, p2.bbox
    if b1[2] < b2[0] or b2[2] < b1[0] or b1[3] < b2[1] or b2[3] < b1[1]:
        return False
    if any(segment_crosses_interior(a, b, p2) for a, b in p1.edges()):
        return True
    if any(segment_crosses_interior(a, b, p1) for a, b in p2.edges()):
        return True
    return False


# --- visibility graph and shortest paths ---------------------------------


@dataclass
class PathGraph:
    nodes: list
    edges: list  # (u, v, length) with u < v

    def adjacency(self) -> dict:
        adj = {i: [] for i in range(len(self.nodes))}
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def write_csv(self, path, planned: "PlannedPath | None" = None) -> None:
        """Debug export: node, edge and path rows in one file."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["kind", "id", "x_mm", "y_mm", "u", "v", "length_mm"])
            for i, p in enumerate(self.nodes):
                w.writerow(["node", i, f"{p[0]:.6f}", f"{p[1]:.6f}", "", "", ""])
            for u, v, length in self.edges:
                w.writerow(["edge", "", "", "", u, v, f"{length:.6f}"])
            if planned is not None:
                for i, p in enumerate(planned.waypoints):
                    w.writerow(["path", i, f"{p[0]:.6f}", f"{p[1]:.6f}", "", "", ""])


@dataclass(frozen=True)
class PlannedPath:
    waypoints: tuple
    length: float
    node_indices: tuple = ()

    @classmethod
    def through(cls, waypoints: Sequence[Sequence[float]]) -> "PlannedPath":
        pts = tuple(Point(*p) for p in waypoints)
        return cls(pts, sum(dist(a, b) for a, b in zip(pts, pts[1:])))


def segment_is_free(a, b, obstacles: Sequence[Polygon]) -> bool:
    x0, x1 = (a[0], b[0]) if a[0] <= b[0] else (b[0], a[0])
    y0, y1 = (a[1], b[1]) if a[1] <= b[1] else (b[1], a[1])
    for poly in obstacles:
        bb = poly.bbox
        # cheap box reject before the exact test
        if x1 < bb[0] - EPS or x0 > bb[2] + EPS or y1 < bb[1] - EPS or y0 > bb[3] + EPS:
            continue
        if segment_crosses_interior(a, b, poly):
            return False
    return True


def build_visibility_graph(start: Sequence[float], goal: Sequence[float],
                           obstacles: Sequence[Polygon]) -> PathGraph:
    """Full visibility graph over start, goal and every obstacle vertex.

    Node 0 is ``start`` and node 1 is ``goal``.  Two nodes are joined when the
    segment between them stays out of every obstacle interior.
    """
    start, goal = Point(*start), Point(*goal)
    for poly in obstacles:
        if point_strictly_inside(start, poly):
            raise StartInsideObstacle(f"start {tuple(start)} lies inside an obstacle")
        if point_strictly_inside(goal, poly):
            raise GoalInsideObstacle(f"goal {tuple(goal)} lies inside an obstacle")
    nodes = [start, goal]
    for poly in obstacles:
        nodes.extend(poly.vertices)
    # a vertex buried inside another obstacle can never be visited
    usable = [i < 2 or not any(point_strictly_inside(p, poly) for poly in obstacles)
              for i, p in enumerate(nodes)]
    edges = []
    for i in range(len(nodes)):
        if not usable[i]:
            continue
        a = nodes[i]
        for j in range(i + 1, len(nodes)):
            if usable[j] and segment_is_free(a, nodes[j], obstacles):
                edges.append((i, j, dist(a, nodes[j])))
    return PathGraph(nodes, edges)


def shortest_path(g: PathGraph, start_index: int, goal_index: int) -> PlannedPath:
    """Dijkstra on ``g``.

    Ties on total length go to the path with fewer waypoints, then to the
    lexicographically smallest node sequence.
    """
    n = len(g.nodes)
    if not (0 <= start_index < n and 0 <= goal_index < n):
        raise IndexError("node index out of range")
    adj = g.adjacency()
    for nbrs in adj.values():
        nbrs.sort()
    best = {start_index: (0.0, 0, (start_index,))}
    heap = [(0.0, 0, (start_index,))]
    done = set()
    while heap:
        d, hops, path = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == goal_index:
            return PlannedPath(tuple(g.nodes[i] for i in path), d, path)
        for v, w in adj[u]:
            if v in done:
                continue
            cand = (d + w, hops + 1, path + (v,))
            if v not in best or cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, cand)
    raise NoPath(f"node {goal_index} is unreachable from node {start_index}")


class StaticVisibility:
    """Memoised visibility among the vertices of a fixed obstacle set.

    Planning against the same static obstacles many times re-tests the same
    vertex pairs; this caches those answers.  Pair ``(i, j)`` is always tested
    with the lower index first.
    """

    def __init__(self, obstacles: Sequence[Polygon]):
        self.obstacles = tuple(obstacles)
        self.vertices = [v for poly in self.obstacles for v in poly.vertices]
        self.buried = [any(point_strictly_inside(v, poly) for poly in self.obstacles)
                       for v in self.vertices]
        self._memo: dict = {}

    def visible(self, i: int, j: int) -> bool:
        key = (i, j) if i < j else (j, i)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = segment_is_free(self.vertices[key[0]], self.vertices[key[1]],
                                                    self.obstacles)
        return hit


def plan_path(start, goal, obstacles: Sequence[Polygon],
              static: StaticVisibility | None = None) -> PlannedPath:
    """Shortest obstacle-free path from ``start`` to ``goal``.

    The obstacle set is ``static.obstacles`` (if given) followed by
    ``obstacles``.  Finds a path as short as ``shortest_path`` on the full
    visibility graph of that set, but runs A* and only tests visibility from
    nodes as they are settled.
    """
    start, goal = Point(*start), Point(*goal)
    extra = list(obstacles)
    fixed = static.obstacles if static is not None else ()
    everything = list(fixed) + extra
    for poly in everything:
        if point_strictly_inside(start, poly):
            raise StartInsideObstacle(f"start {tuple(start)} lies inside an obstacle")
        if point_strictly_inside(goal, poly):
            raise GoalInsideObstacle(f"goal {tuple(goal)} lies inside an obstacle")
    if segment_is_free(start, goal, everything):
        return PlannedPath.through([start, goal])
    nodes = [start, goal]
    for poly in everything:
        nodes.extend(poly.vertices)
    n = len(nodes)
    m = len(static.vertices) if static is not None else 0
    if static is not None:
        usable = [True, True] + [not static.buried[i] and not any(
            point_strictly_inside(nodes[i + 2], poly) for poly in extra) for i in range(m)]
        usable += [not any(point_strictly_inside(nodes[i], poly) for poly in everything)
                   for i in range(m + 2, n)]
    else:
        usable = [i < 2 or not any(point_strictly_inside(nodes[i], poly) for poly in everything)
                  for i in range(n)]

    def free(u, v):
        # same orientation as the full graph so both agree bit for bit
        if u > v:
            u, v = v, u
        if 2 <= u and v < m + 2:
            return static.visible(u - 2, v - 2) and segment_is_free(nodes[u], nodes[v], extra)
        return segment_is_free(nodes[u], nodes[v], everything)

    # A* with the straight-line distance to the goal; keys are
    # (estimate, hops, node sequence, travelled) so ties resolve as in shortest_path
    h = [dist(p, goal) for p in nodes]
    best = {0: (0.0, 0, (0,))}
    heap = [(h[0], 0, (0,), 0.0)]
    done = set()
    while heap:
        _, hops, path, d = heapq.heappop(heap)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == 1:
            return PlannedPath(tuple(nodes[i] for i in path), d, path)
        a = nodes[u]
        for v in range(n):
            if v in done or not usable[v] or not free(u, v):
                continue
            b = nodes[v]
            cand = (d + (dist(a, b) if u < v else dist(b, a)), hops + 1, path + (v,))
            if v not in best or cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, (cand[0] + h[v], cand[1], cand[2], cand[0]))
    raise NoPath(f"no collision-free path from {tuple(start)} to {tuple(goal)}")
