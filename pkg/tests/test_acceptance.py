"""End-to-end acceptance checks.

Each test records one PASS/FAIL line (shown in the terminal summary) and then
asserts on the same condition.  Expensive batches are cached so shared
configurations are simulated only once per session.
"""

import itertools
import math
import random
from functools import lru_cache

import pytest

from swarmseek.avoidance import DynamicConfig, Obstacle, World, repel_endpoints
from swarmseek.cli import main
from swarmseek.errors import GoalInsideObstacle, InvalidPolygon, NoPath, StartInsideObstacle
from swarmseek.field import NoiseParams, SignalField
from swarmseek.geometry import (
    PathGraph,
    Point,
    Polygon,
    Rect,
    build_visibility_graph,
    inflate_polygon,
    polygon_diameter,
    segment_intersects_polygon,
    shortest_path,
)
from swarmseek.harness import ExperimentConfig, run_batch, summarize
from swarmseek.swarm import Constriction, InertiaWeight, Spso, SwarmConfig, Topology, constriction_factor

pytestmark = pytest.mark.acceptance

ARENA = Rect(0, 0, 5000, 5000)
NOISY = SignalField(ARENA)
CLEAN = SignalField(ARENA, noise=NoiseParams(sigma_db=0))
SOURCE = (2500, 2500)

# five walls and blocks around a centred source, a mix of convex and concave shapes
OBSTACLE_WORLD = [
    [(900, 900), (1700, 900), (1700, 1500), (900, 1500)],
    [(3200, 700), (4300, 700), (4300, 1100), (3600, 1100), (3600, 1900), (3200, 1900)],
    [(700, 3300), (1900, 3300), (1300, 4300)],
    [(3400, 3000), (3800, 3000), (3800, 4400), (3400, 4400)],
    [(2000, 2950), (3000, 2950), (3000, 3450), (2800, 3450), (2800, 3150),
     (2200, 3150), (2200, 3450), (2000, 3450)],
]


@lru_cache(maxsize=None)
def batch(field, variant, n=5, v_max=500.0, runs=1000, strategy=None, window=20, max_iter=200, traj=False):
    world = None
    if strategy:
        world = World([Obstacle.from_coords(o) for o in OBSTACLE_WORLD], ARENA, static_strategy=strategy)
    swarm = SwarmConfig(variant, swarm_size=n, v_max=v_max, stagnation_window=window, max_iterations=max_iter)
    cfg = ExperimentConfig(field, swarm, world=world, num_runs=runs)
    return run_batch(cfg, workers=0, keep_trajectories=traj)


def stats(*args, **kw):
    return summarize(batch(*args, **kw))


def test_constriction_factor_values(criteria):
    expected = {4.5: 0.5, 4.1: 0.73, 4.05: 0.8, 4.01: 0.90}
    got = {phi: constriction_factor(phi) for phi in expected}
    ok = all(abs(got[p] - k) <= 0.005 for p, k in expected.items())
    detail = ", ".join(f"phi={p} K={got[p]:.4f}" for p in expected)
    assert criteria.record(1, "constriction factor values", ok, detail)


def test_noise_free_convergence(criteria):
    recs = batch(CLEAN, InertiaWeight(omega1=2.0), runs=500)
    hits = sum(math.dist(r.gbest_position, SOURCE) <= 100 for r in recs)
    rate = hits / len(recs)
    assert criteria.record(2, "noise-free convergence", rate >= 0.95, f"{hits}/{len(recs)} within 100 mm ({rate:.3f})")


def test_inertia_sweep_trend(criteria):
    s = [stats(NOISY, InertiaWeight(omega1=w)) for w in (2.0, 3.0, 4.0, 5.0)]
    stds = [x.stdGbest for x in s]
    violations = [(a, b) for a, b in zip(stds, stds[1:]) if b > a]
    std_ok = len(violations) == 0 or (len(violations) == 1 and (violations[0][1] - violations[0][0]) / violations[0][0] <= 0.10)
    ratio = s[3].avgTotalD / s[0].avgTotalD
    ok = std_ok and ratio >= 1.3
    detail = (f"stdGbest {', '.join(f'{v:.3f}' for v in stds)} (trend {'ok' if std_ok else 'broken'}); "
              f"avgTotalD ratio w5/w2 {ratio:.3f} (need >= 1.3); avgI {s[0].avgI:.1f} -> {s[3].avgI:.1f}")
    assert criteria.record(3, "inertia sweep trend", ok, detail)


def test_vmax_doubling(criteria):
    slow = stats(NOISY, InertiaWeight(omega1=2.0))
    fast = stats(NOISY, InertiaWeight(omega1=2.0), v_max=1000.0)
    ratio = fast.avgTotalD / slow.avgTotalD
    assert criteria.record(4, "v_max doubling", 1.5 <= ratio <= 2.5,
                           f"avgTotalD {slow.avgTotalD:.0f} -> {fast.avgTotalD:.0f} mm, ratio {ratio:.3f}")


def late_step_length(recs, first=35, last=45):
    total = count = 0
    for r in recs:
        for t in r.trajectories:
            for k in range(first, last + 1):
                total += math.dist(t[k - 1][:2], t[k][:2])
                count += 1
    return total / count


def test_constriction_keeps_oscillating(criteria):
    # fixed horizon: stagnation is disabled so every run reaches iteration 45
    kw = dict(runs=500, window=10**6, max_iter=45, traj=True)
    cons = late_step_length(batch(NOISY, Constriction(phi=4.01), **kw))
    inert = late_step_length(batch(NOISY, InertiaWeight(omega1=2.0), **kw))
    ratio = cons / inert
    assert criteria.record(5, "constriction keeps oscillating", ratio >= 1.5,
                           f"mean step {cons:.1f} vs {inert:.1f} mm, ratio {ratio:.3f} (K={constriction_factor(4.01):.4f})")


def test_topologies_indistinguishable(criteria):
    tops = {"ring": Topology("ring"), "full": Topology("full"), "random": Topology("random", 3)}
    avg = {k: stats(NOISY, Spso(topology=t), n=12).avgGbest for k, t in tops.items()}
    spread = max(abs(a - b) for a, b in itertools.combinations(avg.values(), 2))
    detail = ", ".join(f"{k} {v:.3f}" for k, v in avg.items()) + f"; max pairwise gap {spread:.3f} (need <= 0.2)"
    assert criteria.record(6, "topologies indistinguishable", spread <= 0.2, detail)


def test_obstacle_strategy_ordering(criteria):
    ok = True
    parts = []
    for name, variant, n in (("inertia", InertiaWeight(), 5), ("spso", Spso(topology=Topology("full")), 12)):
        s1 = stats(NOISY, variant, n=n, runs=500, strategy="random_step")
        s2 = stats(NOISY, variant, n=n, runs=500, strategy="bug1")
        ok &= s1.stdGbest < s2.stdGbest
        ok &= min(s1.success_rate, s2.success_rate) >= 0.8
        parts.append(f"{name}: std {s1.stdGbest:.3f} vs {s2.stdGbest:.3f}, "
                     f"success {s1.success_rate:.3f}/{s2.success_rate:.3f}")
    assert criteria.record(7, "obstacle strategy ordering", ok, "; ".join(parts))


def brute_force_length(g, s, t):
    adj = g.adjacency()
    best = math.inf
    stack = [(s, frozenset([s]), 0.0)]
    while stack:
        u, seen, d = stack.pop()
        if u == t:
            best = min(best, d)
            continue
        for v, w in adj[u]:
            if v not in seen:
                stack.append((v, seen | {v}, d + w))
    return best


def random_polygon(rng, cx, cy, r):
    k = rng.randint(3, 7)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(k))
    return Polygon([(cx + rng.uniform(0.4, 1) * r * math.cos(a), cy + rng.uniform(0.4, 1) * r * math.sin(a))
                    for a in angles])


def test_geometry_oracles(criteria):
    rng = random.Random(2024)
    graph_bad = 0
    for _ in range(1000):
        n = rng.randint(1, 8)
        nodes = [Point(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(n)]
        edges = [(i, j, math.dist(nodes[i], nodes[j]))
                 for i in range(n) for j in range(i + 1, n) if rng.random() < 0.45]
        g = PathGraph(nodes, edges)
        t = rng.randrange(n)
        expect = brute_force_length(g, 0, t)
        try:
            got = shortest_path(g, 0, t).length
        except NoPath:
            got = math.inf
        graph_bad += got != expect

    worlds = edges_checked = edge_bad = 0
    while worlds < 1000:
        R = rng.uniform(5, 40)
        try:
            raw = [random_polygon(rng, rng.uniform(150, 850), rng.uniform(150, 850), rng.uniform(60, 180))
                   for _ in range(rng.randint(2, 6))]
        except InvalidPolygon:
            continue
        inflated = [inflate_polygon(p, R) for p in raw]
        start = (rng.uniform(0, 1000), rng.uniform(0, 1000))
        goal = (rng.uniform(0, 1000), rng.uniform(0, 1000))
        try:
            path = shortest_path(build_visibility_graph(start, goal, inflated), 0, 1)
        except (StartInsideObstacle, GoalInsideObstacle, NoPath):
            continue
        worlds += 1
        for a, b in zip(path.waypoints, path.waypoints[1:]):
            edges_checked += 1
            edge_bad += any(segment_intersects_polygon(a, b, p) for p in raw)

    diam_bad = 0
    for _ in range(1000):
        try:
            poly = random_polygon(rng, 0, 0, rng.uniform(1, 100))
        except InvalidPolygon:
            continue
        best = 0.0
        for p in poly.vertices:
            for q in poly.vertices:
                best = max(best, math.dist(p, q))
        diam_bad += polygon_diameter(poly) != best

    ok = graph_bad == 0 and edge_bad == 0 and diam_bad == 0
    detail = (f"shortest-path mismatches {graph_bad}/1000; colliding path edges {edge_bad}/{edges_checked} "
              f"over {worlds} worlds; diameter mismatches {diam_bad}")
    assert criteria.record(8, "geometry oracles", ok, detail)


def test_repel_postcondition(criteria):
    rng = random.Random(77)
    failures = 0
    for k in range(1000):
        R = rng.uniform(5, 50)
        side = R * rng.uniform(40, 60)
        arena = Rect(0, 0, side, side)
        n = rng.randint(2, 12)
        # half the instances start tightly clustered so that the repulsion has real work to do
        spread = side if k % 2 else 3 * R
        cx, cy = rng.uniform(spread / 2, side - spread / 2), rng.uniform(spread / 2, side - spread / 2)
        pts = [(cx + rng.uniform(-spread / 2, spread / 2), cy + rng.uniform(-spread / 2, spread / 2))
               for _ in range(n)]
        out, sep = repel_endpoints(pts, DynamicConfig(robot_radius=R), arena)
        worst = min((math.dist(a, b) for a, b in itertools.combinations(out, 2)), default=math.inf)
        failures += not (sep and worst >= 2 * R - 1e-6)
    hand, _ = repel_endpoints([(0, 0), (30, 0)], DynamicConfig(robot_radius=20, force_scale=1.0),
                              Rect(-1000, -1000, 1000, 1000))
    hand_ok = hand == [(-10, 0), (40, 0)]
    ok = failures == 0 and hand_ok
    assert criteria.record(9, "repulsion post-condition", ok,
                           f"{1000 - failures}/1000 separated; hand example {'matches' if hand_ok else hand}")


def test_batch_determinism(criteria, tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(
        "world:\n  obstacles:\n"
        + "".join(f"    - {[list(v) for v in o]}\n" for o in OBSTACLE_WORLD[:2])
        + "  static_strategy: bug1\n"
        "experiment:\n  num_runs: 24\n  master_seed: 99\n  trajectories: true\n  quiet: true\n"
    )
    outputs = {}
    for name, workers in (("serial", "1"), ("again", "1"), ("parallel", "2")):
        out = tmp_path / name
        code = main(["batch", "--config", str(cfg), "--out", str(out), "--workers", workers])
        assert code == 0
        outputs[name] = {f: (out / f).read_bytes() for f in ("summary.csv", "runs.jsonl", "trajectories.csv")}
    ok = outputs["serial"] == outputs["again"] == outputs["parallel"]
    size = sum(len(b) for b in outputs["serial"].values())
    assert criteria.record(10, "batch determinism", ok,
                           f"3 invocations (serial, repeat, 2 workers), {size} bytes each, identical={ok}")
