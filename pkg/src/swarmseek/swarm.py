"""
Particle swarm engine for source seeking.

One particle is one seeker.  Three velocity rules are supported: damped
inertia weight, Clerc's constriction factor, and SPSO-2006 style local-best
updates over a ring, fully connected or adaptive random informant graph.
Every rule is followed by the two physical constraints: the velocity is
capped at ``v_max`` with its direction kept, and a step that would leave the
arena stops on the wall along the direction of travel.

Random coefficients ``U(0, c)`` are drawn independently for each coordinate.
Updates are synchronous: all velocities use the bests recorded at the end of
the previous iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import rng as rngs
from .avoidance import (
    BUG1,
    RANDOM_STEP,
    World,
    bug1_traverse,
    check_static_collision,
    plan_sequential_moves,
    repel_endpoints,
    strategy_random_step,
)
from .errors import InvalidConfig, PhiOutOfRange
from .geometry import EPS, Point, Rect, clip_ray_to_rect, dist

REGULAR = "regular"
AVOIDING = "avoiding"

RING = "ring"
FULL = "full"
ADAPTIVE_RANDOM = "random"
TOPOLOGIES = (RING, FULL, ADAPTIVE_RANDOM)

DEFAULT_ARENA = Rect(0.0, 0.0, 5000.0, 5000.0)


@dataclass(frozen=True)
class Topology:
    kind: str = FULL
    k: int = 3

    def __post_init__(self):
        if self.kind not in TOPOLOGIES:
            raise InvalidConfig(f"unknown topology {self.kind!r}; use one of {TOPOLOGIES}")
        if self.kind == ADAPTIVE_RANDOM and self.k < 1:
            raise InvalidConfig("adaptive random topology needs k >= 1")

    @property
    def label(self) -> str:
        return f"random(K={self.k})" if self.kind == ADAPTIVE_RANDOM else self.kind


@dataclass(frozen=True)
class InertiaWeight:
    omega1: float = 3.0
    damping: float = 0.95
    c1: float = 2.0
    c2: float = 2.0

    name = "inertia"


@dataclass(frozen=True)
class Constriction:
    phi: float = 4.1
    c1: Optional[float] = None
    c2: Optional[float] = None

    name = "constriction"

    def __post_init__(self):
        if self.phi <= 4:
            raise PhiOutOfRange(f"constriction needs phi > 4, got {self.phi}")
        c1 = self.phi / 2 if self.c1 is None else self.c1
        c2 = self.phi - c1 if self.c2 is None else self.c2
        if abs(c1 + c2 - self.phi) > 1e-9:
            raise InvalidConfig(f"c1 + c2 must equal phi ({c1} + {c2} != {self.phi})")
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    @property
    def K(self) -> float:
        return constriction_factor(self.phi)


def spso_defaults(dimension: int = 2) -> tuple:
    """Swarm size, inertia and acceleration of SPSO 2006 for a D-dimensional search."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    n = 10 + int(math.floor(2.0 * math.sqrt(dimension)))
    return n, 1.0 / (2.0 * math.log(2.0)), 0.5 + math.log(2.0)


@dataclass(frozen=True)
class Spso:
    omega: float = field(default_factory=lambda: spso_defaults()[1])
    c: float = field(default_factory=lambda: spso_defaults()[2])
    topology: Topology = field(default_factory=Topology)

    name = "spso"


Variant = Union[InertiaWeight, Constriction, Spso]


@dataclass(frozen=True)
class SwarmConfig:
    variant: Variant = field(default_factory=InertiaWeight)
    swarm_size: int = 5
    v_max: float = 500.0
    arena: Rect = DEFAULT_ARENA
    stagnation_window: int = 20
    max_iterations: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 1:
            raise InvalidConfig("swarm_size must be >= 1")
        if not self.v_max > 0:
            raise InvalidConfig("v_max must be > 0")
        if self.stagnation_window < 1 or self.max_iterations < 1:
            raise InvalidConfig("stagnation_window and max_iterations must be >= 1")
        if isinstance(self.variant, Spso):
            topo = self.variant.topology
            if topo.kind == ADAPTIVE_RANDOM and not 1 <= topo.k <= self.swarm_size:
                raise InvalidConfig(f"adaptive random K={topo.k} must lie in [1, {self.swarm_size}]")


@dataclass(frozen=True)
class Particle:
    position: Point
    velocity: tuple
    pbest_position: Point
    pbest_cost: float
    cost: float
    mode: str = REGULAR


@dataclass
class SwarmState:
    """Swarm snapshot after ``iteration`` steps.

    ``rng`` drives the velocity draws and informant regeneration,
    ``avoid_rng`` the random-step strategy.  Both generators are advanced in
    place by :func:`step`; everything else is replaced.
    """

    particles: tuple
    gbest_position: Point
    gbest_cost: float
    iteration: int = 0
    stagnation_count: int = 0
    informants: tuple = ()
    total_distance: float = 0.0
    inertia: Optional[float] = None
    rng: Optional[np.random.Generator] = field(default=None, repr=False, compare=False)
    avoid_rng: Optional[np.random.Generator] = field(default=None, repr=False, compare=False)
    last_travel: tuple = ()
    events: dict = field(default_factory=lambda: {"static_avoidance": 0, "no_path": 0,
                                                  "separation_failed": 0})


# --- velocity rules ------------------------------------------------------


def _draws(rng, c_a: float, c_b: float):
    u = rng.random(4).tolist()
    return c_a * u[0], c_a * u[1], c_b * u[2], c_b * u[3]


def update_velocity_inertia(p: Particle, gbest: Sequence[float], omega: float,
                            c1: float, c2: float, rng) -> tuple:
    r1x, r1y, r2x, r2y = _draws(rng, c1, c2)
    (x, y), (vx, vy), (bx, by) = p.position, p.velocity, p.pbest_position
    return (omega * vx + r1x * (bx - x) + r2x * (gbest[0] - x),
            omega * vy + r1y * (by - y) + r2y * (gbest[1] - y))


def update_velocity_constriction(p: Particle, gbest: Sequence[float], K: float,
                                 c1: float, c2: float, rng) -> tuple:
    r1x, r1y, r2x, r2y = _draws(rng, c1, c2)
    (x, y), (vx, vy), (bx, by) = p.position, p.velocity, p.pbest_position
    return (K * (vx + r1x * (bx - x) + r2x * (gbest[0] - x)),
            K * (vy + r1y * (by - y) + r2y * (gbest[1] - y)))


def update_velocity_spso(p: Particle, lbest: Sequence[float], omega: float, c: float, rng) -> tuple:
    return update_velocity_inertia(p, lbest, omega, c, c, rng)


def damp_inertia(omega: float, damping: float) -> float:
    return damping * omega


def constriction_factor(phi: float) -> float:
    """Clerc's factor ``2 / |2 - phi - sqrt(phi^2 - 4 phi)|``."""
    if phi <= 4:
        raise PhiOutOfRange(f"constriction needs phi > 4, got {phi}")
    return 2.0 / abs(2.0 - phi - math.sqrt(phi * phi - 4.0 * phi))


def clamp_velocity(v: Sequence[float], v_max: float) -> tuple:
    speed = math.hypot(v[0], v[1])
    if speed > v_max:
        s = v_max / speed
        return (v[0] * s, v[1] * s)
    return (v[0], v[1])


def confine_position(x_old: Sequence[float], v: Sequence[float], arena: Rect) -> Point:
    """Apply ``v`` from ``x_old``; a step leaving the arena stops on the wall."""
    return clip_ray_to_rect(x_old, v, arena)


# --- topology ------------------------------------------------------------


def static_informants(n: int, topology: Topology) -> tuple:
    if topology.kind == FULL:
        return tuple(tuple(True for _ in range(n)) for _ in range(n))
    if topology.kind == RING:
        rows = []
        for k in range(n):
            rows.append(tuple(j in (k, (k - 1) % n, (k + 1) % n) for j in range(n)))
        return tuple(rows)
    raise ValueError("adaptive random informants are drawn, not fixed")


def regenerate_informants(n: int, k: int, rng) -> tuple:
    """Each particle informs itself plus ``k`` uniformly drawn particles.

    Draws are with replacement, so a row holds between 1 and ``k + 1`` true
    entries.  Row ``i`` lists whom particle ``i`` informs.
    """
    picks = rng.integers(0, n, size=(n, k)).tolist()
    rows = []
    for i in range(n):
        row = [False] * n
        row[i] = True
        for j in picks[i]:
            row[j] = True
        rows.append(tuple(row))
    return tuple(rows)


def compute_lbest(state: SwarmState, k: int) -> Point:
    """Best personal best among the particles that inform particle ``k``."""
    m = state.informants
    best_j = None
    for j, p in enumerate(state.particles):
        if m[j][k] and (best_j is None or p.pbest_cost < state.particles[best_j].pbest_cost):
            best_j = j
    return state.particles[best_j].pbest_position


# --- initialisation and stepping -----------------------------------------


def _uniform_velocity(rng, v_max: float) -> tuple:
    theta, mag = rng.random(2).tolist()
    theta *= 2.0 * math.pi
    mag *= v_max
    return (mag * math.cos(theta), mag * math.sin(theta))


def init_swarm(config: SwarmConfig, field, world: World | None = None) -> SwarmState:
    """Uniform random positions and velocities, deterministic in ``config.seed``.

    With a world present, positions inside an inflated obstacle are redrawn
    and the survivors are pushed apart to the seekers' minimum spacing.
    """
    rng_init = rngs.stream(config.seed, rngs.INIT)
    a = config.arena
    n = config.swarm_size
    positions = []
    for _ in range(n):
        for _attempt in range(10_000):
            u = rng_init.random(2).tolist()
            p = Point(a.xmin + u[0] * a.width, a.ymin + u[1] * a.height)
            if world is None or world.is_free(p):
                break
        positions.append(p)
    if world is not None:
        positions, _ = repel_endpoints(positions, world.dynamic, a, world.clearance)
    velocities = [_uniform_velocity(rng_init, config.v_max) for _ in range(n)]
    particles = []
    for p, v in zip(positions, velocities):
        c = field.cost(p)
        particles.append(Particle(p, v, p, c, c))
    ib = min(range(n), key=lambda i: particles[i].pbest_cost)

    variant = config.variant
    if isinstance(variant, Spso):
        topo = variant.topology
        informants = (regenerate_informants(n, topo.k, rng_init) if topo.kind == ADAPTIVE_RANDOM
                      else static_informants(n, topo))
    else:
        informants = static_informants(n, Topology(FULL))
    return SwarmState(
        particles=tuple(particles),
        gbest_position=particles[ib].pbest_position,
        gbest_cost=particles[ib].pbest_cost,
        informants=informants,
        inertia=variant.omega1 if isinstance(variant, InertiaWeight) else None,
        rng=rngs.stream(config.seed, rngs.ITERATION),
        avoid_rng=rngs.stream(config.seed, rngs.AVOIDANCE),
    )


def _new_velocities(state: SwarmState, config: SwarmConfig) -> list:
    variant = config.variant
    ps = state.particles
    g = state.gbest_position
    rng = state.rng
    if isinstance(variant, InertiaWeight):
        return [update_velocity_inertia(p, g, state.inertia, variant.c1, variant.c2, rng) for p in ps]
    if isinstance(variant, Constriction):
        K = variant.K
        return [update_velocity_constriction(p, g, K, variant.c1, variant.c2, rng) for p in ps]
    if variant.topology.kind == FULL:
        lbests = [g] * len(ps)
    else:
        lbests = [compute_lbest(state, k) for k in range(len(ps))]
    return [update_velocity_spso(p, lb, variant.omega, variant.c, rng) for p, lb in zip(ps, lbests)]


def step(state: SwarmState, config: SwarmConfig, field, world: World | None = None) -> SwarmState:
    """Advance the swarm by one iteration and return the new state."""
    ps = state.particles
    n = len(ps)
    arena = config.arena
    velocities = [clamp_velocity(v, config.v_max) for v in _new_velocities(state, config)]
    starts = [p.position for p in ps]
    tentative = [confine_position(x, v, arena) for x, v in zip(starts, velocities)]
    events = dict(state.events)
    modes = [REGULAR] * n

    if world is None:
        finals = tentative
        travel = [dist(a, b) for a, b in zip(starts, finals)]
    else:
        legs_from = list(starts)
        targets = list(tentative)
        pre_travel = [0.0] * n
        for k in range(n):
            j = check_static_collision(starts[k], tentative[k], world)
            if j is None:
                continue
            modes[k] = AVOIDING
            events["static_avoidance"] += 1
            if world.static_strategy == RANDOM_STEP:
                targets[k] = strategy_random_step(starts[k], j, world, state.avoid_rng)
            elif world.static_strategy == BUG1:
                bug = bug1_traverse(starts[k], tentative[k], j, world, field, spacing=config.v_max)
                legs_from[k] = targets[k] = bug.final
                pre_travel[k] = bug.traveled
        targets, separated = repel_endpoints(targets, world.dynamic, arena, world.clearance)
        if not separated:
            events["separation_failed"] += 1
        plan = plan_sequential_moves(legs_from, targets, world)
        events["no_path"] += len(plan.failed)
        finals = plan.final_positions
        travel = [pre + path.length for pre, path in zip(pre_travel, plan.paths)]

    new_particles = []
    for p, v, t, x, mode in zip(ps, velocities, tentative, finals, modes):
        if dist(x, t) > EPS:
            # avoidance moved the endpoint: carry the realised displacement
            v = clamp_velocity((x[0] - p.position[0], x[1] - p.position[1]), config.v_max)
        c = field.cost(x)
        if c < p.pbest_cost:
            new_particles.append(Particle(x, v, x, c, c, mode))
        else:
            new_particles.append(Particle(x, v, p.pbest_position, p.pbest_cost, c, mode))

    gbest_position, gbest_cost = state.gbest_position, state.gbest_cost
    for p in new_particles:
        if p.pbest_cost < gbest_cost:
            gbest_position, gbest_cost = p.pbest_position, p.pbest_cost
    improved = gbest_cost < state.gbest_cost

    variant = config.variant
    inertia = state.inertia
    if isinstance(variant, InertiaWeight):
        inertia = damp_inertia(inertia, variant.damping)
    informants = state.informants
    if isinstance(variant, Spso) and variant.topology.kind == ADAPTIVE_RANDOM and not improved:
        informants = regenerate_informants(n, variant.topology.k, state.rng)

    return replace(
        state,
        particles=tuple(new_particles),
        gbest_position=gbest_position,
        gbest_cost=gbest_cost,
        iteration=state.iteration + 1,
        stagnation_count=0 if improved else state.stagnation_count + 1,
        informants=informants,
        total_distance=state.total_distance + sum(travel),
        inertia=inertia,
        last_travel=tuple(travel),
        events=events,
    )


def has_terminated(state: SwarmState, config: SwarmConfig) -> bool:
    return state.stagnation_count >= config.stagnation_window or state.iteration >= config.max_iterations
