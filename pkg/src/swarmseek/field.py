"""
Signal sources and the synthetic RSSI map the seekers sample.

The electromagnetic decay model is evaluated with distance in metres so the
``(1 + d)`` regulariser acts at physical scale; positions everywhere else are
millimetres.  A frozen grid of Gaussian dB offsets, bilinearly interpolated,
stands in for the multipath clutter of a measured RSSI map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import AtSource, InvalidConfig, NegativeDistance, OutOfArena, TimeBeforeRelease
from .geometry import EPS, Point, Rect, dist
from .rng import NOISE
from .rng import stream as rng_stream

SOURCE_DBM = -28.0
MM_PER_M = 1000.0


@dataclass(frozen=True)
class EmDecayParams:
    source_power: float = 1.0
    medium_constant: float = 1.0
    exponent: float = 2.0
    source_position: Point = Point(2500.0, 2500.0)

    def __post_init__(self):
        if min(self.source_power, self.medium_constant, self.exponent) <= 0:
            raise InvalidConfig("source_power, medium_constant and exponent must be positive")


@dataclass(frozen=True)
class VaporParams:
    emission_rate: float
    diffusivity: float
    source_position: Point = Point(2500.0, 2500.0)
    start_time: float = 0.0

    def __post_init__(self):
        if self.emission_rate <= 0 or self.diffusivity <= 0:
            raise InvalidConfig("emission_rate and diffusivity must be positive")


@dataclass(frozen=True)
class AcousticParams:
    source_power: float
    source_position: Point = Point(2500.0, 2500.0)

    def __post_init__(self):
        if self.source_power <= 0:
            raise InvalidConfig("source_power must be positive")


@dataclass(frozen=True)
class NoiseParams:
    sigma_db: float = 3.0
    grid_resolution: float = 50.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma_db < 0:
            raise InvalidConfig("sigma_db must be >= 0")
        if self.grid_resolution <= 0:
            raise InvalidConfig("grid_resolution must be > 0")


def em_power(params: EmDecayParams, d: float) -> float:
    """Received power ``c*P / (1 + d)**alpha`` at distance ``d`` metres."""
    if d < 0:
        raise NegativeDistance(f"distance must be non-negative, got {d}")
    return params.medium_constant * params.source_power / (1.0 + d) ** params.exponent


def default_calibration(params: EmDecayParams) -> float:
    """dB offset that puts the RSSI at the source at -28 dBm."""
    return SOURCE_DBM - 10.0 * math.log10(params.medium_constant * params.source_power)


def em_rssi_dbm(params: EmDecayParams, d: float, calibration_offset: float | None = None) -> float:
    if calibration_offset is None:
        calibration_offset = default_calibration(params)
    return 10.0 * math.log10(em_power(params, d)) + calibration_offset


def _vapor_at(params: VaporParams, r: float, t: float) -> float:
    if t <= params.start_time:
        raise TimeBeforeRelease(f"t={t} is not after release time {params.start_time}")
    if r <= 0:
        raise AtSource("concentration is singular at the source")
    k = params.diffusivity
    arg = r / (2.0 * math.sqrt(k * (t - params.start_time)))
    return params.emission_rate / (4.0 * math.pi * k * r) * math.erfc(arg)


def vapor_concentration(params: VaporParams, r: Sequence[float], t: float) -> float:
    """Concentration at ``r`` and time ``t`` for a constant-rate vapour release.

    Distances are taken in the units of the positions given; the map backend
    converts millimetres to metres before calling in.
    """
    return _vapor_at(params, dist(r, params.source_position), t)


def acoustic_intensity(params: AcousticParams, r: float) -> float:
    if r <= 0:
        raise AtSource("intensity is singular at the source")
    return params.source_power / (4.0 * math.pi * r * r)


Model = Union[EmDecayParams, VaporParams, AcousticParams]


@dataclass(frozen=True)
class SignalField:
    """A decay model plus frozen noise over a rectangular arena.

    For the electromagnetic model ``sample`` returns dBm and the noise is an
    additive dB offset.  Vapour and acoustic models return raw concentration
    or intensity with the offset applied as a multiplicative gain.
    """

    arena: Rect
    model: Model = field(default_factory=EmDecayParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    calibration_offset: float | None = None
    observation_time: float = 3600.0
    # distances below this floor are clamped for the singular models
    min_distance_mm: float = 1.0
    noise_grid: np.ndarray = field(init=False, repr=False, compare=False)
    _grid_rows: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.model, EmDecayParams) and self.calibration_offset is None:
            object.__setattr__(self, "calibration_offset", default_calibration(self.model))
        res = self.noise.grid_resolution
        nx = int(math.ceil(self.arena.width / res - 1e-9)) + 1
        ny = int(math.ceil(self.arena.height / res - 1e-9)) + 1
        rng = rng_stream(self.noise.seed, NOISE)
        grid = rng.standard_normal((nx, ny)) * self.noise.sigma_db
        if grid.size > 1 and self.noise.sigma_db > 0:
            grid -= grid.mean()
        grid.setflags(write=False)
        object.__setattr__(self, "noise_grid", grid)
        object.__setattr__(self, "_grid_rows", grid.tolist())

    @property
    def source_position(self) -> Point:
        return self.model.source_position

    def node(self, i: int, j: int) -> Point:
        res = self.noise.grid_resolution
        return Point(self.arena.xmin + i * res, self.arena.ymin + j * res)

    def noise_at(self, p: Sequence[float]) -> float:
        res = self.noise.grid_resolution
        rows = self._grid_rows
        nx, ny = len(rows), len(rows[0])
        gx = (p[0] - self.arena.xmin) / res
        gy = (p[1] - self.arena.ymin) / res
        i = min(max(int(math.floor(gx)), 0), max(nx - 2, 0))
        j = min(max(int(math.floor(gy)), 0), max(ny - 2, 0))
        fx = min(max(gx - i, 0.0), 1.0)
        fy = min(max(gy - j, 0.0), 1.0)
        if nx == 1 or ny == 1:
            return rows[i][j]
        r0, r1 = rows[i], rows[i + 1]
        return ((1 - fx) * ((1 - fy) * r0[j] + fy * r0[j + 1])
                + fx * ((1 - fy) * r1[j] + fy * r1[j + 1]))

    def model_value(self, p: Sequence[float]) -> float:
        """Noise-free value at ``p``."""
        d_mm = dist(p, self.model.source_position)
        m = self.model
        if isinstance(m, EmDecayParams):
            return em_rssi_dbm(m, d_mm / MM_PER_M, self.calibration_offset)
        d_m = max(d_mm, self.min_distance_mm) / MM_PER_M
        if isinstance(m, VaporParams):
            return _vapor_at(m, d_m, self.observation_time)
        return acoustic_intensity(m, d_m)

    def sample(self, p: Sequence[float]) -> float:
        if not self.arena.contains(p, EPS):
            raise OutOfArena(f"point {tuple(p)} is outside the arena")
        base = self.model_value(p)
        if self.noise.sigma_db == 0:
            return base
        offset = self.noise_at(p)
        if isinstance(self.model, EmDecayParams):
            return base + offset
        return base * 10.0 ** (offset / 10.0)

    def cost(self, p: Sequence[float]) -> float:
        """Quantity the swarm minimises: the negated sample."""
        return -self.sample(p)


def sample(field: SignalField, p: Sequence[float]) -> float:
    return field.sample(p)


def cost(field: SignalField, p: Sequence[float]) -> float:
    return field.cost(p)
