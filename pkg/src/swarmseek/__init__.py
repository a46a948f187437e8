"""Particle-swarm source seeking for teams of mobile robots."""

from .avoidance import DynamicConfig, Obstacle, World
from .errors import *  # noqa: F401,F403
from .field import EmDecayParams, NoiseParams, SignalField
from .geometry import Point, Polygon, Rect
from .harness import ExperimentConfig, RunRecord, SummaryStats, run_batch, run_single, summarize
from .swarm import Constriction, InertiaWeight, Spso, SwarmConfig, Topology

__version__ = "0.1.0"
