"""
Monte Carlo runner: many seeded runs of one configuration, their summary
statistics, and the files they are exported to.

Each run draws its seed from ``(master_seed, run_index)`` alone, so a batch
gives the same records whether it runs serially or across processes.

Export formats
--------------
``summary.csv``
    One row per batch.  Statistics use ``%.6f``.
``runs.jsonl``
    One JSON object per run.  Floats are written with ``repr`` precision so
    the values read back exactly.
``trajectories.csv``
    ``run, iteration, seeker, x_mm, y_mm, cost`` with ``%.6f`` coordinates
    and costs; iteration 0 is the initial placement.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from .avoidance import World
from .errors import EmptyRecords, InvalidConfig, RunFailed, SwarmSeekError
from .field import SignalField
from .geometry import Point
from .rng import run_seed
from .swarm import Constriction, InertiaWeight, Spso, SwarmConfig, has_terminated, init_swarm, step

log = logging.getLogger(__name__)

STAGNATION = "stagnation"
MAX_ITERATIONS = "max_iterations"

SUMMARY_COLUMNS = (
    "set_label", "variant", "omega1", "lambda", "phi", "K", "c1", "c2", "v_max_mm",
    "swarm_size", "topology", "strategy", "num_runs",
    "avgGbest", "stdGbest", "avgI", "avgTotalD_mm", "success_rate",
)
TRAJECTORY_COLUMNS = ("run", "iteration", "seeker", "x_mm", "y_mm", "cost")


@dataclass(frozen=True)
class ExperimentConfig:
    field: SignalField
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    world: Optional[World] = None
    num_runs: int = 1000
    master_seed: int = 0
    success_threshold: float = 28.5
    label: str = ""

    def __post_init__(self):
        if self.num_runs < 1:
            raise InvalidConfig("num_runs must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise InvalidConfig("master_seed must be a 64-bit unsigned integer")


@dataclass
class RunRecord:
    run_index: int
    gbest_cost: float = math.nan
    gbest_position: Point = Point(math.nan, math.nan)
    iterations: int = 0
    total_distance: float = 0.0
    terminated_by: str = ""
    # trajectories[k] is seeker k's list of (x, y, cost), one per iteration
    trajectories: list = field(default_factory=list, repr=False)
    events: dict = field(default_factory=dict)
    failure: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    def scalars(self) -> dict:
        return {
            "run_index": self.run_index,
            "gbest_cost": self.gbest_cost,
            "gbest_x_mm": self.gbest_position[0],
            "gbest_y_mm": self.gbest_position[1],
            "iterations": self.iterations,
            "total_distance_mm": self.total_distance,
            "terminated_by": self.terminated_by,
            "events": dict(self.events),
            "failure": self.failure,
        }


@dataclass(frozen=True)
class SummaryStats:
    avgGbest: float
    stdGbest: float
    avgI: float
    avgTotalD: float
    success_rate: float
    num_runs: int = 0
    num_failed: int = 0


def run_single(config: ExperimentConfig, run_index: int, keep_trajectories: bool = True) -> RunRecord:
    swarm_cfg = replace(config.swarm, seed=run_seed(config.master_seed, run_index))
    fld, world = config.field, config.world
    state = init_swarm(swarm_cfg, fld, world)
    traj = [[(p.position[0], p.position[1], p.cost)] for p in state.particles] if keep_trajectories else []
    while not has_terminated(state, swarm_cfg):
        try:
            state = step(state, swarm_cfg, fld, world)
        except SwarmSeekError as exc:
            raise RunFailed(run_index, state.iteration + 1, exc) from exc
        if keep_trajectories:
            for k, p in enumerate(state.particles):
                traj[k].append((p.position[0], p.position[1], p.cost))
    stagnated = state.stagnation_count >= swarm_cfg.stagnation_window
    return RunRecord(
        run_index=run_index,
        gbest_cost=state.gbest_cost,
        gbest_position=state.gbest_position,
        iterations=state.iteration,
        total_distance=state.total_distance,
        terminated_by=STAGNATION if stagnated else MAX_ITERATIONS,
        trajectories=traj,
        events=dict(state.events),
    )


def _run_chunk(config: ExperimentConfig, indices: Sequence[int], keep_trajectories: bool) -> list:
    out = []
    for i in indices:
        try:
            out.append(run_single(config, i, keep_trajectories))
        except RunFailed as exc:
            out.append(RunRecord(run_index=i, iterations=exc.iteration, failure=str(exc)))
    return out


def run_batch(config: ExperimentConfig, workers: int = 1, keep_trajectories: bool = False) -> list:
    """Run every index in ``range(num_runs)``; failed runs come back as records with ``failure`` set."""
    indices = list(range(config.num_runs))
    if workers is None or workers <= 0:
        workers = os.cpu_count() or 1
    workers = min(workers, len(indices))
    if workers <= 1:
        records = _run_chunk(config, indices, keep_trajectories)
    else:
        # strided chunks spread slow and fast runs evenly
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, config, c, keep_trajectories) for c in chunks]
            records = [r for f in futures for r in f.result()]
    records.sort(key=lambda r: r.run_index)
    failed = sum(not r.ok for r in records)
    if failed:
        log.warning("%d of %d runs failed", failed, len(records))
    return records


def summarize(records: Sequence[RunRecord], success_threshold: float = 28.5) -> SummaryStats:
    good = [r for r in records if r.ok]
    if not good:
        raise EmptyRecords("no completed runs to summarize")
    g = [r.gbest_cost for r in good]
    return SummaryStats(
        avgGbest=statistics.fmean(g),
        stdGbest=statistics.stdev(g) if len(g) > 1 else 0.0,
        avgI=statistics.fmean(r.iterations for r in good),
        avgTotalD=statistics.fmean(r.total_distance for r in good),
        success_rate=sum(c <= success_threshold for c in g) / len(g),
        num_runs=len(good),
        num_failed=len(records) - len(good),
    )


def _fmt(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def summary_row(config: ExperimentConfig, stats: SummaryStats) -> dict:
    v = config.swarm.variant
    row = dict.fromkeys(SUMMARY_COLUMNS, "")
    row.update(set_label=config.label, v_max_mm=float(config.swarm.v_max),
               swarm_size=config.swarm.swarm_size, num_runs=stats.num_runs)
    if isinstance(v, InertiaWeight):
        row.update(variant=v.name, omega1=float(v.omega1), c1=float(v.c1), c2=float(v.c2))
        row["lambda"] = float(v.damping)
        row["topology"] = "full"
    elif isinstance(v, Constriction):
        row.update(variant=v.name, phi=float(v.phi), K=v.K, c1=float(v.c1), c2=float(v.c2), topology="full")
    elif isinstance(v, Spso):
        row.update(variant=v.name, omega1=float(v.omega), c1=float(v.c), c2=float(v.c),
                   topology=v.topology.label)
    row["strategy"] = config.world.static_strategy if config.world is not None else "none"
    row.update(avgGbest=stats.avgGbest, stdGbest=stats.stdGbest, avgI=stats.avgI,
               avgTotalD_mm=stats.avgTotalD, success_rate=stats.success_rate)
    return row


def export_records(records: Sequence[RunRecord], stats: SummaryStats, destination,
                   config: ExperimentConfig | None = None, trajectories: bool = True) -> dict:
    """Write summary, per-run and (optionally) trajectory files; return their paths."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    paths = {"summary": dest / "summary.csv", "runs": dest / "runs.jsonl"}

    row = summary_row(config, stats) if config is not None else {
        "num_runs": stats.num_runs, "avgGbest": stats.avgGbest, "stdGbest": stats.stdGbest,
        "avgI": stats.avgI, "avgTotalD_mm": stats.avgTotalD, "success_rate": stats.success_rate}
    with open(paths["summary"], "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        w.writerow([_fmt(row.get(c, "")) for c in SUMMARY_COLUMNS])

    with open(paths["runs"], "w") as fh:
        for r in records:
            fh.write(json.dumps(r.scalars(), sort_keys=True) + "\n")

    if trajectories and any(r.trajectories for r in records):
        paths["trajectories"] = dest / "trajectories.csv"
        with open(paths["trajectories"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJECTORY_COLUMNS)
            for r in records:
                for k, pts in enumerate(r.trajectories):
                    for it, (x, y, c) in enumerate(pts):
                        w.writerow((r.run_index, it, k, f"{x:.6f}", f"{y:.6f}", f"{c:.6f}"))
    return paths


def read_runs(path) -> list:
    """Parse a ``runs.jsonl`` file back into scalar dictionaries."""
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
