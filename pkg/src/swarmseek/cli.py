"""
Command-line entry point.

    swarmseek run    [--config FILE] [--out DIR] [--seed N] [--run-index I]
    swarmseek batch  [--config FILE] [--out DIR] [--seed N] [--runs N] [--workers W] [--trajectories]
    swarmseek field  [--config FILE] [--out DIR] [--resolution MM]
    swarmseek plan   [--world FILE | --config FILE] --start X,Y --goal X,Y [--out DIR]

The output directory defaults to ``$SWARMSEEK_OUT`` and then ``./swarmseek_out``;
``--out`` and ``experiment.output_dir`` take precedence in that order.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

from . import config as cfgmod
from .errors import GoalInsideObstacle, InvalidConfig, NoPath, RunFailed, StartInsideObstacle, SwarmSeekError
from .geometry import Point, build_visibility_graph, shortest_path
from .harness import SUMMARY_COLUMNS, export_records, run_batch, run_single, summarize, summary_row, _fmt

ENV_OUT = "SWARMSEEK_OUT"
DEFAULT_OUT = "swarmseek_out"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_PARTIAL = 3

log = logging.getLogger("swarmseek")


def _point(text: str) -> Point:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y but got {text!r}") from None
    return Point(x, y)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML configuration file")
    common.add_argument("--out", type=Path, help=f"output directory (default ${ENV_OUT} or ./{DEFAULT_OUT})")
    common.add_argument("--seed", type=int, help="master seed (experiment.master_seed)")
    common.add_argument("--runs", type=int, help="number of runs (experiment.num_runs)")
    common.add_argument("--quiet", action="store_true", default=None, help="only print errors")

    p = argparse.ArgumentParser(prog="swarmseek", description="Swarm source-seeking simulator")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", parents=[common], help="one seeded run with trajectories")
    r.add_argument("--run-index", type=int, default=0)

    b = sub.add_parser("batch", parents=[common], help="Monte Carlo batch with summary statistics")
    b.add_argument("--workers", type=int, help="worker processes, 0 = all CPUs (experiment.workers)")
    b.add_argument("--trajectories", action="store_true", default=None,
                   help="also write trajectories.csv (experiment.trajectories)")

    f = sub.add_parser("field", parents=[common], help="export the RSSI map as CSV")
    f.add_argument("--resolution", type=float, help="lattice spacing in mm (experiment.field_resolution_mm)")

    pl = sub.add_parser("plan", parents=[common], help="visibility graph and shortest path for one move")
    pl.add_argument("--world", type=Path, help="YAML file with a world section (defaults to --config)")
    pl.add_argument("--start", type=_point, required=True, metavar="X,Y")
    pl.add_argument("--goal", type=_point, required=True, metavar="X,Y")
    return p


def _overrides(args) -> dict:
    o = {
        "experiment.master_seed": args.seed,
        "experiment.num_runs": args.runs,
        "experiment.quiet": args.quiet,
        "experiment.output_dir": str(args.out) if args.out else None,
    }
    if args.command == "batch":
        o["experiment.workers"] = args.workers
        o["experiment.trajectories"] = args.trajectories
    if args.command == "field":
        o["experiment.field_resolution_mm"] = args.resolution
    return o


def _out_dir(resolved: dict) -> Path:
    d = resolved["experiment"]["output_dir"] or os.environ.get(ENV_OUT) or DEFAULT_OUT
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _say(quiet: bool, *a) -> None:
    if not quiet:
        print(*a)


def cmd_run(args, loaded) -> int:
    exp, res = loaded.experiment, loaded.resolved
    out = _out_dir(res)
    cfgmod.dump(res, out / "effective_config.yaml")
    try:
        rec = run_single(exp, args.run_index, keep_trajectories=True)
    except RunFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    export_records([rec], summarize([rec], exp.success_threshold), out, exp, trajectories=True)
    q = res["experiment"]["quiet"]
    _say(q, f"gbest_cost {rec.gbest_cost:.6f} at ({rec.gbest_position[0]:.3f}, {rec.gbest_position[1]:.3f}) mm")
    _say(q, f"iterations {rec.iterations} ({rec.terminated_by}), total distance {rec.total_distance:.3f} mm")
    return EXIT_OK


def cmd_batch(args, loaded) -> int:
    exp, res = loaded.experiment, loaded.resolved
    e = res["experiment"]
    out = _out_dir(res)
    cfgmod.dump(res, out / "effective_config.yaml")
    if exp.world is not None:
        for w in exp.world.warnings():
            log.warning("world: %s", w)
    records = run_batch(exp, workers=e["workers"], keep_trajectories=e["trajectories"])
    failed = [r for r in records if not r.ok]
    stats = summarize(records, exp.success_threshold)
    export_records(records, stats, out, exp, trajectories=e["trajectories"])
    row = summary_row(exp, stats)
    _say(e["quiet"], ",".join(SUMMARY_COLUMNS))
    _say(e["quiet"], ",".join(_fmt(row[c]) for c in SUMMARY_COLUMNS))
    if failed:
        print(f"warning: {len(failed)} of {len(records)} runs failed (see runs.jsonl)", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_field_export(args, loaded) -> int:
    res = loaded.resolved
    fld = loaded.experiment.field
    step = float(res["experiment"]["field_resolution_mm"])
    out = _out_dir(res)
    cfgmod.dump(res, out / "effective_config.yaml")
    a = fld.arena
    nx = int(round(a.width / step)) + 1
    ny = int(round(a.height / step)) + 1
    path = out / "field.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x_mm", "y_mm", "rssi_dbm"))
        for i in range(nx):
            x = min(a.xmin + i * step, a.xmax)
            for j in range(ny):
                y = min(a.ymin + j * step, a.ymax)
                w.writerow((f"{x:.3f}", f"{y:.3f}", f"{fld.sample((x, y)):.6f}"))
    _say(res["experiment"]["quiet"], f"wrote {nx * ny} samples to {path}")
    return EXIT_OK


def cmd_plan(args, loaded) -> int:
    res = loaded.resolved
    if args.world is not None:
        res = cfgmod.load(args.world).resolved
    world = cfgmod.build_world(res)
    obstacles = world.clearance if world is not None else ()
    out = _out_dir(loaded.resolved)
    try:
        g = build_visibility_graph(args.start, args.goal, obstacles)
        path = shortest_path(g, 0, 1)
    except (StartInsideObstacle, GoalInsideObstacle, NoPath) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    g.write_csv(out / "plan.csv", path)
    q = loaded.resolved["experiment"]["quiet"]
    _say(q, f"path length {path.length:.3f} mm via {len(path.waypoints)} waypoints")
    for p in path.waypoints:
        _say(q, f"  {p[0]:.3f},{p[1]:.3f}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "batch": cmd_batch, "field": cmd_field_export, "plan": cmd_plan}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        loaded = cfgmod.load(args.config, _overrides(args))
        return COMMANDS[args.command](args, loaded)
    except InvalidConfig as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SwarmSeekError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
