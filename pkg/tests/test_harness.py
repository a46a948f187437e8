import csv

import pytest

from swarmseek.errors import EmptyRecords
from swarmseek.field import SignalField
from swarmseek.geometry import Point, Rect
from swarmseek.harness import (
    MAX_ITERATIONS,
    STAGNATION,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    RunRecord,
    export_records,
    read_runs,
    run_batch,
    run_single,
    summarize,
)
from swarmseek.swarm import InertiaWeight, SwarmConfig

FIELD = SignalField(Rect(0, 0, 5000, 5000))


def config(**kw):
    kw.setdefault("num_runs", 6)
    return ExperimentConfig(FIELD, SwarmConfig(InertiaWeight()), master_seed=7, **kw)


def rec(cost, i=0, it=10, d=100.0):
    return RunRecord(i, cost, Point(0, 0), it, d, STAGNATION)


def test_summarize_examples():
    s = summarize([rec(28), rec(29), rec(30)], 28.5)
    assert s.avgGbest == 29
    assert s.stdGbest == 1
    assert s.success_rate == pytest.approx(1 / 3)
    assert summarize([rec(28)] * 4).stdGbest == 0
    assert summarize([rec(31)]).stdGbest == 0
    with pytest.raises(EmptyRecords):
        summarize([])


def test_summarize_skips_failures():
    bad = RunRecord(3, failure="boom")
    s = summarize([rec(28), bad, rec(30)])
    assert s.avgGbest == 29 and s.num_failed == 1 and s.num_runs == 2


def test_run_single_determinism_and_fields():
    cfg = config()
    a = run_single(cfg, 3)
    b = run_single(cfg, 3)
    assert a == b
    assert a.iterations <= cfg.swarm.max_iterations
    assert a.total_distance >= 0
    assert a.terminated_by in (STAGNATION, MAX_ITERATIONS)
    assert len(a.trajectories) == cfg.swarm.swarm_size
    assert all(len(t) == a.iterations + 1 for t in a.trajectories)
    assert a.gbest_cost == min(c for t in a.trajectories for _, _, c in t)
    assert run_single(cfg, 4).gbest_cost != a.gbest_cost


def test_batch_singleton_and_order():
    assert len(run_batch(config(num_runs=1))) == 1
    recs = run_batch(config())
    assert [r.run_index for r in recs] == list(range(6))


def test_parallel_matches_serial():
    cfg = config(num_runs=5)
    serial = run_batch(cfg, workers=1, keep_trajectories=True)
    parallel = run_batch(cfg, workers=2, keep_trajectories=True)
    assert serial == parallel


def test_export_roundtrip(tmp_path):
    cfg = config(label="set2")
    recs = run_batch(cfg, keep_trajectories=True)
    stats = summarize(recs)
    paths = export_records(recs, stats, tmp_path, cfg)

    with open(paths["summary"]) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1 and tuple(rows[0]) == SUMMARY_COLUMNS
    assert rows[0]["set_label"] == "set2" and rows[0]["variant"] == "inertia"
    assert float(rows[0]["avgGbest"]) == pytest.approx(stats.avgGbest, abs=1e-6)

    parsed = read_runs(paths["runs"])
    for r, line in zip(recs, parsed):
        assert line["gbest_cost"] == r.gbest_cost
        assert (line["gbest_x_mm"], line["gbest_y_mm"]) == tuple(r.gbest_position)
        assert line["iterations"] == r.iterations
        assert line["total_distance_mm"] == r.total_distance
    again = summarize([RunRecord(p["run_index"], p["gbest_cost"], Point(p["gbest_x_mm"], p["gbest_y_mm"]),
                                 p["iterations"], p["total_distance_mm"], p["terminated_by"]) for p in parsed])
    assert again.avgGbest == pytest.approx(stats.avgGbest, abs=1e-9)
    assert again.avgTotalD == pytest.approx(stats.avgTotalD, abs=1e-9)

    with open(paths["trajectories"]) as fh:
        traj = list(csv.DictReader(fh))
    assert len(traj) == sum((r.iterations + 1) * cfg.swarm.swarm_size for r in recs)
    for r in recs:
        costs = [float(t["cost"]) for t in traj if int(t["run"]) == r.run_index]
        assert min(costs) == pytest.approx(r.gbest_cost, abs=1e-6)


def test_export_is_byte_stable(tmp_path):
    cfg = config(num_runs=3)
    outs = []
    for name in ("a", "b"):
        recs = run_batch(cfg, keep_trajectories=True)
        paths = export_records(recs, summarize(recs), tmp_path / name, cfg)
        outs.append({k: p.read_bytes() for k, p in paths.items()})
    assert outs[0] == outs[1]


def test_num_runs_validation():
    from swarmseek.errors import InvalidConfig
    with pytest.raises(InvalidConfig):
        config(num_runs=0)
