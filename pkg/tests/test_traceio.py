import json

import numpy as np
import pytest

import geopursuit as gp
from geopursuit import traceio


@pytest.fixture
def sample_trace(disk):
    cfg = gp.GameConfig(0.1, 30, 0.01)
    trace, _ = gp.run_game(disk, cfg, disk.point(-0.5, 0),
                           disk.point(0.5, 0), gp.GreedyMaxDistance(8),
                           seed=11)
    return trace


def test_jsonl_roundtrip_bitwise(tmp_path, disk, sample_trace):
    path = tmp_path / "trace.jsonl"
    traceio.write_trace_jsonl(sample_trace, path)
    space, back = traceio.read_trace_jsonl(path)
    assert space.tag == disk.tag
    assert np.array_equal(back.times, sample_trace.times)
    assert np.array_equal(back.lion_rows, sample_trace.lion_rows)
    assert np.array_equal(back.man_rows, sample_trace.man_rows)
    assert np.array_equal(back.dist, sample_trace.dist)
    assert len(back.moments) == len(sample_trace.moments)
    for a, b in zip(back.moments, sample_trace.moments):
        assert a.t == b.t
        assert a.lion.coords == b.lion.coords
        assert a.man.coords == b.man.coords


def test_jsonl_header_is_self_describing(tmp_path, sample_trace):
    path = tmp_path / "trace.jsonl"
    traceio.write_trace_jsonl(sample_trace, path)
    header = json.loads(path.read_text().splitlines()[0])
    assert header["record"] == "header"
    assert header["seed"] == 11
    assert "config_hash" in header
    assert header["space"]["kind"] == "euclidean-disk"
    assert header["evader"]["kind"] == "greedy_max_distance"
    row = json.loads(path.read_text().splitlines()[1])
    assert set(row) == {"t", "L", "M", "d"}


def test_rewrite_is_byte_identical(tmp_path, sample_trace):
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    traceio.write_trace_jsonl(sample_trace, p1)
    traceio.write_trace_jsonl(sample_trace, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_tree_trace_roundtrip(tmp_path, tree):
    cfg = gp.GameConfig.with_defaults(tree, 0.1)
    rng = np.random.default_rng(3)
    lion0, man0 = gp.random_start_pair(tree, rng, 0.1)
    trace, _ = gp.run_game(tree, cfg, lion0, man0, gp.RadialFlee(), seed=3)
    path = tmp_path / "tree.jsonl"
    traceio.write_trace_jsonl(trace, path)
    space, back = traceio.read_trace_jsonl(path)
    assert space.tag == tree.tag
    assert np.array_equal(back.lion_rows, trace.lion_rows)


def test_csv_trace_with_meta_sidecar(tmp_path, sample_trace):
    path = tmp_path / "trace.csv"
    traceio.write_trace_csv(sample_trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,L0,L1,M0,M1,d"
    assert len(lines) == sample_trace.n_samples + 1
    meta = json.loads((tmp_path / "trace.csv.meta.json").read_text())
    assert meta["record"] == "header"


def test_sweep_csv_format(tmp_path, disk):
    rows = gp.sweep_capture_time(disk, [0.2], [gp.Stationary()], trials=2,
                                 seed=0)
    path = tmp_path / "sweep.csv"
    traceio.write_sweep_csv(rows, path, meta={"seed": 0})
    lines = path.read_text().splitlines()
    assert lines[0] == "epsilon,evader,trial,outcome,capture_time"
    assert len(lines) == 3
    for line in lines[1:]:
        eps, evader, trial, outcome, t = line.split(",")
        assert outcome == "captured"
        assert float(t) > 0


def test_diag_sidecar_appends(tmp_path, sample_trace):
    path = tmp_path / "trace.jsonl"
    traceio.write_trace_jsonl(sample_trace, path)
    traceio.append_diag_report(path, {"check": "one"})
    sidecar = traceio.append_diag_report(path, {"check": "two"})
    assert sidecar.endswith("trace.jsonl.diag.json")
    reports = traceio.read_diag_reports(path)
    assert [r["check"] for r in reports] == ["one", "two"]


def test_report_json_written_with_hash_and_seed(tmp_path, circle):
    report = gp.check_betweenness(circle, 500, 1e-7, seed=2)
    path = tmp_path / "report.json"
    traceio.write_report_json(report, path, seed=2)
    payload = json.loads(path.read_text())
    assert payload["property"] == "betweenness"
    assert payload["seed"] == 2
    assert "config_hash" in payload


def test_atomic_write_replaces_whole_file(tmp_path):
    path = tmp_path / "x.txt"
    traceio.atomic_write_text(path, "first")
    traceio.atomic_write_text(path, "second")
    assert path.read_text() == "second"
    assert list(tmp_path.iterdir()) == [path]


def test_read_rejects_garbage(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("")
    with pytest.raises(gp.ValidationError):
        traceio.read_trace_jsonl(path)
    path.write_text('{"record": "not-header"}\n')
    with pytest.raises(gp.ValidationError):
        traceio.read_trace_jsonl(path)
