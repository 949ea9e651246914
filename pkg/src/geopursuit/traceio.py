"""File formats: JSONL traces, CSV sweeps, JSON reports, diag sidecars.

Every artifact is self-describing (header with the config hash and seed)
and written whole-file atomically (temp file, then rename).  Outputs are
byte-identical across reruns with the same inputs: no timestamps, sorted
keys, and floats serialized by their shortest round-trip repr.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Optional

import numpy as np

from .core import SpaceDescriptor, ValidationError
from .engine import GameConfig, Moment, Trace
from .spaces import make_space

__all__ = [
    "atomic_write_text",
    "canonical_json",
    "config_hash",
    "descriptor_to_json",
    "descriptor_from_json",
    "write_trace_jsonl",
    "read_trace_jsonl",
    "write_trace_csv",
    "write_sweep_csv",
    "write_report_json",
    "append_diag_report",
    "read_diag_reports",
]

SCHEMA_VERSION = 1


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(payload: dict) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


def descriptor_to_json(desc: SpaceDescriptor) -> dict:
    return {
        "kind": desc.kind,
        "parameters": desc.parameters,
        "compact": desc.compact,
        "diameter_bound": desc.diameter_bound,
    }


def descriptor_from_json(data: dict) -> SpaceDescriptor:
    return SpaceDescriptor(data["kind"], data["parameters"],
                           data["compact"], data["diameter_bound"])


def trace_header(trace: Trace) -> dict:
    core = {
        "space": descriptor_to_json(trace.space),
        "config": trace.config.to_json(),
        "evader": trace.meta.get("evader"),
        "seed": trace.meta.get("seed"),
    }
    header = {"record": "header", "schema": SCHEMA_VERSION}
    header.update(core)
    header["config_hash"] = config_hash(core)
    for key in ("lion0", "man0", "outcome", "outcome_time"):
        if key in trace.meta:
            header[key] = trace.meta[key]
    return header


def write_trace_jsonl(trace: Trace, path) -> None:
    lines = [canonical_json(trace_header(trace))]
    for k in range(trace.n_samples):
        lines.append(canonical_json({
            "t": float(trace.times[k]),
            "L": [float(c) for c in trace.lion_rows[k]],
            "M": [float(c) for c in trace.man_rows[k]],
            "d": float(trace.dist[k]),
        }))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_trace_jsonl(path):
    """Rebuild (space, trace) from a JSONL trace file."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line]
    if not lines:
        raise ValidationError(f"{path}: empty trace file")
    header = json.loads(lines[0])
    if header.get("record") != "header":
        raise ValidationError(f"{path}: missing header record")
    descriptor = descriptor_from_json(header["space"])
    space = make_space(descriptor)
    config = GameConfig(**header["config"])

    rows = [json.loads(line) for line in lines[1:]]
    times = np.array([r["t"] for r in rows])
    lion_rows = np.array([r["L"] for r in rows])
    man_rows = np.array([r["M"] for r in rows])
    dist = np.array([r["d"] for r in rows])

    n = config.substeps_per_interval
    moments = []
    for k in range(0, len(rows), n):
        moments.append(Moment(float(times[k]),
                              space.from_coords(lion_rows[k]),
                              space.from_coords(man_rows[k])))
    meta = {key: header[key]
            for key in ("evader", "seed", "lion0", "man0", "outcome",
                        "outcome_time")
            if key in header}
    trace = Trace(space=space.descriptor(), config=config, moments=moments,
                  times=times, lion_rows=lion_rows, man_rows=man_rows,
                  dist=dist, meta=meta)
    return space, trace


def write_trace_csv(trace: Trace, path) -> None:
    """CSV variant of the trace samples; the self-describing header goes
    to a ``<path>.meta.json`` sidecar."""
    dim = trace.lion_rows.shape[1]
    cols = (["t"] + [f"L{i}" for i in range(dim)]
            + [f"M{i}" for i in range(dim)] + ["d"])
    lines = [",".join(cols)]
    for k in range(trace.n_samples):
        row = ([repr(float(trace.times[k]))]
               + [repr(float(c)) for c in trace.lion_rows[k]]
               + [repr(float(c)) for c in trace.man_rows[k]]
               + [repr(float(trace.dist[k]))])
        lines.append(",".join(row))
    atomic_write_text(path, "\n".join(lines) + "\n")
    atomic_write_text(os.fspath(path) + ".meta.json",
                      json.dumps(trace_header(trace), sort_keys=True,
                                 indent=2) + "\n")


def write_sweep_csv(rows, path, meta: Optional[dict] = None) -> None:
    lines = ["epsilon,evader,trial,outcome,capture_time"]
    for row in rows:
        capture = "" if row.capture_time is None else repr(row.capture_time)
        lines.append(f"{row.epsilon!r},{row.evader},{row.trial},"
                     f"{row.outcome},{capture}")
    atomic_write_text(path, "\n".join(lines) + "\n")
    if meta is not None:
        payload = dict(meta)
        payload["config_hash"] = config_hash(meta)
        atomic_write_text(os.fspath(path) + ".meta.json",
                          json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_report_json(report, path, seed: Optional[int] = None) -> None:
    payload = report.to_json() if hasattr(report, "to_json") else dict(report)
    payload["schema"] = SCHEMA_VERSION
    if seed is not None:
        payload.setdefault("seed", seed)
    payload["config_hash"] = config_hash(
        {k: v for k, v in payload.items() if k != "config_hash"})
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def append_diag_report(trace_path, report: dict) -> str:
    """Append a diagnostic record to the trace's sidecar file
    (``<trace>.diag.json``, a JSON list)."""
    sidecar = os.fspath(trace_path) + ".diag.json"
    if os.path.exists(sidecar):
        with open(sidecar, "r", encoding="utf-8") as fh:
            existing = json.load(fh)
    else:
        existing = []
    existing.append(report)
    atomic_write_text(sidecar, json.dumps(existing, sort_keys=True,
                                          indent=2) + "\n")
    return sidecar


def read_diag_reports(trace_path) -> list:
    sidecar = os.fspath(trace_path) + ".diag.json"
    with open(sidecar, "r", encoding="utf-8") as fh:
        return json.load(fh)
