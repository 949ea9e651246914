"""Scenario presets: the classic desk-scale games, bound to expected
outcome classes so a preset run doubles as a regression check.

* ``example2_disk`` / ``example3_chebyshev`` / ``tree_cat0`` -- compact
  carriers where the pursuit must capture;
* ``example1_plane`` -- the unbounded plane, where fleeing radially
  escapes forever;
* ``circle_counterexample`` -- the circle, compact but without the
  betweenness property: a runner holds the distance constant.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .config import ExperimentConfig, parse_config
from .core import ValidationError
from .diagnostics import check_distance_monotone, validate_good_curve
from .engine import Captured, Evaded, run_game
from .traceio import append_diag_report, atomic_write_text, config_hash, \
    write_trace_csv, write_trace_jsonl

__all__ = ["PRESET_IDS", "preset_document", "run_preset", "PresetResult",
           "DEMO_TREE_EDGES"]

# a fixed 10-edge tree used by the tree preset and the test grids
DEMO_TREE_EDGES = [
    ["a", "b", 0.5],
    ["b", "c", 0.4],
    ["c", "d", 0.6],
    ["b", "e", 0.7],
    ["e", "f", 0.3],
    ["c", "g", 0.5],
    ["g", "h", 0.4],
    ["d", "i", 0.8],
    ["a", "j", 0.6],
    ["g", "k", 0.35],
]


def _doc(space, game, evader, starts, seed=0):
    return {"schema": 1, "space": space, "game": game, "evader": evader,
            "starts": starts, "seed": seed}


_PRESETS = {
    "example1_plane": {
        "document": _doc(
            {"kind": "plane"},
            {"epsilon": 0.1, "horizon_steps": 1000},
            {"kind": "radial_flee"},
            {"pairs": [[[0.0, 0.0], [1.0, 0.0]],
                       [[0.5, -0.5], [-0.25, 0.75]]]},
        ),
        "expect": "escape_all",
    },
    "example2_disk": {
        "document": _doc(
            {"kind": "euclidean-disk", "radius": 1.0},
            {"epsilon": 0.1},
            {"kind": "greedy_max_distance", "k": 32},
            {"random": 3},
        ),
        "expect": "capture_all",
    },
    "example3_chebyshev": {
        "document": _doc(
            {"kind": "chebyshev-disk", "radius": 1.0},
            {"epsilon": 0.1},
            {"kind": "greedy_max_distance", "k": 32},
            {"random": 3},
        ),
        "expect": "capture_all",
    },
    "circle_counterexample": {
        "document": _doc(
            {"kind": "circle", "circumference": 1.0},
            {"epsilon": 0.05, "horizon_steps": 1000},
            {"kind": "circle_runner", "orientation": 1},
            {"pairs": [[[0.0], [0.4]]]},
        ),
        "expect": "escape_constant_distance",
    },
    "tree_cat0": {
        "document": _doc(
            {"kind": "tree", "edges": DEMO_TREE_EDGES},
            {"epsilon": 0.1},
            {"kind": "greedy_max_distance", "k": 32},
            {"random": 3},
        ),
        "expect": "capture_all",
    },
}

PRESET_IDS = tuple(sorted(_PRESETS))


def preset_document(preset_id: str, seed: Optional[int] = None,
                    epsilon: Optional[float] = None,
                    horizon_steps: Optional[int] = None) -> dict:
    if preset_id not in _PRESETS:
        raise ValidationError(
            f"unknown preset {preset_id!r}; choose from {', '.join(PRESET_IDS)}"
        )
    doc = json.loads(json.dumps(_PRESETS[preset_id]["document"]))
    if seed is not None:
        doc["seed"] = seed
    if epsilon is not None:
        doc["game"]["epsilon"] = epsilon
    if horizon_steps is not None:
        doc["game"]["horizon_steps"] = horizon_steps
    return doc


@dataclass
class PresetResult:
    preset: str
    expect: str
    exit_code: int
    outcomes: list[str]
    files: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def run_preset(preset_id: str, out_dir, seed: Optional[int] = None,
               epsilon: Optional[float] = None,
               horizon_steps: Optional[int] = None,
               out_format: str = "jsonl") -> PresetResult:
    """Run a preset's experiment, write traces + diagnostics + summary,
    and judge the observed outcome class against the expected one
    (exit 0 on match, 3 otherwise)."""
    doc = preset_document(preset_id, seed=seed, epsilon=epsilon,
                          horizon_steps=horizon_steps)
    expect = _PRESETS[preset_id]["expect"]
    cfg: ExperimentConfig = parse_config(doc)
    os.makedirs(out_dir, exist_ok=True)

    outcomes = []
    files = []
    constant_ok = True
    for k, (lion0, man0) in enumerate(cfg.starts):
        trace, outcome = run_game(cfg.space, cfg.game, lion0, man0,
                                  cfg.evader, seed=cfg.seed)
        captured = isinstance(outcome, Captured)
        outcomes.append("captured" if captured else "evaded")

        name = f"trace_{k:03d}.{'jsonl' if out_format == 'jsonl' else 'csv'}"
        trace_path = os.path.join(out_dir, name)
        if out_format == "jsonl":
            write_trace_jsonl(trace, trace_path)
        else:
            write_trace_csv(trace, trace_path)
        files.append(trace_path)

        monotone = check_distance_monotone(trace, tol=1e-9)
        diag = {"trace": name, "distance_monotone": monotone.to_json()}
        if len(trace.moments) >= 1:
            eps = cfg.game.epsilon
            d_moments = trace.moment_distances()
            last = 0
            while (last + 1 < len(trace.moments)
                   and d_moments[last + 1] >= eps):
                last += 1
            report = validate_good_curve(
                cfg.space, trace,
                (trace.moments[0].t, trace.moments[last].t), tol=1e-7)
            diag["good_curve"] = report.to_json()
        if expect == "escape_constant_distance":
            d_moments = trace.moment_distances()
            spread = float(abs(d_moments - d_moments[0]).max())
            diag["moment_distance_spread"] = spread
            constant_ok = constant_ok and spread <= 1e-9
        files.append(append_diag_report(trace_path, diag))

    if expect == "capture_all":
        ok = all(o == "captured" for o in outcomes)
    elif expect == "escape_all":
        ok = all(o == "evaded" for o in outcomes)
    else:  # escape_constant_distance
        ok = all(o == "evaded" for o in outcomes) and constant_ok

    summary = {
        "preset": preset_id,
        "expect": expect,
        "outcomes": outcomes,
        "ok": ok,
        "seed": cfg.seed,
        "config": doc,
        "config_hash": config_hash(doc),
    }
    summary_path = os.path.join(out_dir, "summary.json")
    atomic_write_text(summary_path,
                      json.dumps(summary, sort_keys=True, indent=2) + "\n")
    files.append(summary_path)
    return PresetResult(preset=preset_id, expect=expect,
                        exit_code=0 if ok else 3, outcomes=outcomes,
                        files=files, summary=summary)
