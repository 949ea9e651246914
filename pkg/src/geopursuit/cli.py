"""Batch command line: simulate / check / sweep / rounds.

Exit codes: 0 success, 1 property violation, 2 invalid input,
3 unexpected outcome.  ``PURSUIT_SEED`` supplies the seed when no
``--seed`` flag is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import ConfigError, parse_config
from .core import ValidationError
from .diagnostics import detect_rounds, most_revisited_center
from .engine import Captured, sweep_capture_time
from .engine import run_game
from .presets import PRESET_IDS, preset_document, run_preset
from .properties import (
    check_betweenness,
    check_between_transitivity,
    check_metric_convexity,
    check_ptolemy,
    Quadruple,
    search_ptolemy_violation,
)
from .spaces import (
    ChebyshevDiskSpace,
    CircleSpace,
    EuclideanDiskSpace,
    EuclideanPlaneSpace,
    MetricTreeSpace,
    load_tree_edges,
)
from .strategies import make_evader
from .traceio import (
    append_diag_report,
    read_trace_jsonl,
    write_report_json,
    write_sweep_csv,
    write_trace_csv,
    write_trace_jsonl,
)

_EXIT_OK = 0
_EXIT_VIOLATION = 1
_EXIT_BAD_INPUT = 2
_EXIT_UNEXPECTED = 3


def _default_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("PURSUIT_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValidationError(f"PURSUIT_SEED={env!r} is not an integer")
    return 0


def _space_from_args(args):
    kind = args.space
    if kind in ("euclidean-disk", "disk"):
        return EuclideanDiskSpace(args.radius)
    if kind == "chebyshev-disk":
        return ChebyshevDiskSpace(args.radius)
    if kind == "circle":
        return CircleSpace(args.circumference)
    if kind == "plane":
        return EuclideanPlaneSpace()
    if kind == "tree":
        if not args.edges_file:
            raise ValidationError("--space tree requires --edges-file")
        return MetricTreeSpace(load_tree_edges(args.edges_file))
    raise ValidationError(f"unknown space {kind!r}")


def _cmd_simulate(args) -> int:
    seed = _default_seed(args)
    out_dir = args.out or "out"
    if args.preset:
        result = run_preset(args.preset, out_dir, seed=args.seed,
                            epsilon=args.epsilon,
                            horizon_steps=args.horizon_steps,
                            out_format=args.format)
        print(json.dumps(result.summary, sort_keys=True, indent=2))
        return result.exit_code

    with open(args.config, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if args.epsilon is not None:
        doc.setdefault("game", {})["epsilon"] = args.epsilon
    if args.horizon_steps is not None:
        doc.setdefault("game", {})["horizon_steps"] = args.horizon_steps
    if args.seed is not None:
        doc["seed"] = args.seed
    cfg = parse_config(doc)
    os.makedirs(out_dir, exist_ok=True)
    outcomes = []
    for k, (lion0, man0) in enumerate(cfg.starts):
        trace, outcome = run_game(cfg.space, cfg.game, lion0, man0,
                                  cfg.evader, seed=cfg.seed)
        suffix = "jsonl" if args.format == "jsonl" else "csv"
        path = os.path.join(out_dir, f"trace_{k:03d}.{suffix}")
        if args.format == "jsonl":
            write_trace_jsonl(trace, path)
        else:
            write_trace_csv(trace, path)
        if isinstance(outcome, Captured):
            outcomes.append({"start": k, "outcome": "captured",
                             "t": outcome.t})
        else:
            outcomes.append({"start": k, "outcome": "evaded",
                             "horizon": outcome.horizon})
    print(json.dumps({"outcomes": outcomes, "out": out_dir, "seed": seed},
                     sort_keys=True, indent=2))
    return _EXIT_OK


def _cmd_check(args) -> int:
    seed = _default_seed(args)
    space = _space_from_args(args)
    if args.property == "betweenness":
        report = check_betweenness(space, args.samples, args.tol, seed)
    elif args.property == "transitivity":
        report = check_between_transitivity(space, args.samples, args.tol,
                                            seed)
    elif args.property == "convexity":
        report = check_metric_convexity(space, args.samples, args.tol, seed)
    elif args.property == "ptolemy":
        found = search_ptolemy_violation(space, args.grid_resolution, seed)
        violations = []
        if found is not None:
            violations.append({
                "points": [list(p.coords) for p in found.points],
                "margin": check_ptolemy(space, found),
            })
        report = {
            "property": "ptolemy",
            "space": space.tag,
            "samples": None,
            "tolerance": 1e-9,
            "violations": violations,
            "worst_margin": violations[0]["margin"] if violations else None,
            "metadata": {"grid_resolution": args.grid_resolution,
                         "seed": seed},
        }
    else:
        raise ValidationError(f"unknown property {args.property!r}")

    payload = report if isinstance(report, dict) else report.to_json()
    print(json.dumps(payload, sort_keys=True, indent=2))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_report_json(report,
                          os.path.join(args.out,
                                       f"check_{args.property}.json"),
                          seed=seed)
    return _EXIT_VIOLATION if payload["violations"] else _EXIT_OK


def _cmd_sweep(args) -> int:
    seed = _default_seed(args)
    if args.preset:
        doc = preset_document(args.preset, seed=seed)
    else:
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        doc["seed"] = seed
    cfg = parse_config(doc)
    epsilons = [float(tok) for tok in args.epsilons.split(",") if tok]
    if not epsilons:
        raise ValidationError("--epsilons needs at least one value")
    if args.evaders:
        evaders = [make_evader({"kind": tok}, cfg.space)
                   for tok in args.evaders.split(",") if tok]
    else:
        evaders = [cfg.evader]
    rows = sweep_capture_time(cfg.space, epsilons, evaders,
                              trials=args.trials, seed=seed,
                              horizon_steps=args.horizon_steps)
    out_dir = args.out or "out"
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "sweep.csv")
    write_sweep_csv(rows, path, meta={
        "space": cfg.space.tag,
        "epsilons": epsilons,
        "evaders": [e.kind for e in evaders],
        "trials": args.trials,
        "seed": seed,
    })
    print(json.dumps({
        "rows": len(rows),
        "captured": sum(1 for r in rows if r.outcome == "captured"),
        "evaded": sum(1 for r in rows if r.outcome == "evaded"),
        "csv": path,
    }, sort_keys=True, indent=2))
    return _EXIT_OK


def _cmd_rounds(args) -> int:
    space, trace = read_trace_jsonl(args.trace)
    radius = args.radius
    if radius is None:
        radius = trace.config.epsilon / 3.0
    center = most_revisited_center(space, trace, radius)
    records = detect_rounds(space, trace, center, radius)
    payload = {
        "check": "rounds",
        "trace": os.path.basename(args.trace),
        "radius": radius,
        "center": [list(center[0].coords), list(center[1].coords)],
        "rounds": [r.to_json() for r in records],
    }
    sidecar = append_diag_report(args.trace, payload)
    print(json.dumps({"rounds": len(records), "sidecar": sidecar},
                     sort_keys=True, indent=2))
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geopursuit",
        description="pursuit-evasion games on geodesic metric spaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one experiment or preset")
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="experiment config JSON path")
    group.add_argument("--preset", choices=PRESET_IDS)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--epsilon", type=float)
    sim.add_argument("--horizon-steps", type=int, dest="horizon_steps")
    sim.add_argument("--out")
    sim.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sim.set_defaults(func=_cmd_simulate)

    chk = sub.add_parser("check", help="run a property checker on a space")
    chk.add_argument("--space", required=True,
                     choices=("euclidean-disk", "disk", "chebyshev-disk",
                              "circle", "tree", "plane"))
    chk.add_argument("--radius", type=float, default=1.0)
    chk.add_argument("--circumference", type=float, default=1.0)
    chk.add_argument("--edges-file", dest="edges_file")
    chk.add_argument("--property", required=True,
                     choices=("betweenness", "transitivity", "convexity",
                              "ptolemy"))
    chk.add_argument("--samples", type=int, default=20000)
    chk.add_argument("--tol", type=float, default=1e-7)
    chk.add_argument("--grid-resolution", type=int, default=8,
                     dest="grid_resolution")
    chk.add_argument("--seed", type=int)
    chk.add_argument("--out")
    chk.set_defaults(func=_cmd_check)

    swp = sub.add_parser("sweep", help="capture-time grid over epsilons")
    group = swp.add_mutually_exclusive_group(required=True)
    group.add_argument("--config")
    group.add_argument("--preset", choices=PRESET_IDS)
    swp.add_argument("--epsilons", required=True,
                     help="comma-separated list, e.g. 0.2,0.1,0.05")
    swp.add_argument("--evaders",
                     help="comma-separated evader kinds (default: preset's)")
    swp.add_argument("--trials", type=int, default=5)
    swp.add_argument("--horizon-steps", type=int, dest="horizon_steps")
    swp.add_argument("--seed", type=int)
    swp.add_argument("--out")
    swp.set_defaults(func=_cmd_sweep)

    rnd = sub.add_parser("rounds", help="detect rounds in a stored trace")
    rnd.add_argument("--trace", required=True)
    rnd.add_argument("--radius", type=float)
    rnd.add_argument("--seed", type=int)
    rnd.set_defaults(func=_cmd_rounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for line in exc.errors:
            print(f"config error: {line}", file=sys.stderr)
        return _EXIT_BAD_INPUT
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_BAD_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
