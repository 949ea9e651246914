"""Experiment configuration: strict JSON schema with path-tagged errors.

Unknown keys are rejected so typos fail loudly; all problems found in a
document are collected and reported together.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Point, Space, ValidationError
from .engine import GameConfig, default_horizon_steps, random_start_pair
from .spaces import load_tree_edges, make_space
from .strategies import EvaderStrategy, make_evader
from .core import SpaceDescriptor

__all__ = ["ConfigError", "ExperimentConfig", "parse_config"]

SCHEMA_VERSION = 1


class ConfigError(ValidationError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ExperimentConfig:
    space: Space
    game: GameConfig
    evader: EvaderStrategy
    starts: list[tuple[Point, Point]]
    seed: int
    out_dir: Optional[str]
    out_format: str
    raw: dict = field(default_factory=dict)

    def header_payload(self) -> dict:
        return {"schema": SCHEMA_VERSION, "config": self.raw}


_SPACE_KEYS = {
    "euclidean-disk": {"radius"},
    "chebyshev-disk": {"radius"},
    "circle": {"circumference", "tie_break"},
    "tree": {"edges", "edges_file"},
    "plane": set(),
}
_SPACE_ALIASES = {"disk": "euclidean-disk"}


def _check_keys(obj: dict, allowed: set, path: str, errors: list[str]) -> None:
    for key in obj:
        if key not in allowed:
            errors.append(f"{path}.{key}: unknown key")


def _get_number(obj, key, path, errors, required=False, default=None):
    if key not in obj:
        if required:
            errors.append(f"{path}.{key}: required")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{path}.{key}: expected a number, got {value!r}")
        return default
    return value


def parse_config(document) -> ExperimentConfig:
    """Validate a configuration document (JSON text or an already-parsed
    dict) and build the experiment objects; raises ConfigError carrying
    every schema problem found, each tagged with its JSON path."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"$: not valid JSON ({exc})"]) from None
    else:
        data = document
    if not isinstance(data, dict):
        raise ConfigError(["$: expected a JSON object"])

    errors: list[str] = []
    _check_keys(data, {"schema", "space", "game", "evader", "starts",
                       "seed", "outputs"}, "$", errors)

    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        errors.append(f"$.schema: unsupported version {schema!r}")

    # -- space ---------------------------------------------------------
    space = None
    space_doc = data.get("space")
    if not isinstance(space_doc, dict):
        errors.append("$.space: required object")
    else:
        kind = space_doc.get("kind")
        kind = _SPACE_ALIASES.get(kind, kind)
        if kind not in _SPACE_KEYS:
            errors.append(f"$.space.kind: unknown space kind {kind!r}")
        else:
            _check_keys(space_doc, _SPACE_KEYS[kind] | {"kind"},
                        "$.space", errors)
            params = {k: v for k, v in space_doc.items() if k != "kind"}
            if kind == "tree" and "edges_file" in params:
                try:
                    params = {"edges": load_tree_edges(params["edges_file"])}
                except (OSError, ValidationError) as exc:
                    errors.append(f"$.space.edges_file: {exc}")
                    params = None
            if params is not None and not errors:
                try:
                    space = make_space(SpaceDescriptor(kind, params, True, None))
                except ValidationError as exc:
                    errors.append(f"$.space: {exc}")

    # -- game ----------------------------------------------------------
    game = None
    game_doc = data.get("game")
    if not isinstance(game_doc, dict):
        errors.append("$.game: required object")
    else:
        _check_keys(game_doc, {"epsilon", "substep", "horizon_steps",
                               "capture_tol"}, "$.game", errors)
        epsilon = _get_number(game_doc, "epsilon", "$.game", errors,
                              required=True)
        if epsilon is not None and epsilon <= 0:
            errors.append("$.game.epsilon: epsilon must be positive")
            epsilon = None
        substep = _get_number(game_doc, "substep", "$.game", errors)
        horizon = game_doc.get("horizon_steps")
        if horizon is not None and (isinstance(horizon, bool)
                                    or not isinstance(horizon, int)):
            errors.append("$.game.horizon_steps: expected an integer")
            horizon = None
        capture_tol = _get_number(game_doc, "capture_tol", "$.game", errors,
                                  default=0.0)
        if epsilon is not None and space is not None:
            bound = space.diameter_bound
            if bound is not None and not epsilon < bound:
                errors.append(
                    "$.game.epsilon: must be below the space diameter "
                    f"bound {bound}"
                )
            else:
                try:
                    game = GameConfig.with_defaults(
                        space, float(epsilon),
                        horizon_steps=horizon,
                        substep=None if substep is None else float(substep),
                        capture_tol=float(capture_tol),
                    )
                except ValidationError as exc:
                    errors.append(f"$.game: {exc}")

    # -- evader --------------------------------------------------------
    evader = None
    evader_doc = data.get("evader")
    if not isinstance(evader_doc, dict):
        errors.append("$.evader: required object")
    elif space is not None:
        try:
            evader = make_evader(evader_doc, space)
        except (ValidationError, KeyError, TypeError) as exc:
            errors.append(f"$.evader: {exc}")

    # -- starts --------------------------------------------------------
    starts: list[tuple[Point, Point]] = []
    starts_doc = data.get("starts")
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        errors.append(f"$.seed: expected a non-negative integer, got {seed!r}")
        seed = 0
    if not isinstance(starts_doc, dict):
        errors.append("$.starts: required object "
                      "({'random': n} or {'pairs': [...]})")
    else:
        _check_keys(starts_doc, {"random", "pairs"}, "$.starts", errors)
        if ("random" in starts_doc) == ("pairs" in starts_doc):
            errors.append("$.starts: exactly one of 'random'/'pairs'")
        elif "random" in starts_doc:
            count = starts_doc["random"]
            if isinstance(count, bool) or not isinstance(count, int) or count < 1:
                errors.append("$.starts.random: expected a positive integer")
            elif space is not None and game is not None:
                for trial in range(count):
                    rng = np.random.default_rng([seed, trial])
                    starts.append(random_start_pair(space, rng, game.epsilon))
        else:
            pairs = starts_doc["pairs"]
            if not isinstance(pairs, list) or not pairs:
                errors.append("$.starts.pairs: expected a non-empty list")
            elif space is not None:
                for k, pair in enumerate(pairs):
                    try:
                        lion0 = space.point(*pair[0])
                        man0 = space.point(*pair[1])
                        starts.append((lion0, man0))
                    except Exception as exc:
                        errors.append(f"$.starts.pairs[{k}]: {exc}")

    # -- outputs -------------------------------------------------------
    out_dir = None
    out_format = "jsonl"
    outputs_doc = data.get("outputs", {})
    if not isinstance(outputs_doc, dict):
        errors.append("$.outputs: expected an object")
    else:
        _check_keys(outputs_doc, {"dir", "format"}, "$.outputs", errors)
        out_dir = outputs_doc.get("dir")
        out_format = outputs_doc.get("format", "jsonl")
        if out_format not in ("jsonl", "csv"):
            errors.append(f"$.outputs.format: expected jsonl|csv, "
                          f"got {out_format!r}")

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(space=space, game=game, evader=evader,
                            starts=starts, seed=seed, out_dir=out_dir,
                            out_format=out_format, raw=data)
