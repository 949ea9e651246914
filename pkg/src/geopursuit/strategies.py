"""Evader strategies.

A strategy maps (space, own position, pursuer position, epsilon, rng) to
a target at most epsilon away; the engine walks the canonical geodesic
to that target over the interval.  Strategies may inspect the pursuer's
(deterministic) next position via ``predict_lion``.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .core import Point, Space, ValidationError
from .engine import predict_lion
from .spaces import (
    ChebyshevDiskSpace,
    CircleSpace,
    EuclideanDiskSpace,
    EuclideanPlaneSpace,
    MetricTreeSpace,
    _DiskCarrierMixin,
)

__all__ = [
    "EvaderStrategy",
    "Stationary",
    "GreedyMaxDistance",
    "RadialFlee",
    "CircleRunner",
    "Scripted",
    "make_evader",
    "evader_move",
]


class EvaderStrategy:
    kind: str = "abstract"

    def propose(self, space: Space, man: Point, lion: Point,
                epsilon: float, rng: np.random.Generator) -> Point:
        raise NotImplementedError

    def fresh(self) -> "EvaderStrategy":
        """Per-game copy; stateless strategies return themselves."""
        return self

    def spec(self) -> dict:
        return {"kind": self.kind}


class Stationary(EvaderStrategy):
    kind = "stationary"

    def propose(self, space, man, lion, epsilon, rng):
        return man


def _euclid_directions(k: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(k) / k
    return np.column_stack([np.cos(angles), np.sin(angles)])


def _cheb_directions(k: int) -> np.ndarray:
    """k points spread uniformly (by perimeter arc length) over the unit
    l-infinity sphere, the square [-1,1]^2, starting at (1,0) CCW."""
    out = np.empty((k, 2))
    p = 8.0 * np.arange(k) / k
    for i, s in enumerate(p):
        if s < 1.0:
            out[i] = (1.0, s)
        elif s < 3.0:
            out[i] = (1.0 - (s - 1.0), 1.0)
        elif s < 5.0:
            out[i] = (-1.0, 1.0 - (s - 3.0))
        elif s < 7.0:
            out[i] = (-1.0 + (s - 5.0), -1.0)
        else:
            out[i] = (1.0, -1.0 + (s - 7.0))
    return out


_DIRECTION_CACHE: dict[tuple[str, int], np.ndarray] = {}


def _planar_directions(space: Space, k: int) -> np.ndarray:
    key = (space.kind, k)
    if key not in _DIRECTION_CACHE:
        if isinstance(space, ChebyshevDiskSpace):
            _DIRECTION_CACHE[key] = _cheb_directions(k)
        else:
            _DIRECTION_CACHE[key] = _euclid_directions(k)
    return _DIRECTION_CACHE[key]


def _planar_step_candidates(space: Space, man: Point, epsilon: float,
                            k: int) -> np.ndarray:
    """Rows of candidate coordinates at distance (up to) epsilon from
    ``man``: k norm-unit directions, steps shrunk toward the disk
    boundary where they would leave the carrier."""
    m = np.asarray(man.coords, dtype=np.float64)
    v = epsilon * _planar_directions(space, k)
    m_rows = np.tile(m, (k, 1))
    if isinstance(space, _DiskCarrierMixin):
        frac = space.clip_step_frac(m_rows, v)
        v = v * frac[:, None]
    return m_rows + v


class GreedyMaxDistance(EvaderStrategy):
    """Adversarial reference evader: among per-backend candidates at
    distance epsilon (plus staying put), pick the one farthest from the
    pursuer's predicted next position; ties go to the earliest
    candidate, so the choice is deterministic."""

    kind = "greedy_max_distance"

    def __init__(self, k: int = 32):
        if k < 2:
            raise ValidationError("greedy_max_distance needs k >= 2")
        self.k = k

    def spec(self):
        return {"kind": self.kind, "k": self.k}

    def propose(self, space, man, lion, epsilon, rng):
        lion_next = predict_lion(space, lion, man, epsilon)
        pred = np.asarray(lion_next.coords, dtype=np.float64)
        if isinstance(space, (EuclideanDiskSpace, EuclideanPlaneSpace,
                              ChebyshevDiskSpace)):
            rows = _planar_step_candidates(space, man, epsilon, self.k)
            rows = np.vstack([rows, [man.coords]])  # stay option
            if isinstance(space, ChebyshevDiskSpace):
                scores = K.dist_cheb_one(pred, rows)
            else:
                scores = K.dist_euclid_one(pred, rows)
            x, y = rows[int(np.argmax(scores))]
            return Point((float(x), float(y)), space.tag)
        if isinstance(space, CircleSpace):
            a = man.coords[0]
            cands = [space.point(a + epsilon), space.point(a - epsilon), man]
        elif isinstance(space, MetricTreeSpace):
            cands = space.frontier(man, epsilon) + [man]
        else:  # pragma: no cover - no other backends exist
            raise ValidationError(f"no candidate rule for {space.kind}")
        rows = space.coords_of(cands)
        scores = space.dist_rows(rows, np.tile(pred, (len(cands), 1)))
        return cands[int(np.argmax(scores))]


class RadialFlee(EvaderStrategy):
    """Move directly away from the pursuer; on bounded carriers the step
    is shrunk toward the boundary (so a cornered evader stalls)."""

    kind = "radial_flee"

    def propose(self, space, man, lion, epsilon, rng):
        if man.coords == lion.coords:
            return man
        if isinstance(space, (EuclideanDiskSpace, ChebyshevDiskSpace,
                              EuclideanPlaneSpace)):
            m = np.asarray(man.coords, dtype=np.float64)
            u = m - np.asarray(lion.coords, dtype=np.float64)
            if isinstance(space, ChebyshevDiskSpace):
                scale = max(abs(u[0]), abs(u[1]))
            else:
                scale = float(np.sqrt(u[0] * u[0] + u[1] * u[1]))
            if scale == 0.0:
                return man
            v = (epsilon / scale) * u
            if isinstance(space, _DiskCarrierMixin):
                frac = space.clip_step_frac(m[None, :], v[None, :])[0]
                v = v * frac
            return Point((float(m[0] + v[0]), float(m[1] + v[1])), space.tag)
        if isinstance(space, CircleSpace):
            fwd = space.wrap(man.coords[0] - lion.coords[0])
            direction = 1.0 if fwd <= space.circumference / 2 else -1.0
            return space.point(man.coords[0] + direction * epsilon)
        if isinstance(space, MetricTreeSpace):
            cands = space.frontier(man, epsilon) + [man]
            rows = space.coords_of(cands)
            scores = space.dist_rows(rows,
                                     np.tile(np.asarray(lion.coords),
                                             (len(cands), 1)))
            return cands[int(np.argmax(scores))]
        raise ValidationError(f"no flee rule for {space.kind}")  # pragma: no cover


class CircleRunner(EvaderStrategy):
    """Run around the circle in a fixed orientation, epsilon per step."""

    kind = "circle_runner"

    def __init__(self, orientation: int = 1):
        if orientation not in (1, -1):
            raise ValidationError("orientation must be +1 or -1")
        self.orientation = orientation

    def spec(self):
        return {"kind": self.kind, "orientation": self.orientation}

    def propose(self, space, man, lion, epsilon, rng):
        if not isinstance(space, CircleSpace):
            raise ValidationError("circle_runner only runs on the circle")
        return space.point(man.coords[0] + self.orientation * epsilon)


class Scripted(EvaderStrategy):
    """Head for the next waypoint each step (one waypoint per correction
    interval, clipped to epsilon by the engine); once the list runs out,
    behave as stationary."""

    kind = "scripted"

    def __init__(self, waypoints: Sequence[Point]):
        self.waypoints = list(waypoints)
        self._next = 0

    def fresh(self):
        return Scripted(self.waypoints)

    def spec(self):
        return {"kind": self.kind, "waypoints": len(self.waypoints)}

    def propose(self, space, man, lion, epsilon, rng):
        if self._next >= len(self.waypoints):
            return man
        target = self.waypoints[self._next]
        self._next += 1
        return target


def evader_move(strategy: EvaderStrategy, space: Space, man: Point,
                lion: Point, epsilon: float,
                rng: Optional[np.random.Generator] = None) -> Point:
    """A strategy's clipped target: proposals farther than epsilon are
    pulled back along the canonical geodesic."""
    if rng is None:
        rng = np.random.default_rng(0)
    target = strategy.propose(space, man, lion, epsilon, rng)
    space.check_point(target)
    if space.distance(man, target) > epsilon:
        target = space.geodesic(man, target).point_at(epsilon)
    return target


_EVADER_KINDS = {
    "stationary": lambda spec, space: Stationary(),
    "greedy_max_distance": lambda spec, space: GreedyMaxDistance(
        int(spec.get("k", 32))),
    "radial_flee": lambda spec, space: RadialFlee(),
    "circle_runner": lambda spec, space: CircleRunner(
        int(spec.get("orientation", 1))),
}


def make_evader(spec: dict, space: Space) -> EvaderStrategy:
    """Build a strategy from its JSON spec."""
    kind = spec.get("kind")
    if kind == "scripted":
        pts = [space.point(*c) for c in spec.get("waypoints", [])]
        return Scripted(pts)
    if kind not in _EVADER_KINDS:
        raise ValidationError(f"unknown evader kind {kind!r}")
    return _EVADER_KINDS[kind](spec, space)
