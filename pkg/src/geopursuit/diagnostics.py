"""Trace validators: good-curve structure, distance behaviour, rounds.

All checks re-derive their quantities from the recorded trace via the
space's metric; none of them trust the engine's internal state, so they
double as independent cross-checks of the game loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Point, Space, ValidationError, require_same_space
from .engine import Trace

__all__ = [
    "rho",
    "ItemCheck",
    "GoodCurveReport",
    "validate_good_curve",
    "MonotoneReport",
    "check_distance_monotone",
    "StepClassification",
    "classify_constant_step",
    "LionGeodesyReport",
    "check_lion_geodesic",
    "RoundRecord",
    "detect_rounds",
    "most_revisited_center",
]


def rho(space: Space, p: tuple[Point, Point], q: tuple[Point, Point]) -> float:
    """Product metric on joint states: max of componentwise distances."""
    require_same_space(p[0], p[1], q[0], q[1])
    return max(space.distance(p[0], q[0]), space.distance(p[1], q[1]))


@dataclass(frozen=True)
class ItemCheck:
    passed: bool
    worst: float  # largest violation amount; <= tol means pass


@dataclass(frozen=True)
class GoodCurveReport:
    interval: tuple[float, float]
    tolerance: float
    lipschitz: ItemCheck
    aim_betweenness: ItemCheck
    step_length: ItemCheck
    separation: ItemCheck

    @property
    def passed(self) -> bool:
        return (self.lipschitz.passed and self.aim_betweenness.passed
                and self.step_length.passed and self.separation.passed)

    def to_json(self) -> dict:
        return {
            "check": "good_curve",
            "interval": list(self.interval),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "items": {
                "lipschitz": [self.lipschitz.passed, self.lipschitz.worst],
                "aim_betweenness": [self.aim_betweenness.passed,
                                    self.aim_betweenness.worst],
                "step_length": [self.step_length.passed,
                                self.step_length.worst],
                "separation": [self.separation.passed, self.separation.worst],
            },
        }


def validate_good_curve(space: Space, trace: Trace,
                        interval: tuple[float, float],
                        tol: float) -> GoodCurveReport:
    """Check the four structural requirements of a pursuit segment:

    1. both players 1-Lipschitz (at substep resolution);
    2. every pursuer step aimed: L(i+1) between L(i) and M(i);
    3. every pursuer step of length exactly epsilon;
    4. separation at least epsilon at every moment of the interval.

    ``interval`` endpoints must be correction moments of the trace.
    """
    ia = trace.moment_index_at(interval[0])
    ib = trace.moment_index_at(interval[1])
    if ia > ib:
        raise ValidationError("interval endpoints out of order")
    eps = trace.config.epsilon
    n = trace.config.substeps_per_interval

    lo = trace.moment_sample_index(ia)
    hi = trace.moment_sample_index(ib)
    t = trace.times[lo:hi + 1]
    worst_lip = 0.0
    if len(t) > 1:
        dt = np.diff(t)
        for rows in (trace.lion_rows[lo:hi + 1], trace.man_rows[lo:hi + 1]):
            step = space.dist_rows(rows[:-1], rows[1:])
            worst_lip = max(worst_lip, float(np.max(step - dt)))

    worst_aim = 0.0
    worst_step = 0.0
    worst_sep = 0.0
    for i in range(ia, ib + 1):
        li, mi = trace.moments[i].lion, trace.moments[i].man
        sep = space.distance(li, mi)
        worst_sep = max(worst_sep, eps - sep)
        if i == ib:
            break
        ln = trace.moments[i + 1].lion
        step = space.distance(li, ln)
        worst_step = max(worst_step, abs(step - eps))
        defect = step + space.distance(ln, mi) - sep
        worst_aim = max(worst_aim, defect)

    return GoodCurveReport(
        interval=(trace.moments[ia].t, trace.moments[ib].t),
        tolerance=tol,
        lipschitz=ItemCheck(worst_lip <= tol, worst_lip),
        aim_betweenness=ItemCheck(worst_aim <= tol, worst_aim),
        step_length=ItemCheck(worst_step <= tol, worst_step),
        separation=ItemCheck(worst_sep <= tol, worst_sep),
    )


@dataclass(frozen=True)
class MonotoneReport:
    passed: bool
    max_increase: float
    at_moment: Optional[int]

    def to_json(self) -> dict:
        return {"check": "distance_monotone", "passed": self.passed,
                "max_increase": self.max_increase, "at_moment": self.at_moment}


def check_distance_monotone(trace: Trace, tol: float) -> MonotoneReport:
    """Moment-to-moment distances must not increase (guaranteed for aimed
    full-length steps on betweenness spaces; elsewhere this just
    reports)."""
    d = trace.moment_distances()
    if len(d) < 2:
        return MonotoneReport(True, 0.0, None)
    inc = np.diff(d)
    worst = int(np.argmax(inc))
    return MonotoneReport(bool(inc[worst] <= tol), float(inc[worst]), worst)


@dataclass(frozen=True)
class StepClassification:
    stmt1_constant_over_interval: bool
    stmt2_equal_endpoints: bool
    stmt3_full_aligned_evader_step: bool

    @property
    def flags(self) -> tuple[bool, bool, bool]:
        return (self.stmt1_constant_over_interval,
                self.stmt2_equal_endpoints,
                self.stmt3_full_aligned_evader_step)

    @property
    def agree(self) -> bool:
        return len(set(self.flags)) == 1


def classify_constant_step(space: Space, trace: Trace, i: int,
                           tol: float) -> StepClassification:
    """Evaluate, independently from the trace samples, the three
    equivalent characterizations of a constant-distance step:

    1. the distance is constant over the whole interval;
    2. the distance is equal at its two endpoints;
    3. the evader moved exactly epsilon and its old position lies
       between the pursuer's old position and the evader's new one.
    """
    if not 0 <= i < len(trace.moments) - 1:
        raise ValidationError(f"no step {i} in trace")
    eps = trace.config.epsilon
    lo = trace.moment_sample_index(i)
    hi = trace.moment_sample_index(i + 1)
    window = trace.dist[lo:hi + 1]
    stmt1 = bool(np.max(np.abs(window - window[0])) <= tol)
    stmt2 = bool(abs(window[-1] - window[0]) <= tol)

    li, mi = trace.moments[i].lion, trace.moments[i].man
    mn = trace.moments[i + 1].man
    man_step = space.distance(mi, mn)
    defect = space.distance(li, mi) + man_step - space.distance(li, mn)
    stmt3 = abs(man_step - eps) <= tol and abs(defect) <= tol
    return StepClassification(stmt1, stmt2, stmt3)


@dataclass(frozen=True)
class LionGeodesyReport:
    applicable: bool
    d_endpoints: Optional[float]
    expected_length: Optional[float]
    is_geodesic: bool

    def to_json(self) -> dict:
        return {"check": "lion_geodesic", "applicable": self.applicable,
                "d_endpoints": self.d_endpoints,
                "expected_length": self.expected_length,
                "is_geodesic": self.is_geodesic}


def check_lion_geodesic(space: Space, trace: Trace, i: int, j: int,
                        tol: float) -> LionGeodesyReport:
    """When the player distance is the same at moments i and j, the
    pursuer's arc in between must realize the distance (j-i)*epsilon."""
    if not 0 <= i < j < len(trace.moments):
        raise ValidationError(f"no moment pair ({i}, {j}) in trace")
    d = trace.moment_distances()
    if abs(d[i] - d[j]) > tol:
        return LionGeodesyReport(False, None, None, False)
    eps = trace.config.epsilon
    endpoints = space.distance(trace.moments[i].lion, trace.moments[j].lion)
    expected = (j - i) * eps
    return LionGeodesyReport(True, endpoints, expected,
                             abs(endpoints - expected) <= tol)


@dataclass(frozen=True)
class RoundRecord:
    i: int
    j: int
    center: tuple[Point, Point]
    radius: float

    @property
    def length_steps(self) -> int:
        return self.j - self.i

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "radius": self.radius,
                "center": [list(self.center[0].coords),
                           list(self.center[1].coords)],
                "length_steps": self.length_steps}


def detect_rounds(space: Space, trace: Trace, center: tuple[Point, Point],
                  radius: float,
                  epsilon: Optional[float] = None) -> list[RoundRecord]:
    """Excursions of the joint state away from a small product-metric
    ball: a round enters the ball at moment i, stays out strictly
    between, and re-enters at moment j > i + 1.

    Requires radius < epsilon/2 so that consecutive moments can never
    both be inside (the pursuer alone moves epsilon per step while
    separated, which exceeds the ball's diameter).
    """
    eps = trace.config.epsilon if epsilon is None else epsilon
    if not radius < eps / 2:
        raise ValidationError("round ball radius must be below epsilon/2")
    member = [k for k, m in enumerate(trace.moments)
              if rho(space, (m.lion, m.man), center) <= radius]
    out = []
    for a, b in zip(member, member[1:]):
        if b - a > 1:
            out.append(RoundRecord(a, b, center, radius))
    return out


def most_revisited_center(space: Space, trace: Trace,
                          radius: float) -> tuple[Point, Point]:
    """Among the recorded moment states, the one whose product-metric
    ball of the given radius captures the most moments (earliest wins
    ties); a practical stand-in for a limit point at finite horizon."""
    moments = trace.moments
    if not moments:
        raise ValidationError("trace has no moments")
    idx = [trace.moment_sample_index(i) for i in range(len(moments))]
    lions = trace.lion_rows[idx]
    men = trace.man_rows[idx]
    best_k, best_count = 0, -1
    for k in range(len(moments)):
        dl = space.dist_rows(np.tile(lions[k], (len(moments), 1)), lions)
        dm = space.dist_rows(np.tile(men[k], (len(moments), 1)), men)
        count = int(np.sum(np.maximum(dl, dm) <= radius))
        if count > best_count:
            best_k, best_count = k, count
    return (moments[best_k].lion, moments[best_k].man)
