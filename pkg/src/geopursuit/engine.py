"""Discrete-time simple-pursuit game loop.

At every correction moment (multiples of the capture radius epsilon) the
pursuer re-aims: it travels one epsilon of arc along the canonical
geodesic toward the evader's current position, or, when the players are
closer than epsilon, walks the whole geodesic and waits at its end until
the next moment.  The evader proposes a target at most epsilon away and
walks its own geodesic at unit speed.  Positions are sampled on a fixed
substep grid inside every interval; capture is the first sampled time
with distance strictly below epsilon.

Time bookkeeping is drift-free: moment i is exactly ``i * epsilon``
(one float multiply of an exact integer), and substep times restart from
the moment value, so nothing accumulates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .core import GeodesicPath, Point, Space, SpaceDescriptor, ValidationError

__all__ = [
    "GameConfig",
    "Moment",
    "Trace",
    "Captured",
    "Evaded",
    "Outcome",
    "MotionLeg",
    "lion_step",
    "predict_lion",
    "run_game",
    "distance_profile",
    "random_start_pair",
    "sweep_capture_time",
    "default_horizon_steps",
]


@dataclass(frozen=True)
class GameConfig:
    """Game parameters.

    ``epsilon`` doubles as capture radius and correction interval.
    ``substep`` is the trace sampling resolution; it must divide epsilon
    into an integer number (>= 10) of pieces, which is what makes the
    substep grid an exact rational schedule.
    """

    epsilon: float
    horizon_steps: int
    substep: float
    capture_tol: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if not self.substep > 0:
            raise ValidationError("substep must be positive")
        if self.horizon_steps < 1:
            raise ValidationError("horizon_steps must be at least 1")
        n = round(self.epsilon / self.substep)
        if n < 10:
            raise ValidationError("substep must be at most epsilon/10")
        if abs(n * self.substep - self.epsilon) > 1e-12 * max(1.0, self.epsilon):
            raise ValidationError(
                f"substep {self.substep} does not divide epsilon {self.epsilon}"
            )
        object.__setattr__(self, "_substeps", int(n))

    @property
    def substeps_per_interval(self) -> int:
        return self._substeps

    @property
    def horizon_time(self) -> float:
        return self.horizon_steps * self.epsilon

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "horizon_steps": self.horizon_steps,
            "substep": self.substep,
            "capture_tol": self.capture_tol,
        }

    @staticmethod
    def with_defaults(space: Space, epsilon: float,
                      horizon_steps: Optional[int] = None,
                      substep: Optional[float] = None,
                      capture_tol: float = 0.0) -> "GameConfig":
        if substep is None:
            substep = epsilon / 10.0
        if horizon_steps is None:
            horizon_steps = default_horizon_steps(space, epsilon)
        return GameConfig(epsilon, horizon_steps, substep, capture_tol)


def default_horizon_steps(space: Space, epsilon: float) -> int:
    """Experimental budget for compact spaces: no capture-time bound is
    known, so allow 10 * (diameter / epsilon)^2 correction steps."""
    bound = space.diameter_bound
    if bound is None:
        raise ValidationError(
            "no default horizon on a non-compact space; pass horizon_steps"
        )
    return int(math.ceil(10.0 * (bound / epsilon) ** 2))


class Moment(NamedTuple):
    t: float
    lion: Point
    man: Point


@dataclass(frozen=True)
class Captured:
    t: float


@dataclass(frozen=True)
class Evaded:
    horizon: float


Outcome = Union[Captured, Evaded]


@dataclass(eq=False)
class Trace:
    """Joint trajectory record: correction moments plus a dense substep
    sampling (times, positions of both players, their distance)."""

    space: SpaceDescriptor
    config: GameConfig
    moments: list[Moment]
    times: np.ndarray
    lion_rows: np.ndarray
    man_rows: np.ndarray
    dist: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.times)

    def moment_sample_index(self, i: int) -> int:
        return i * self.config.substeps_per_interval

    def moment_distances(self) -> np.ndarray:
        idx = [self.moment_sample_index(i) for i in range(len(self.moments))]
        return self.dist[idx]

    def moment_index_at(self, t: float, tol: float = 1e-12) -> int:
        for i, m in enumerate(self.moments):
            if abs(m.t - t) <= tol:
                return i
        raise ValidationError(f"{t} is not a correction moment of this trace")


@dataclass(frozen=True, eq=False)
class MotionLeg:
    """One player's motion over a single correction interval: walk the
    stored path at unit speed, then wait at its end."""

    path: GeodesicPath
    duration: float

    @property
    def travel(self) -> float:
        return self.path.length

    @property
    def endpoint(self) -> Point:
        return self.path.end

    def position_at(self, u: float) -> Point:
        return self.path.point_at(min(u, self.travel))

    def coords_at(self, u: np.ndarray) -> np.ndarray:
        return self.path.coords_at(np.minimum(u, self.travel))


def lion_step(space: Space, lion: Point, man: Point,
              epsilon: float) -> MotionLeg:
    """The pursuer's leg for one interval.

    Separation >= epsilon: move exactly epsilon along the canonical
    geodesic toward the evader.  Separation < epsilon: traverse the whole
    geodesic, then stay at the evader's (old) position until the interval
    ends.
    """
    geo = space.geodesic(lion, man)
    if geo.length >= epsilon:
        geo = geo.prefix(epsilon)
    return MotionLeg(geo, epsilon)


def predict_lion(space: Space, lion: Point, man: Point,
                 epsilon: float) -> Point:
    """Where the pursuer's current step ends; pure, so an anticipative
    evader can evaluate it."""
    return lion_step(space, lion, man, epsilon).endpoint


def _evader_leg(space: Space, man: Point, target: Point,
                epsilon: float) -> MotionLeg:
    geo = space.geodesic(man, target)
    if geo.length > epsilon:  # strategies already clip; keep the invariant
        geo = geo.prefix(epsilon)
    return MotionLeg(geo, epsilon)


def run_game(space: Space, config: GameConfig, lion0: Point, man0: Point,
             evader, seed: Optional[int] = None) -> tuple[Trace, Outcome]:
    """Simulate one game; returns the full trace and the outcome.

    Deterministic: the same (space, config, start, evader, seed) always
    produces a bitwise-identical trace.
    """
    space.check_point(lion0)
    space.check_point(man0)
    evader = evader.fresh()
    rng = np.random.default_rng(seed)

    eps = config.epsilon
    n = config.substeps_per_interval
    threshold = eps - config.capture_tol

    # local sampling offsets: substep, 2*substep, ..., then exactly eps
    s_local = np.arange(1, n + 1, dtype=np.float64) * config.substep
    s_local[-1] = eps

    lion, man = lion0, man0
    d0 = space.distance(lion0, man0)

    times = [np.array([0.0])]
    lion_chunks = [np.array([lion0.coords], dtype=np.float64)]
    man_chunks = [np.array([man0.coords], dtype=np.float64)]
    dist_chunks = [np.array([d0])]
    moments = [Moment(0.0, lion0, man0)]

    meta = {
        "evader": evader.spec(),
        "seed": seed,
        "lion0": list(lion0.coords),
        "man0": list(man0.coords),
    }

    def build(outcome: Outcome) -> tuple[Trace, Outcome]:
        trace = Trace(
            space=space.descriptor(),
            config=config,
            moments=moments,
            times=np.concatenate(times),
            lion_rows=np.concatenate(lion_chunks),
            man_rows=np.concatenate(man_chunks),
            dist=np.concatenate(dist_chunks),
            meta=meta,
        )
        meta["outcome"] = ("captured" if isinstance(outcome, Captured)
                           else "evaded")
        meta["outcome_time"] = (outcome.t if isinstance(outcome, Captured)
                                else outcome.horizon)
        return trace, outcome

    if d0 < threshold:
        return build(Captured(0.0))

    for i in range(config.horizon_steps):
        t_moment = i * eps
        lion_leg = lion_step(space, lion, man, eps)
        target = evader.propose(space, man, lion, eps, rng)
        man_leg = _evader_leg(space, man, target, eps)

        t_chunk = t_moment + s_local
        t_chunk[-1] = (i + 1) * eps  # moments stay exact multiples
        lion_chunk = lion_leg.coords_at(s_local)
        man_chunk = man_leg.coords_at(s_local)
        d_chunk = space.dist_rows(lion_chunk, man_chunk)

        hit = np.flatnonzero(d_chunk < threshold)
        if hit.size:
            cut = int(hit[0]) + 1
            times.append(t_chunk[:cut])
            lion_chunks.append(lion_chunk[:cut])
            man_chunks.append(man_chunk[:cut])
            dist_chunks.append(d_chunk[:cut])
            if cut == n:  # capture lands exactly on a correction moment
                moments.append(Moment((i + 1) * eps,
                                      lion_leg.position_at(eps),
                                      man_leg.position_at(eps)))
            return build(Captured(float(t_chunk[cut - 1])))

        times.append(t_chunk)
        lion_chunks.append(lion_chunk)
        man_chunks.append(man_chunk)
        dist_chunks.append(d_chunk)

        lion = lion_leg.position_at(eps)
        man = man_leg.position_at(eps)
        moments.append(Moment((i + 1) * eps, lion, man))

    return build(Evaded(config.horizon_time))


def distance_profile(trace: Trace) -> tuple[np.ndarray, np.ndarray]:
    """The substep distance series (t, d)."""
    if trace.n_samples == 0:
        raise ValidationError("trace has no samples")
    return trace.times, trace.dist


def random_start_pair(space: Space, rng: np.random.Generator,
                      min_separation: float) -> tuple[Point, Point]:
    """Seeded start positions with distance strictly above
    ``min_separation`` (evader resampled until separated)."""
    lion = space.sample_point(rng)
    for _ in range(10_000):
        man = space.sample_point(rng)
        if space.distance(lion, man) > min_separation:
            return lion, man
    raise ValidationError(
        f"could not sample starts separated by more than {min_separation}"
    )


class SweepRow(NamedTuple):
    epsilon: float
    evader: str
    trial: int
    outcome: str
    capture_time: Optional[float]


def sweep_capture_time(space: Space, epsilons: Sequence[float],
                       evaders: Sequence, trials: int, seed: int,
                       horizon_steps: Optional[int] = None,
                       keep_traces: bool = False):
    """Deterministic grid of games: every (epsilon, evader, trial) gets
    its own sub-seeded start pair with separation above epsilon.

    Returns the rows, plus the traces when ``keep_traces`` is set.
    """
    if any(e <= 0 for e in epsilons):
        raise ValidationError("all epsilons must be positive")
    rows: list[SweepRow] = []
    traces = []
    for ei, eps in enumerate(epsilons):
        config = GameConfig.with_defaults(space, eps,
                                          horizon_steps=horizon_steps)
        for vi, evader in enumerate(evaders):
            for trial in range(trials):
                rng = np.random.default_rng([seed, ei, vi, trial])
                lion0, man0 = random_start_pair(space, rng, eps)
                trace, outcome = run_game(space, config, lion0, man0,
                                          evader, seed=seed)
                if isinstance(outcome, Captured):
                    rows.append(SweepRow(eps, evader.kind, trial,
                                         "captured", outcome.t))
                else:
                    rows.append(SweepRow(eps, evader.kind, trial,
                                         "evaded", None))
                if keep_traces:
                    traces.append(trace)
    if keep_traces:
        return rows, traces
    return rows
