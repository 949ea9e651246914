"""Geodesic metric space contract shared by every backend.

A space provides an exact distance, one deterministic ("canonical")
unit-speed geodesic per ordered point pair, and seeded point sampling.
Points are immutable and carry the tag of their owning space so that
cross-space mixups raise instead of computing nonsense.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

MEMBERSHIP_TOL = 1e-12
PARAM_TOL = 1e-12


class PursuitError(Exception):
    """Base class for all errors raised by this package."""


class SpaceMismatchError(PursuitError):
    """Points from different spaces were combined."""


class MembershipError(PursuitError):
    """Coordinates fall outside the space's carrier set."""


class ParameterRangeError(PursuitError):
    """Arc-length parameter outside [0, length]."""


class ValidationError(PursuitError):
    """Invalid construction parameters or configuration."""


@dataclass(frozen=True)
class Point:
    """A point of some space; coordinates are interpreted by the backend."""

    coords: tuple[float, ...]
    space_tag: str

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        inner = ", ".join(format(c, ".17g") for c in self.coords)
        return f"Point(({inner}), {self.space_tag!r})"


@dataclass(frozen=True)
class SpaceDescriptor:
    """Serializable description of a space backend."""

    kind: str
    parameters: dict
    compact: bool
    diameter_bound: Optional[float]


def require_same_space(*points: Point) -> str:
    tag = points[0].space_tag
    for p in points[1:]:
        if p.space_tag != tag:
            raise SpaceMismatchError(
                f"points belong to different spaces: {tag!r} vs {p.space_tag!r}"
            )
    return tag


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Arc-length parametrized geodesic segment.

    ``point_at(s)`` walks s length units from ``start``; endpoint queries
    return the stored endpoint objects bitwise.  ``coords_at`` is the
    vectorized variant used by hot loops and returns a raw coordinate
    array rather than Point objects.
    """

    start: Point
    end: Point
    length: float
    _point_at: Callable[[float], Point] = field(repr=False)
    _coords_at: Callable[[np.ndarray], np.ndarray] = field(repr=False)

    def point_at(self, s: float) -> Point:
        if s < -PARAM_TOL or s > self.length + PARAM_TOL:
            raise ParameterRangeError(
                f"parameter {s} outside [0, {self.length}]"
            )
        if s <= 0.0:
            return self.start
        if s >= self.length:
            return self.end
        return self._point_at(s)

    def coords_at(self, s: np.ndarray) -> np.ndarray:
        """Coordinates at each arc length in ``s``; values are clamped to
        [0, length] and endpoint rows reproduce the stored endpoints."""
        s = np.asarray(s, dtype=np.float64)
        out = self._coords_at(np.clip(s, 0.0, self.length))
        lo = s <= 0.0
        hi = s >= self.length
        if lo.any():
            out[lo] = np.asarray(self.start.coords)
        if hi.any():
            out[hi] = np.asarray(self.end.coords)
        return out

    def prefix(self, s: float) -> "GeodesicPath":
        """The sub-path covering arc lengths [0, s]."""
        if s >= self.length:
            return self
        return GeodesicPath(self.start, self.point_at(s), s,
                            self._point_at, self._coords_at)


class Space(ABC):
    """Abstract geodesic metric space backend."""

    kind: str

    # -- identity -----------------------------------------------------
    @property
    @abstractmethod
    def tag(self) -> str:
        """Unique identifier; points carry it for mixup detection."""

    @abstractmethod
    def descriptor(self) -> SpaceDescriptor:
        ...

    @property
    @abstractmethod
    def compact(self) -> bool:
        ...

    @property
    @abstractmethod
    def diameter_bound(self) -> Optional[float]:
        """Upper bound on pairwise distances; None when unbounded."""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Number of coordinates per point."""

    # -- membership ---------------------------------------------------
    @abstractmethod
    def contains(self, coords: Sequence[float]) -> bool:
        ...

    def point(self, *coords: float) -> Point:
        """Validated Point constructor."""
        tup = tuple(float(c) for c in coords)
        if not self.contains(tup):
            raise MembershipError(f"{tup} is not a point of {self.tag}")
        return Point(self._canonical_coords(tup), self.tag)

    def _canonical_coords(self, coords: tuple[float, ...]) -> tuple[float, ...]:
        return coords

    def check_point(self, p: Point) -> None:
        if p.space_tag != self.tag:
            raise SpaceMismatchError(
                f"point of {p.space_tag!r} used with space {self.tag!r}"
            )
        if not self.contains(p.coords):
            raise MembershipError(f"{p.coords} is not a point of {self.tag}")

    # -- metric / geodesics -------------------------------------------
    @abstractmethod
    def distance(self, a: Point, b: Point) -> float:
        ...

    @abstractmethod
    def geodesic(self, a: Point, b: Point) -> GeodesicPath:
        ...

    @abstractmethod
    def sample_point(self, rng: np.random.Generator) -> Point:
        ...

    # -- batch layer (coordinate arrays, used by checkers/engine) ------
    def coords_of(self, points: Sequence[Point]) -> np.ndarray:
        return np.array([p.coords for p in points], dtype=np.float64)

    def from_coords(self, row: np.ndarray) -> Point:
        return Point(tuple(float(c) for c in row), self.tag)

    @abstractmethod
    def dist_rows(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Distances between corresponding coordinate rows."""

    def sample_rows(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.array([self.sample_point(rng).coords for _ in range(n)],
                        dtype=np.float64)

    def interp_rows(self, a: np.ndarray, b: np.ndarray,
                    frac: np.ndarray) -> np.ndarray:
        """Row i: the canonical geodesic from a[i] to b[i] evaluated at
        fraction frac[i] of its length."""
        out = np.empty_like(np.asarray(a, dtype=np.float64))
        for i in range(len(out)):
            pa = self.from_coords(a[i])
            pb = self.from_coords(b[i])
            path = self.geodesic(pa, pb)
            out[i] = self.geodesic_point_coords(path, frac[i] * path.length)
        return out

    @staticmethod
    def geodesic_point_coords(path: GeodesicPath, s: float) -> np.ndarray:
        return np.asarray(path.point_at(s).coords, dtype=np.float64)


def between(space: Space, a: Point, b: Point, c: Point, tol: float) -> bool:
    """Whether b lies between a and c: d(a,b) + d(b,c) = d(a,c) within tol."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    defect = space.distance(a, b) + space.distance(b, c) - space.distance(a, c)
    return abs(defect) <= tol


def betweenness_defect(space: Space, a: Point, b: Point, c: Point) -> float:
    """d(a,b) + d(b,c) - d(a,c); zero iff b lies between a and c."""
    return space.distance(a, b) + space.distance(b, c) - space.distance(a, c)
