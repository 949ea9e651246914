"""Concrete space backends.

Carriers where the pursuit is expected to capture (Euclidean disk,
Chebyshev disk, metric tree) and the standing counterexamples (circle:
betweenness fails; plane: not compact).  Each backend declares its canonical geodesic selector:

* disks / plane: the affine segment, arc-length parametrized in the
  backend's norm;
* circle: the shorter arc, counterclockwise on antipodal ties (the
  tie-break is a constructor parameter, any fixed rule works);
* tree: the unique vertex path with partial edge offsets.
"""

from __future__ import annotations

import hashlib
import math
from typing import Optional, Sequence

import numpy as np

from . import _kernels as K
from .core import (
    MEMBERSHIP_TOL,
    GeodesicPath,
    MembershipError,
    Point,
    Space,
    SpaceDescriptor,
    ValidationError,
    require_same_space,
)

__all__ = [
    "EuclideanDiskSpace",
    "ChebyshevDiskSpace",
    "CircleSpace",
    "MetricTreeSpace",
    "EuclideanPlaneSpace",
    "make_space",
    "load_tree_edges",
]


# ---------------------------------------------------------------------------
# planar backends (affine geodesics)
# ---------------------------------------------------------------------------

class _PlanarSpace(Space):
    """Shared machinery for 2-D backends whose geodesics are affine."""

    dim = 2

    def _norm(self, dx: float, dy: float) -> float:
        raise NotImplementedError

    def distance(self, a: Point, b: Point) -> float:
        require_same_space(a, b)
        self.check_point(a)
        self.check_point(b)
        return self._norm(a.coords[0] - b.coords[0], a.coords[1] - b.coords[1])

    def geodesic(self, a: Point, b: Point) -> GeodesicPath:
        require_same_space(a, b)
        self.check_point(a)
        self.check_point(b)
        ax, ay = a.coords
        bx, by = b.coords
        length = self._norm(ax - bx, ay - by)
        tag = self.tag
        a_arr = np.array([ax, ay])
        b_arr = np.array([bx, by])

        def _point_at(s: float) -> Point:
            f = s / length
            return Point((ax + f * (bx - ax), ay + f * (by - ay)), tag)

        def _coords_at(s: np.ndarray) -> np.ndarray:
            if length == 0.0:
                return np.tile(a_arr, (len(s), 1))
            return K.segment_points(a_arr, b_arr, s, length)

        return GeodesicPath(a, b, length, _point_at, _coords_at)

    def interp_rows(self, a, b, frac):
        return K.interp_rows(np.asarray(a, dtype=np.float64),
                             np.asarray(b, dtype=np.float64),
                             np.asarray(frac, dtype=np.float64))


class _DiskCarrierMixin:
    """Euclidean-disk carrier: membership and step clipping."""

    def contains(self, coords) -> bool:
        if len(coords) != 2:
            return False
        x, y = coords
        return math.sqrt(x * x + y * y) <= self.radius + MEMBERSHIP_TOL

    def clip_step_frac(self, m: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Largest t in [0,1] per row keeping m + t*v inside the disk."""
        return K.disk_clip_frac(m, v, self.radius)


class EuclideanDiskSpace(_DiskCarrierMixin, _PlanarSpace):
    """Closed disk of given radius with the Euclidean metric."""

    kind = "euclidean-disk"

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ValidationError("radius must be positive")
        self.radius = float(radius)
        self._tag = f"euclidean-disk[r={self.radius!r}]"

    @property
    def tag(self) -> str:
        return self._tag

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor(self.kind, {"radius": self.radius},
                               compact=True, diameter_bound=2 * self.radius)

    compact = True

    @property
    def diameter_bound(self) -> float:
        return 2 * self.radius

    def _norm(self, dx, dy):
        return math.sqrt(dx * dx + dy * dy)

    def dist_rows(self, a, b):
        return K.dist_euclid(np.asarray(a, dtype=np.float64),
                             np.asarray(b, dtype=np.float64))

    def sample_point(self, rng) -> Point:
        # uniform over area via rejection from the bounding square
        r = self.radius
        while True:
            x = rng.uniform(-r, r)
            y = rng.uniform(-r, r)
            if x * x + y * y <= r * r:
                return Point((x, y), self.tag)

    def sample_rows(self, rng, n):
        out = np.empty((n, 2))
        r = self.radius
        filled = 0
        while filled < n:
            cand = rng.uniform(-r, r, size=(2 * (n - filled) + 8, 2))
            ok = cand[:, 0] ** 2 + cand[:, 1] ** 2 <= r * r
            good = cand[ok]
            take = min(len(good), n - filled)
            out[filled:filled + take] = good[:take]
            filled += take
        return out


class ChebyshevDiskSpace(_DiskCarrierMixin, _PlanarSpace):
    """Euclidean-disk carrier with the l-infinity metric.

    Geodesics are non-unique under this norm; the canonical selector is
    the affine segment reparametrized by Chebyshev arc length (an affine
    segment is a geodesic for every norm on a convex carrier).
    """

    kind = "chebyshev-disk"

    def __init__(self, radius: float = 1.0):
        if not radius > 0:
            raise ValidationError("radius must be positive")
        self.radius = float(radius)
        self._tag = f"chebyshev-disk[r={self.radius!r}]"

    @property
    def tag(self) -> str:
        return self._tag

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor(self.kind, {"radius": self.radius},
                               compact=True, diameter_bound=2 * self.radius)

    compact = True

    @property
    def diameter_bound(self) -> float:
        # attained by axis-aligned antipodes; the Chebyshev norm never
        # exceeds the Euclidean one
        return 2 * self.radius

    def _norm(self, dx, dy):
        return max(abs(dx), abs(dy))

    def dist_rows(self, a, b):
        return K.dist_cheb(np.asarray(a, dtype=np.float64),
                           np.asarray(b, dtype=np.float64))

    sample_point = EuclideanDiskSpace.sample_point
    sample_rows = EuclideanDiskSpace.sample_rows


class EuclideanPlaneSpace(_PlanarSpace):
    """The unbounded Euclidean plane; the engine's escape example."""

    kind = "plane"
    compact = False

    @property
    def tag(self) -> str:
        return "plane"

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor(self.kind, {}, compact=False,
                               diameter_bound=None)

    @property
    def diameter_bound(self) -> Optional[float]:
        return None

    def contains(self, coords) -> bool:
        return len(coords) == 2 and all(math.isfinite(c) for c in coords)

    def _norm(self, dx, dy):
        return math.sqrt(dx * dx + dy * dy)

    def dist_rows(self, a, b):
        return K.dist_euclid(np.asarray(a, dtype=np.float64),
                             np.asarray(b, dtype=np.float64))

    def sample_point(self, rng) -> Point:
        # no uniform distribution exists on the plane; standard normal
        x, y = rng.normal(size=2)
        return Point((float(x), float(y)), self.tag)

    def sample_rows(self, rng, n):
        return rng.normal(size=(n, 2))


# ---------------------------------------------------------------------------
# circle
# ---------------------------------------------------------------------------

class CircleSpace(Space):
    """Circle with the intrinsic arc-length metric.

    Points are arc positions in [0, circumference).  Compact and geodesic
    but the betweenness property fails, which makes it the engine's
    standing counterexample.
    """

    kind = "circle"
    compact = True
    dim = 1

    def __init__(self, circumference: float = 1.0, tie_break: str = "ccw"):
        if not circumference > 0:
            raise ValidationError("circumference must be positive")
        if tie_break not in ("ccw", "cw"):
            raise ValidationError("tie_break must be 'ccw' or 'cw'")
        self.circumference = float(circumference)
        self.tie_break = tie_break
        self._tie = 1.0 if tie_break == "ccw" else -1.0
        self._tag = f"circle[c={self.circumference!r}]"

    @property
    def tag(self) -> str:
        return self._tag

    def descriptor(self) -> SpaceDescriptor:
        params = {"circumference": self.circumference}
        if self.tie_break != "ccw":
            params["tie_break"] = self.tie_break
        return SpaceDescriptor(self.kind, params, compact=True,
                               diameter_bound=self.circumference / 2)

    @property
    def diameter_bound(self) -> float:
        return self.circumference / 2

    def contains(self, coords) -> bool:
        return len(coords) == 1 and 0.0 <= coords[0] < self.circumference

    def wrap(self, x: float) -> float:
        w = x % self.circumference
        return 0.0 if w >= self.circumference else w

    def point(self, angle: float) -> Point:
        angle = float(angle)
        if not math.isfinite(angle):
            raise MembershipError(f"{angle} is not a point of {self.tag}")
        return Point((self.wrap(angle),), self.tag)

    def distance(self, a: Point, b: Point) -> float:
        require_same_space(a, b)
        self.check_point(a)
        self.check_point(b)
        delta = abs(a.coords[0] - b.coords[0])
        return min(delta, self.circumference - delta)

    def arc_direction(self, a: float, b: float) -> tuple[float, float]:
        """(direction, arc length) of the canonical geodesic a -> b."""
        circ = self.circumference
        fwd = self.wrap(b - a)
        half = 0.5 * circ
        if self._tie >= 0.0:
            ccw = fwd <= half
        else:
            ccw = fwd < half
        if ccw:
            return 1.0, fwd
        return -1.0, circ - fwd

    def geodesic(self, a: Point, b: Point) -> GeodesicPath:
        require_same_space(a, b)
        self.check_point(a)
        self.check_point(b)
        a0 = a.coords[0]
        direction, length = self.arc_direction(a0, b.coords[0])
        tag = self.tag
        wrap = self.wrap

        def _point_at(s: float) -> Point:
            return Point((wrap(a0 + direction * s),), tag)

        def _coords_at(s: np.ndarray) -> np.ndarray:
            return K.circle_arc_points(a0, direction, s,
                                       self.circumference)[:, None]

        return GeodesicPath(a, b, length, _point_at, _coords_at)

    def sample_point(self, rng) -> Point:
        return Point((self.wrap(rng.uniform(0.0, self.circumference)),),
                     self.tag)

    def sample_rows(self, rng, n):
        return rng.uniform(0.0, self.circumference, size=(n, 1))

    def dist_rows(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        return K.dist_circle(np.ascontiguousarray(a[:, 0]),
                             np.ascontiguousarray(b[:, 0]),
                             self.circumference)

    def interp_rows(self, a, b, frac):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        out = K.circle_interp_pairs(np.ascontiguousarray(a[:, 0]),
                                    np.ascontiguousarray(b[:, 0]),
                                    np.asarray(frac, dtype=np.float64),
                                    self.circumference, self._tie)
        return out[:, None]


# ---------------------------------------------------------------------------
# metric tree
# ---------------------------------------------------------------------------

class MetricTreeSpace(Space):
    """Finite metric tree: vertices joined by positively weighted edges.

    Points are (edge index, offset) pairs, offset measured from the
    lexicographically smaller endpoint.  Vertex points are canonicalized
    onto their smallest incident (edge index, offset) representation so
    that point identity is exact-coordinate equality.  Geodesics are the
    unique simple paths; CAT(0), hence betweenness holds.
    """

    kind = "tree"
    compact = True
    dim = 2

    def __init__(self, edges: Sequence[tuple[str, str, float]]):
        norm_edges = []
        seen = set()
        for item in edges:
            if len(item) != 3:
                raise ValidationError(f"edge {item!r} is not a (u, v, length) triple")
            u, v, length = str(item[0]), str(item[1]), float(item[2])
            if u == v:
                raise ValidationError(f"self-loop at vertex {u!r}")
            if not length > 0:
                raise ValidationError(f"edge {u!r}-{v!r} has nonpositive length")
            lo, hi = (u, v) if u < v else (v, u)
            if (lo, hi) in seen:
                raise ValidationError(f"duplicate edge {lo!r}-{hi!r}")
            seen.add((lo, hi))
            norm_edges.append((lo, hi, length))
        if not norm_edges:
            raise ValidationError("tree needs at least one edge")
        self.edges = tuple(norm_edges)

        vertices = sorted({u for u, _, _ in norm_edges}
                          | {v for _, v, _ in norm_edges})
        self.vertices = tuple(vertices)
        self._vindex = {v: i for i, v in enumerate(vertices)}
        if len(self.edges) != len(self.vertices) - 1:
            raise ValidationError(
                f"{len(self.edges)} edges on {len(self.vertices)} vertices "
                "cannot form a tree"
            )

        nv = len(self.vertices)
        self._adj: list[list[tuple[int, int]]] = [[] for _ in range(nv)]
        for ei, (u, v, _) in enumerate(self.edges):
            self._adj[self._vindex[u]].append((ei, self._vindex[v]))
            self._adj[self._vindex[v]].append((ei, self._vindex[u]))

        # connectivity check, then all-pairs vertex distances / next hops
        self._vdist = np.full((nv, nv), np.inf)
        self._vnext = np.full((nv, nv), -1, dtype=np.int64)
        for root in range(nv):
            self._vdist[root, root] = 0.0
            stack = [root]
            seen_v = {root}
            while stack:
                cur = stack.pop()
                for ei, nb in self._adj[cur]:
                    if nb in seen_v:
                        continue
                    seen_v.add(nb)
                    self._vdist[root, nb] = (self._vdist[root, cur]
                                             + self.edges[ei][2])
                    self._vnext[root, nb] = (nb if cur == root
                                             else self._vnext[root, cur])
                    stack.append(nb)
            if len(seen_v) != nv:
                raise ValidationError("edge list is not connected")
        # accumulation order depends on the root; mirror the upper
        # triangle so vertex distances are bitwise symmetric
        iu = np.triu_indices(nv, k=1)
        self._vdist[(iu[1], iu[0])] = self._vdist[iu]

        self._diameter = float(self._vdist.max())
        digest = hashlib.sha256(
            "|".join(f"{u},{v},{length!r}" for u, v, length in self.edges)
            .encode()
        ).hexdigest()[:10]
        self._tag = f"tree[{len(self.edges)}e,{digest}]"

        # canonical vertex coordinates
        self._vertex_coords = []
        for vi, name in enumerate(self.vertices):
            best = None
            for ei, _ in sorted(self._adj[vi]):
                u, v, length = self.edges[ei]
                off = 0.0 if name == u else length
                cand = (float(ei), off)
                if best is None or cand < best:
                    best = cand
            self._vertex_coords.append(best)

    @property
    def tag(self) -> str:
        return self._tag

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor(
            self.kind,
            {"edges": [[u, v, length] for u, v, length in self.edges]},
            compact=True,
            diameter_bound=self._diameter,
        )

    @property
    def diameter_bound(self) -> float:
        return self._diameter

    def contains(self, coords) -> bool:
        if len(coords) != 2:
            return False
        ei, off = coords
        if ei != int(ei) or not 0 <= int(ei) < len(self.edges):
            return False
        return -MEMBERSHIP_TOL <= off <= self.edges[int(ei)][2] + MEMBERSHIP_TOL

    def _canonical_coords(self, coords):
        ei = int(coords[0])
        off = coords[1]
        length = self.edges[ei][2]
        if off == 0.0:
            return self._vertex_coords[self._vindex[self.edges[ei][0]]]
        if off == length:
            return self._vertex_coords[self._vindex[self.edges[ei][1]]]
        return (float(ei), float(off))

    def point_on_edge(self, u: str, v: str, offset: float) -> Point:
        """Point at ``offset`` from ``u`` along the u-v edge."""
        lo, hi = (u, v) if u < v else (v, u)
        for ei, (eu, ev, length) in enumerate(self.edges):
            if (eu, ev) == (lo, hi):
                off = offset if u == lo else length - offset
                if not -MEMBERSHIP_TOL <= off <= length + MEMBERSHIP_TOL:
                    raise MembershipError(
                        f"offset {offset} outside edge {u!r}-{v!r} of length {length}"
                    )
                return Point(self._canonical_coords((ei, min(max(off, 0.0), length))),
                             self.tag)
        raise ValidationError(f"no edge {u!r}-{v!r} in tree")

    def vertex_point(self, name: str) -> Point:
        if name not in self._vindex:
            raise ValidationError(f"no vertex {name!r} in tree")
        return Point(self._vertex_coords[self._vindex[name]], self.tag)

    # -- metric ---------------------------------------------------------
    def _endpoint_costs(self, ei: int, off: float):
        u, v, length = self.edges[ei]
        return ((self._vindex[u], off), (self._vindex[v], length - off))

    def _dist_coords(self, a, b) -> float:
        ea, oa = int(a[0]), a[1]
        eb, ob = int(b[0]), b[1]
        if ea == eb:
            return float(abs(oa - ob))
        best = math.inf
        for va, ca in self._endpoint_costs(ea, oa):
            for vb, cb in self._endpoint_costs(eb, ob):
                # (ca + cb) first: IEEE addition commutes, so swapping the
                # arguments scans the same four floats
                total = (ca + cb) + self._vdist[va, vb]
                if total < best:
                    best = total
        return float(best)

    def distance(self, a: Point, b: Point) -> float:
        require_same_space(a, b)
        self.check_point(a)
        self.check_point(b)
        return self._dist_coords(a.coords, b.coords)

    def dist_rows(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        return np.array([self._dist_coords(a[i], b[i]) for i in range(len(a))])

    # -- geodesics --------------------------------------------------------
    def _vertex_path(self, va: int, vb: int) -> list[int]:
        path = [va]
        cur = va
        while cur != vb:
            cur = int(self._vnext[cur, vb])
            path.append(cur)
        return path

    def _edge_between(self, va: int, vb: int) -> int:
        for ei, nb in self._adj[va]:
            if nb == vb:
                return ei
        raise AssertionError("vertex path stepped across a non-edge")

    def geodesic(self, a: Point, b: Point) -> GeodesicPath:
        require_same_space(a, b)
        self.check_point(a)
        self.check_point(b)
        ea, oa = int(a.coords[0]), a.coords[1]
        eb, ob = int(b.coords[0]), b.coords[1]

        segments: list[tuple[int, float, float]] = []
        if ea == eb:
            segments.append((ea, oa, ob))
        else:
            best = None
            for va, ca in self._endpoint_costs(ea, oa):
                for vb, cb in self._endpoint_costs(eb, ob):
                    total = (ca + cb) + self._vdist[va, vb]
                    if best is None or total < best[0]:
                        best = (total, va, vb)
            _, va, vb = best
            u, v, length = self.edges[ea]
            exit_off = 0.0 if va == self._vindex[u] else length
            segments.append((ea, oa, exit_off))
            vpath = self._vertex_path(va, vb)
            for x, y in zip(vpath, vpath[1:]):
                ei = self._edge_between(x, y)
                u, v, length = self.edges[ei]
                if x == self._vindex[u]:
                    segments.append((ei, 0.0, length))
                else:
                    segments.append((ei, length, 0.0))
            u, v, length = self.edges[eb]
            enter_off = 0.0 if vb == self._vindex[u] else length
            segments.append((eb, enter_off, ob))

        segments = [(ei, o0, o1) for ei, o0, o1 in segments if o0 != o1]
        tag = self.tag
        canonical = self._canonical_coords
        if not segments:  # a == b
            def _degenerate_point(s: float) -> Point:
                return a

            def _degenerate_coords(s: np.ndarray) -> np.ndarray:
                return np.tile(np.asarray(a.coords), (len(s), 1))

            return GeodesicPath(a, b, 0.0, _degenerate_point, _degenerate_coords)

        seg_len = [abs(o1 - o0) for _, o0, o1 in segments]
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        total = float(cum[-1])

        def _point_at(s: float) -> Point:
            k = int(np.searchsorted(cum, s, side="right")) - 1
            k = min(max(k, 0), len(segments) - 1)
            ei, o0, o1 = segments[k]
            local = s - cum[k]
            off = o0 + local if o1 > o0 else o0 - local
            off = min(max(off, 0.0), self.edges[ei][2])
            return Point(canonical((ei, off)), tag)

        def _coords_at(s: np.ndarray) -> np.ndarray:
            out = np.empty((len(s), 2))
            for i, si in enumerate(s):
                out[i] = _point_at(float(si)).coords
            return out

        return GeodesicPath(a, b, total, _point_at, _coords_at)

    # -- sampling / walking -----------------------------------------------
    def sample_point(self, rng) -> Point:
        lengths = np.array([length for _, _, length in self.edges])
        weights = lengths / lengths.sum()
        ei = int(rng.choice(len(self.edges), p=weights))
        off = float(rng.uniform(0.0, self.edges[ei][2]))
        return Point(self._canonical_coords((ei, off)), self.tag)

    def frontier(self, p: Point, dist: float) -> list[Point]:
        """Points at distance ``dist`` from p in every branch direction,
        clipped to leaves when a branch is shorter."""
        self.check_point(p)
        out: list[Point] = []

        def walk(vi: int, remaining: float, via_edge: int) -> None:
            extended = False
            for ei, nb in self._adj[vi]:
                if ei == via_edge:
                    continue
                extended = True
                u, v, length = self.edges[ei]
                if remaining <= length:
                    off = remaining if vi == self._vindex[u] else length - remaining
                    out.append(Point(self._canonical_coords((ei, off)), self.tag))
                else:
                    walk(nb, remaining - length, ei)
            if not extended:  # leaf: cannot go the full distance
                out.append(Point(self._vertex_coords[vi], self.tag))

        ei, off = int(p.coords[0]), p.coords[1]
        u, v, length = self.edges[ei]
        iu, iv = self._vindex[u], self._vindex[v]
        if off == 0.0 or off == length:
            walk(iu if off == 0.0 else iv, dist, -1)
        else:
            if dist <= off:
                out.append(Point(self._canonical_coords((ei, off - dist)), self.tag))
            else:
                walk(iu, dist - off, ei)
            if dist <= length - off:
                out.append(Point(self._canonical_coords((ei, off + dist)), self.tag))
            else:
                walk(iv, dist - (length - off), ei)

        uniq: dict[tuple, Point] = {}
        for q in out:
            uniq.setdefault(q.coords, q)
        return list(uniq.values())


# ---------------------------------------------------------------------------
# construction helpers
# ---------------------------------------------------------------------------

_KINDS = {
    "euclidean-disk": lambda p: EuclideanDiskSpace(p.get("radius", 1.0)),
    "chebyshev-disk": lambda p: ChebyshevDiskSpace(p.get("radius", 1.0)),
    "circle": lambda p: CircleSpace(p.get("circumference", 1.0),
                                    p.get("tie_break", "ccw")),
    "tree": lambda p: MetricTreeSpace(p["edges"]),
    "plane": lambda p: EuclideanPlaneSpace(),
}


def make_space(descriptor: SpaceDescriptor) -> Space:
    """Instantiate the backend a descriptor names; validates parameters."""
    if descriptor.kind not in _KINDS:
        raise ValidationError(f"unknown space kind {descriptor.kind!r}")
    return _KINDS[descriptor.kind](descriptor.parameters)


def load_tree_edges(path) -> list[tuple[str, str, float]]:
    """Read a tree edge list: one ``u v length`` triple per line."""
    edges = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 3:
                raise ValidationError(
                    f"{path}:{lineno}: expected 'u v length', got {text!r}"
                )
            try:
                length = float(parts[2])
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: bad length {parts[2]!r}"
                ) from None
            edges.append((parts[0], parts[1], length))
    return edges
