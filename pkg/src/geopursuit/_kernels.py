"""Hot numeric kernels: distances, geodesic interpolation, boundary clipping.

Two interchangeable backends:

* ``numba`` -- ``@njit`` scalar loops, the default whenever numba imports.
* ``numpy`` -- vectorized expressions, selected with ``PURSUIT_NUMBA=0``
  (or automatically when numba is unavailable).

Both backends perform the same IEEE-754 operations in the same order
(only +, -, *, /, sqrt, abs, min/max, floor; no fastmath, no reductions),
so their outputs are bit-identical.  ``benchmarks/bench_kernels.py`` times
one against the other.

All kernels take C-contiguous float64 arrays.  Circle angles are 1-D
arrays of arc-length positions in [0, circumference).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "active_backend",
    "available_backends",
    "get_backend",
    "KERNEL_NAMES",
]

KERNEL_NAMES = (
    "dist_euclid",
    "dist_euclid_one",
    "dist_cheb",
    "dist_cheb_one",
    "dist_circle",
    "interp_rows",
    "segment_points",
    "circle_arc_points",
    "circle_interp_pairs",
    "disk_clip_frac",
)


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

def _np_dist_euclid(a, b):
    dx = a[:, 0] - b[:, 0]
    dy = a[:, 1] - b[:, 1]
    return np.sqrt(dx * dx + dy * dy)


def _np_dist_euclid_one(p, b):
    dx = p[0] - b[:, 0]
    dy = p[1] - b[:, 1]
    return np.sqrt(dx * dx + dy * dy)


def _np_dist_cheb(a, b):
    return np.maximum(np.abs(a[:, 0] - b[:, 0]), np.abs(a[:, 1] - b[:, 1]))


def _np_dist_cheb_one(p, b):
    return np.maximum(np.abs(p[0] - b[:, 0]), np.abs(p[1] - b[:, 1]))


def _np_dist_circle(a, b, circ):
    delta = np.abs(a - b)
    return np.minimum(delta, circ - delta)


def _np_interp_rows(a, b, frac):
    f = frac[:, None]
    return a + f * (b - a)


def _np_segment_points(a, b, s, length):
    f = (s / length)[:, None]
    return a + f * (b - a)


def _np_wrap(x, circ):
    w = x - circ * np.floor(x / circ)
    w = np.where(w >= circ, w - circ, w)
    return np.where(w < 0.0, 0.0, w)


def _np_circle_arc_points(start, direction, s, circ):
    return _np_wrap(start + direction * s, circ)


def _np_circle_interp_pairs(a, b, frac, circ, tie):
    half = 0.5 * circ
    fwd = _np_wrap(b - a, circ)
    if tie >= 0.0:
        ccw = fwd <= half
    else:
        ccw = fwd < half
    direction = np.where(ccw, 1.0, -1.0)
    arc = np.where(ccw, fwd, circ - fwd)
    return _np_wrap(a + direction * frac * arc, circ)


def _np_disk_clip_frac(m, v, r):
    vv = v[:, 0] * v[:, 0] + v[:, 1] * v[:, 1]
    mv = m[:, 0] * v[:, 0] + m[:, 1] * v[:, 1]
    c0 = m[:, 0] * m[:, 0] + m[:, 1] * m[:, 1] - r * r
    disc = mv * mv - vv * c0
    disc = np.where(disc < 0.0, 0.0, disc)
    safe_vv = np.where(vv > 0.0, vv, 1.0)
    t = (-mv + np.sqrt(disc)) / safe_vv
    t = np.where(vv > 0.0, t, 1.0)
    t = np.where(t < 0.0, 0.0, t)
    return np.where(t > 1.0, 1.0, t)


_NUMPY_BACKEND = {
    "dist_euclid": _np_dist_euclid,
    "dist_euclid_one": _np_dist_euclid_one,
    "dist_cheb": _np_dist_cheb,
    "dist_cheb_one": _np_dist_cheb_one,
    "dist_circle": _np_dist_circle,
    "interp_rows": _np_interp_rows,
    "segment_points": _np_segment_points,
    "circle_arc_points": _np_circle_arc_points,
    "circle_interp_pairs": _np_circle_interp_pairs,
    "disk_clip_frac": _np_disk_clip_frac,
}


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

def _numba_enabled() -> bool:
    flag = os.environ.get("PURSUIT_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


def _build_numba_backend():
    from numba import njit

    @njit(cache=True)
    def dist_euclid(a, b):
        n = a.shape[0]
        out = np.empty(n)
        for i in range(n):
            dx = a[i, 0] - b[i, 0]
            dy = a[i, 1] - b[i, 1]
            out[i] = np.sqrt(dx * dx + dy * dy)
        return out

    @njit(cache=True)
    def dist_euclid_one(p, b):
        n = b.shape[0]
        out = np.empty(n)
        for i in range(n):
            dx = p[0] - b[i, 0]
            dy = p[1] - b[i, 1]
            out[i] = np.sqrt(dx * dx + dy * dy)
        return out

    @njit(cache=True)
    def dist_cheb(a, b):
        n = a.shape[0]
        out = np.empty(n)
        for i in range(n):
            dx = abs(a[i, 0] - b[i, 0])
            dy = abs(a[i, 1] - b[i, 1])
            out[i] = max(dx, dy)
        return out

    @njit(cache=True)
    def dist_cheb_one(p, b):
        n = b.shape[0]
        out = np.empty(n)
        for i in range(n):
            dx = abs(p[0] - b[i, 0])
            dy = abs(p[1] - b[i, 1])
            out[i] = max(dx, dy)
        return out

    @njit(cache=True)
    def dist_circle(a, b, circ):
        n = a.shape[0]
        out = np.empty(n)
        for i in range(n):
            delta = abs(a[i] - b[i])
            out[i] = min(delta, circ - delta)
        return out

    @njit(cache=True)
    def interp_rows(a, b, frac):
        n = a.shape[0]
        out = np.empty((n, 2))
        for i in range(n):
            f = frac[i]
            out[i, 0] = a[i, 0] + f * (b[i, 0] - a[i, 0])
            out[i, 1] = a[i, 1] + f * (b[i, 1] - a[i, 1])
        return out

    @njit(cache=True)
    def segment_points(a, b, s, length):
        n = s.shape[0]
        out = np.empty((n, 2))
        for i in range(n):
            f = s[i] / length
            out[i, 0] = a[0] + f * (b[0] - a[0])
            out[i, 1] = a[1] + f * (b[1] - a[1])
        return out

    @njit(cache=True)
    def _wrap1(x, circ):
        w = x - circ * np.floor(x / circ)
        if w >= circ:
            w -= circ
        if w < 0.0:
            w = 0.0
        return w

    @njit(cache=True)
    def circle_arc_points(start, direction, s, circ):
        n = s.shape[0]
        out = np.empty(n)
        for i in range(n):
            out[i] = _wrap1(start + direction * s[i], circ)
        return out

    @njit(cache=True)
    def circle_interp_pairs(a, b, frac, circ, tie):
        half = 0.5 * circ
        n = a.shape[0]
        out = np.empty(n)
        for i in range(n):
            fwd = _wrap1(b[i] - a[i], circ)
            if tie >= 0.0:
                ccw = fwd <= half
            else:
                ccw = fwd < half
            if ccw:
                direction = 1.0
                arc = fwd
            else:
                direction = -1.0
                arc = circ - fwd
            out[i] = _wrap1(a[i] + direction * frac[i] * arc, circ)
        return out

    @njit(cache=True)
    def disk_clip_frac(m, v, r):
        n = m.shape[0]
        out = np.empty(n)
        for i in range(n):
            vv = v[i, 0] * v[i, 0] + v[i, 1] * v[i, 1]
            if vv > 0.0:
                mv = m[i, 0] * v[i, 0] + m[i, 1] * v[i, 1]
                c0 = m[i, 0] * m[i, 0] + m[i, 1] * m[i, 1] - r * r
                disc = mv * mv - vv * c0
                if disc < 0.0:
                    disc = 0.0
                t = (-mv + np.sqrt(disc)) / vv
            else:
                t = 1.0
            if t < 0.0:
                t = 0.0
            if t > 1.0:
                t = 1.0
            out[i] = t
        return out

    return {
        "dist_euclid": dist_euclid,
        "dist_euclid_one": dist_euclid_one,
        "dist_cheb": dist_cheb,
        "dist_cheb_one": dist_cheb_one,
        "dist_circle": dist_circle,
        "interp_rows": interp_rows,
        "segment_points": segment_points,
        "circle_arc_points": circle_arc_points,
        "circle_interp_pairs": circle_interp_pairs,
        "disk_clip_frac": disk_clip_frac,
    }


_BACKENDS = {"numpy": _NUMPY_BACKEND}
_ACTIVE_NAME = "numpy"

if _numba_enabled():
    try:
        _BACKENDS["numba"] = _build_numba_backend()
        _ACTIVE_NAME = "numba"
    except ImportError:
        pass


def active_backend() -> str:
    return _ACTIVE_NAME


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_backend(name: str) -> dict:
    return _BACKENDS[name]


_active = _BACKENDS[_ACTIVE_NAME]
dist_euclid = _active["dist_euclid"]
dist_euclid_one = _active["dist_euclid_one"]
dist_cheb = _active["dist_cheb"]
dist_cheb_one = _active["dist_cheb_one"]
dist_circle = _active["dist_circle"]
interp_rows = _active["interp_rows"]
segment_points = _active["segment_points"]
circle_arc_points = _active["circle_arc_points"]
circle_interp_pairs = _active["circle_interp_pairs"]
disk_clip_frac = _active["disk_clip_frac"]
