"""Exact maximum triangle depth by a vertical slab sweep.

Depth is constant on every face of the arrangement of triangle edges, and
between two consecutive x-events (vertices and edge crossings) every face
meets any vertical line. Probing one line per slab therefore sees every
face.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError
from .geometry import Point2, PointSet, Triangle, count_containing, cross, y_at

depth_at = count_containing


@dataclass(frozen=True)
class DepthResult:
    point: Point2
    depth: int
    slab: Optional[tuple[Fraction, Fraction]] = None


def _crossing_x(p: Point2, q: Point2, r: Point2, s: Point2) -> Optional[Fraction]:
    """x of the proper crossing of segments pq and rs, if they cross."""
    if len({p, q, r, s}) < 4:
        return None
    d1, d2 = cross(p, q, r), cross(p, q, s)
    d3, d4 = cross(r, s, p), cross(r, s, q)
    if d1 * d2 >= 0 or d3 * d4 >= 0:
        return None
    t = d3 / (d3 - d4)
    return p.x + t * (q.x - p.x)


def event_xs(s: PointSet, t: Sequence[Triangle]) -> list[Fraction]:
    edges = sorted({e for tri in t for e in tri.edges()})
    xs = {s[v].x for tri in t for v in tri}
    for (i, j), (k, l) in combinations(edges, 2):
        x = _crossing_x(s[i], s[j], s[k], s[l])
        if x is not None:
            xs.add(x)
    return sorted(xs)


def _slab_depth(s: PointSet, t: Sequence[Triangle], edges, x: Fraction):
    # Heights of every edge that spans x, replaced by their rank; the
    # stabbing sweep then runs over small integers.
    height = {}
    for i, j in edges:
        p, q = s[i], s[j]
        if min(p.x, q.x) < x < max(p.x, q.x):
            height[(i, j)] = y_at(p, q, x)
    levels = sorted(set(height.values()))
    rank = {y: r for r, y in enumerate(levels)}
    delta = [0] * (len(levels) + 1)
    for tri in t:
        a, b, c = sorted(tri, key=lambda v: s[v].x)
        if not s[a].x < x < s[c].x:
            continue
        other = (a, b) if x < s[b].x else (b, c)
        r1 = rank[height[tuple(sorted((a, c)))]]
        r2 = rank[height[tuple(sorted(other))]]
        lo, hi = min(r1, r2), max(r1, r2)
        delta[lo] += 1
        delta[hi] -= 1
    best, best_k, depth = 0, None, 0
    for k in range(len(levels) - 1):
        depth += delta[k]
        if depth > best:
            best, best_k = depth, k
    if best_k is None:
        return 0, None
    return best, (levels[best_k] + levels[best_k + 1]) / 2


def exact_max_depth(s: PointSet, t: Iterable[Triangle]) -> DepthResult:
    t = tuple(t)
    if not t:
        raise InputError("no triangles")
    edges = sorted({e for tri in t for e in tri.edges()})
    xs = event_xs(s, t)
    best: Optional[DepthResult] = None
    for x_left, x_right in zip(xs, xs[1:]):
        x = (x_left + x_right) / 2
        depth, y = _slab_depth(s, t, edges, x)
        if y is None:
            continue
        if best is None or depth > best.depth:
            best = DepthResult(Point2(x, y), depth, (x_left, x_right))
    assert best is not None and count_containing(best.point, t, s) == best.depth
    return best


def heuristic_baseline(s: PointSet, t: Iterable[Triangle]) -> DepthResult:
    """Deepest triangle centroid. No guarantee attached."""
    t = tuple(t)
    if not t:
        raise InputError("no triangles")
    best = None
    for tri in t:
        a, b, c = (s[v] for v in tri)
        g = Point2((a.x + b.x + c.x) / 3, (a.y + b.y + c.y) / 3)
        d = count_containing(g, t, s)
        if best is None or d > best.depth or (d == best.depth and g < best.point):
            best = DepthResult(g, d)
    return best


_INT64_SAFE_BITS = 60


def depth_at_many(probes: Sequence[Point2], t: Sequence[Triangle], s: PointSet) -> np.ndarray:
    """Batch version of :func:`depth_at`, exact.

    All coordinates are scaled to one common denominator. The determinants
    run in int64 when their magnitude provably fits, otherwise on Python
    integers in object arrays.
    """
    t = tuple(t)
    if not t or not len(probes):
        return np.zeros(len(probes), dtype=np.int64)
    coords = [c for p in list(s.points) + list(probes) for c in p]
    den = lcm(*(c.denominator for c in coords))
    ints = [c.numerator * (den // c.denominator) for c in coords]
    bits = max(abs(v) for v in ints).bit_length()
    dtype = np.int64 if 2 * (bits + 1) + 2 <= _INT64_SAFE_BITS else object
    arr = np.array(ints, dtype=dtype).reshape(-1, 2)
    P, Q = arr[: len(s)], arr[len(s):]
    tri = np.array([[tr.a, tr.b, tr.c] for tr in t])
    A, B, C = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    qx, qy = Q[:, 0][:, None], Q[:, 1][:, None]

    def side(u, v):
        return (v[:, 0] - u[:, 0])[None, :] * (qy - u[:, 1][None, :]) - \
               (v[:, 1] - u[:, 1])[None, :] * (qx - u[:, 0][None, :])

    s1, s2, s3 = side(A, B), side(B, C), side(C, A)
    inside = ((s1 > 0) & (s2 > 0) & (s3 > 0)) | ((s1 < 0) & (s2 < 0) & (s3 < 0))
    return inside.sum(axis=1).astype(np.int64)
