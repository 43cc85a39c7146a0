"""Exact-rational planar primitives.

Every coordinate is a :class:`fractions.Fraction`; there is no floating
point anywhere in this module.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence, Union

from .errors import GeneralPositionError, InputError

Rational = Fraction
RationalLike = Union[int, Fraction, str]


def to_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: they would smuggle rounding into the exact core.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot use {type(value).__name__} as an exact coordinate")


def rational_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, order=True)
class Point2:
    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", to_rational(self.x))
        object.__setattr__(self, "y", to_rational(self.y))

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True, order=True)
class Triangle:
    """Index triple into a PointSet, stored sorted ascending."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        a, b, c = sorted((int(self.a), int(self.b), int(self.c)))
        if a == b or b == c:
            raise InputError(f"triangle needs three distinct vertices, got {(self.a, self.b, self.c)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def edges(self) -> tuple[tuple[int, int], ...]:
        return ((self.a, self.b), (self.a, self.c), (self.b, self.c))


TriangleSet = tuple[Triangle, ...]


@dataclass(frozen=True)
class Segment2:
    p: Point2
    q: Point2

    def __post_init__(self):
        if self.p == self.q:
            raise InputError("segment endpoints coincide")


@dataclass(frozen=True)
class PointSet:
    points: tuple[Point2, ...]
    label: str = "unnamed"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(
            p if isinstance(p, Point2) else Point2(*p) for p in self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> Point2:
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    @classmethod
    def of(cls, coords: Iterable[Sequence[RationalLike]], label: str = "unnamed") -> "PointSet":
        return cls(tuple(Point2(x, y) for x, y in coords), label)


class Orientation(IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


def cross(p: Point2, q: Point2, r: Point2) -> Fraction:
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def orient(p: Point2, q: Point2, r: Point2) -> Orientation:
    d = cross(p, q, r)
    if d > 0:
        return Orientation.CCW
    if d < 0:
        return Orientation.CW
    return Orientation.COLLINEAR


def strictly_inside(pt: Point2, a: Point2, b: Point2, c: Point2) -> bool:
    # Works for either orientation of (a, b, c); any zero means boundary.
    o1 = cross(a, b, pt)
    o2 = cross(b, c, pt)
    o3 = cross(c, a, pt)
    return (o1 > 0 and o2 > 0 and o3 > 0) or (o1 < 0 and o2 < 0 and o3 < 0)


def point_in_triangle_interior(pt: Point2, t: Triangle, s: PointSet) -> bool:
    return strictly_inside(pt, s[t.a], s[t.b], s[t.c])


def count_containing(p: Point2, t: Iterable[Triangle], s: PointSet) -> int:
    """Number of triangles whose open interior contains ``p``."""
    pts = s.points
    return sum(1 for tri in t if strictly_inside(p, pts[tri.a], pts[tri.b], pts[tri.c]))


def x_projection_length(seg: Segment2) -> Fraction:
    return abs(seg.q.x - seg.p.x)


def vertical_line_intersection(seg: Segment2, x0: RationalLike) -> Fraction:
    """y-coordinate where ``seg`` crosses the vertical line x = x0.

    The line must cross the segment strictly between its endpoints.
    """
    x0 = to_rational(x0)
    p, q = seg.p, seg.q
    if not (min(p.x, q.x) < x0 < max(p.x, q.x)):
        raise ValueError("line does not cross segment strictly")
    return p.y + (x0 - p.x) * (q.y - p.y) / (q.x - p.x)


def y_at(p: Point2, q: Point2, x0: Fraction) -> Fraction:
    """Unchecked variant of :func:`vertical_line_intersection` for hot loops."""
    return p.y + (x0 - p.x) * (q.y - p.y) / (q.x - p.x)


def shear_epsilon(s: PointSet) -> Fraction:
    """Half the smallest positive critical shear, or 1 if none exists.

    Two points i, j collide under x' = x + eps*y exactly when
    eps == (x_j - x_i) / (y_i - y_j).
    """
    best = None
    seen = set()
    for p in s.points:
        if p in seen:
            raise InputError("duplicate point")
        seen.add(p)
    for p, q in combinations(s.points, 2):
        if p.y == q.y:
            continue
        ratio = (q.x - p.x) / (p.y - q.y)
        if ratio > 0 and (best is None or ratio < best):
            best = ratio
    return Fraction(1) if best is None else best / 2


def shear(s: PointSet, eps: Fraction) -> PointSet:
    return PointSet(tuple(Point2(p.x + eps * p.y, p.y) for p in s.points), s.label)


def unshear(p: Point2, eps: Fraction) -> Point2:
    return Point2(p.x - eps * p.y, p.y)


def shear_to_distinct_x(s: PointSet) -> tuple[PointSet, Fraction]:
    eps = shear_epsilon(s)
    return shear(s, eps), eps


@dataclass
class GeneralPositionReport:
    collinear: list[tuple[int, int, int]] = field(default_factory=list)
    duplicates: list[tuple[int, int]] = field(default_factory=list)
    duplicate_x: list[tuple[int, int]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (self.collinear or self.duplicates or self.duplicate_x)

    def describe(self) -> str:
        parts = []
        if self.duplicates:
            parts.append(f"duplicate points {self.duplicates[:5]}")
        if self.collinear:
            parts.append(f"collinear triples {self.collinear[:5]}")
        if self.duplicate_x:
            parts.append(f"shared x-coordinates {self.duplicate_x[:5]}")
        return "; ".join(parts) or "clean"


def validate_general_position(s: PointSet) -> GeneralPositionReport:
    report = GeneralPositionReport()
    pts = s.points
    for i, j in combinations(range(len(pts)), 2):
        if pts[i] == pts[j]:
            report.duplicates.append((i, j))
        elif pts[i].x == pts[j].x:
            report.duplicate_x.append((i, j))
    for i, j, k in combinations(range(len(pts)), 3):
        if pts[i] == pts[j] or pts[j] == pts[k] or pts[i] == pts[k]:
            continue
        if cross(pts[i], pts[j], pts[k]) == 0:
            report.collinear.append((i, j, k))
    return report


def require_general_position(s: PointSet) -> None:
    """Raise unless ``s`` has distinct points with no three collinear.

    Shared x-coordinates are tolerated; the shear removes them.
    """
    report = validate_general_position(s)
    if report.duplicates or report.collinear:
        report.duplicate_x.clear()
        raise GeneralPositionError(f"general position violated: {report.describe()}")


def check_triangles(s: PointSet, t: Iterable[Triangle]) -> TriangleSet:
    out = tuple(t)
    n = len(s)
    for k, tri in enumerate(out):
        if not all(0 <= v < n for v in tri):
            raise InputError(f"triangles[{k}]: vertex index out of range 0..{n - 1}")
    if len(set(out)) != len(out):
        raise InputError("triangle list contains duplicates")
    return out
