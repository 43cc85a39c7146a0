"""Seeded instance generators.

Points have integer coordinates in a box of side 8 n^4 and are rejection
sampled one at a time; every finished set is re-validated exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb, isqrt
from typing import Union

from .errors import InputError
from .geometry import Point2, PointSet, Triangle, TriangleSet, cross, validate_general_position

FAMILIES = ("uniform_grid_perturbed", "random_integer", "convex_position", "two_clusters")
ALL = "ALL"
MAX_REJECTIONS = 1000


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    n: int
    m: Union[int, str] = ALL
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.n < 4:
            raise InputError("n must be at least 4")
        if not 0 <= self.seed < 2 ** 64:
            raise InputError("seed must be a 64-bit unsigned integer")
        if self.m != ALL:
            if not isinstance(self.m, int) or self.m < 1:
                raise InputError("m must be a positive integer or ALL")
            if self.m > comb(self.n, 3):
                raise InputError("m exceeds C(n,3)")


def _box(n: int) -> int:
    return 8 * n ** 4


def _candidates(family: str, n: int, rng: random.Random):
    side = _box(n)
    if family == "random_integer":
        while True:
            yield rng.randrange(side), rng.randrange(side)
    elif family == "uniform_grid_perturbed":
        k = isqrt(n - 1) + 1
        cell = side // k
        cells = [(i, j) for i in range(k) for j in range(k)]
        rng.shuffle(cells)
        idx = 0
        while True:
            i, j = cells[idx % len(cells)]
            idx += 1
            yield i * cell + rng.randrange(cell), j * cell + rng.randrange(cell)
    elif family == "convex_position":
        # Two parabolic arcs bounding a convex lens: lower y = (x-c)^2,
        # upper y = 2c^2 - (x-c)^2, |x - c| <= c. Every point is extreme.
        c = 2 * n * n
        while True:
            x = rng.randrange(2 * c + 1)
            u = (x - c) ** 2
            yield x, (u if rng.random() < 0.5 else 2 * c * c - u)
    elif family == "two_clusters":
        w = side // 8
        while True:
            if rng.random() < 0.5:
                yield rng.randrange(w), rng.randrange(w)
            else:
                yield side - 1 - rng.randrange(w), side - 1 - rng.randrange(w)


def _acceptable(p: Point2, accepted: list[Point2]) -> bool:
    if any(q.x == p.x for q in accepted):
        return False
    return all(cross(q, r, p) != 0 for q, r in combinations(accepted, 2))


def gen_points(spec: GeneratorSpec) -> PointSet:
    rng = random.Random(f"{spec.family}:{spec.n}:{spec.seed}")
    accepted: list[Point2] = []
    rejections = 0
    for x, y in _candidates(spec.family, spec.n, rng):
        p = Point2(x, y)
        if _acceptable(p, accepted):
            accepted.append(p)
            rejections = 0
            if len(accepted) == spec.n:
                break
        else:
            rejections += 1
            if rejections >= MAX_REJECTIONS:
                raise InputError("generator degenerate")
    s = PointSet(tuple(accepted), label=f"{spec.family}-n{spec.n}-s{spec.seed}")
    report = validate_general_position(s)
    if not report.clean:
        raise InputError(f"generator produced a degenerate set: {report.describe()}")
    return s


def gen_triangles(s: PointSet, m: Union[int, str] = ALL, seed: int = 0) -> TriangleSet:
    n = len(s)
    triples = list(combinations(range(n), 3))
    if m == ALL:
        chosen = triples
    else:
        if m > len(triples):
            raise InputError("m exceeds C(n,3)")
        if m < 0:
            raise InputError("m must be non-negative")
        chosen = sorted(random.Random(f"triangles:{n}:{seed}").sample(triples, m))
    return tuple(Triangle(*tri) for tri in chosen)


def generate(spec: GeneratorSpec) -> tuple[PointSet, TriangleSet]:
    s = gen_points(spec)
    return s, gen_triangles(s, spec.m, spec.seed)
