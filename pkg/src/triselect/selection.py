"""Find a point lying in many triangles spanned by a planar point set.

Pipeline: shear to distinct x, give every triangle a base (its edge with
the longest x-projection), drop sparse bases, bucket the rest by size on
a base-4 scale, keep the richest level, pair triangles sharing a base,
select a common x-coordinate z0 for many pairs by weighted 1-D selection,
lift each pair to a vertical segment on the line x = z0, and stab those
segments at their deepest point x0.

Every counting step is re-checked on the concrete instance and recorded
as a :class:`ChainCheck` inside the returned :class:`SelectionCertificate`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import InputError, SelectionError
from .geometry import (
    Point2,
    PointSet,
    Triangle,
    TriangleSet,
    check_triangles,
    count_containing,
    cross,
    require_general_position,
    shear_to_distinct_x,
    strictly_inside,
    unshear,
    y_at,
)
from .instance import instance_digest
from .intervals import (
    Interval1,
    IntervalMultiset,
    StabbingResult,
    WeightedSelection,
    max_stabbing,
    weighted_select,
)

__all__ = [
    "BaseGroup", "LevelBucket", "ProjectedPair", "LiftedSegment", "ChainCheck",
    "SelectionCertificate", "SelectionTrace", "triangle_base", "assign_bases",
    "prune_sparse_bases", "bucket_level", "max_level", "bucket_bases", "choose_level",
    "build_projected_pairs", "lift_to_vertical", "run_selection", "trace_selection",
    "count_containing", "bound_rhs",
]

MAX_Z0_RETRIES = 32


@dataclass(frozen=True)
class BaseGroup:
    base: tuple[int, int]
    apexes: tuple[int, ...]

    @property
    def m_ab(self) -> int:
        return len(self.apexes)

    def triangles(self) -> list[Triangle]:
        a, b = self.base
        return [Triangle(a, b, c) for c in self.apexes]


@dataclass(frozen=True)
class LevelBucket:
    j: int
    bases: tuple[BaseGroup, ...]

    @property
    def m_j(self) -> int:
        return sum(g.m_ab for g in self.bases)

    @property
    def pair_count(self) -> int:
        return sum(g.m_ab * (g.m_ab - 1) // 2 for g in self.bases)

    def triangles(self) -> list[Triangle]:
        return [tri for g in self.bases for tri in g.triangles()]


class ProjectedPair(NamedTuple):
    """Two triangles abc, abd on a common base; a.x < b.x and c.x < d.x."""

    a: int
    b: int
    c: int
    d: int

    @property
    def base(self) -> tuple[int, int]:
        return self.a, self.b

    @property
    def apex_pair(self) -> tuple[int, int]:
        return self.c, self.d


@dataclass(frozen=True, order=True)
class LiftedSegment:
    y_lo: Fraction
    y_hi: Fraction
    x: Fraction
    witness: ProjectedPair


RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
}


@dataclass(frozen=True)
class ChainCheck:
    name: str
    lhs: Fraction
    relation: str
    rhs: Fraction
    passed: bool
    what: str = ""

    @classmethod
    def evaluate(cls, name: str, lhs, relation: str, rhs, what: str = "") -> "ChainCheck":
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        return cls(name, lhs, relation, rhs, RELATIONS[relation](lhs, rhs), what)


@dataclass
class SelectionCertificate:
    n: int
    m: int
    instance_digest: str
    shear: Fraction
    m_discarded: int
    j_star: int
    j_max_slack: int
    m_j: int
    M0_size: int
    n0: int
    M1_size: int
    n1: int
    levels_used: int
    z0: Fraction
    z0_retries: int
    M2_size: int
    n2: int
    x0: Point2
    x0_input: Point2
    depth_pairs: int
    depth_triangles: int
    covering: list[ProjectedPair]
    bound_rhs: Fraction
    oracle_depth: Optional[int] = None
    chain_checks: list[ChainCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.chain_checks)

    def failures(self) -> list[ChainCheck]:
        return [c for c in self.chain_checks if not c.passed]


@dataclass
class SelectionTrace:
    """Every intermediate object of one run, for tests and verification."""

    points: PointSet
    work: PointSet
    groups: dict[tuple[int, int], BaseGroup]
    kept: dict[tuple[int, int], BaseGroup]
    buckets: list[LevelBucket]
    bucket: LevelBucket
    m0: IntervalMultiset
    weighted: WeightedSelection
    lifted: tuple[LiftedSegment, ...]
    stab: StabbingResult
    certificate: SelectionCertificate


def triangle_base(tri: Triangle, s: PointSet) -> tuple[int, int]:
    """Edge with the longest x-projection, returned left-to-right.

    Ties (only possible with shared x-coordinates) go to the
    lexicographically smallest (left index, right index).
    """
    best = None
    for i, j in tri.edges():
        p, q = s[i], s[j]
        left, right = (i, j) if (p.x, i) < (q.x, j) else (j, i)
        key = (-abs(q.x - p.x), left, right)
        if best is None or key < best:
            best = key
    return best[1], best[2]


def assign_bases(s: PointSet, t: TriangleSet) -> dict[tuple[int, int], BaseGroup]:
    apexes: dict[tuple[int, int], list[int]] = {}
    for tri in t:
        base = triangle_base(tri, s)
        apex = next(v for v in tri if v not in base)
        apexes.setdefault(base, []).append(apex)
    return {base: BaseGroup(base, tuple(sorted(apexes[base]))) for base in sorted(apexes)}


def prune_sparse_bases(groups, m: int, n: int):
    """Drop groups with fewer than m/n^2 triangles; return (kept, discarded count)."""
    kept = {}
    discarded = 0
    for base, g in groups.items():
        if g.m_ab * n * n >= m:
            kept[base] = g
        else:
            discarded += g.m_ab
    return kept, discarded


def bucket_level(m_ab: int, m: int, n: int) -> int:
    """Smallest j >= 1 with m_ab < 4^j m / n^2, by integer comparison."""
    j = 1
    while m_ab * n * n >= 4 ** j * m:
        j += 1
    return j


def max_level(m: int, n: int) -> int:
    """ceil(log_4(n^3 / m)): the largest level a base with m_ab < n can reach."""
    if m > n ** 3:
        raise InputError("bucket range empty")
    k = 0
    while 4 ** k * m < n ** 3:
        k += 1
    return k


def bucket_bases(t_prime, m: int, n: int) -> list[LevelBucket]:
    max_level(m, n)
    levels: dict[int, list[BaseGroup]] = {}
    for g in t_prime.values():
        levels.setdefault(bucket_level(g.m_ab, m, n), []).append(g)
    return [LevelBucket(j, tuple(levels[j])) for j in sorted(levels)]


def level_slack(bucket: LevelBucket) -> int:
    return 2 ** (bucket.j + 1) * bucket.m_j


def rank_levels(buckets: list[LevelBucket]) -> list[LevelBucket]:
    return sorted(buckets, key=lambda b: (-level_slack(b), b.j))


def choose_level(buckets: list[LevelBucket], m: int) -> int:
    """Level maximising 2^(j+1) m_j; ties go to the smaller j."""
    if not buckets:
        raise SelectionError("no surviving bases")
    return rank_levels(buckets)[0].j


def build_projected_pairs(bucket: LevelBucket, s: PointSet) -> IntervalMultiset:
    items = []
    for g in bucket.bases:
        a, b = g.base
        apexes = sorted(g.apexes, key=lambda v: s[v].x)
        for i, c in enumerate(apexes):
            for d in apexes[i + 1:]:
                items.append(Interval1(s[c].x, s[d].x, ProjectedPair(a, b, c, d)))
    m0 = IntervalMultiset.of(items)
    assert len(m0) == bucket.pair_count
    return m0


def _raw_lifts(intervals, z0: Fraction, s: PointSet) -> list[tuple[Fraction, Fraction, ProjectedPair]]:
    pts = s.points
    out = []
    for iv in intervals:
        a, b, c, d = iv.witness
        pa, pb, pc, pd = pts[a], pts[b], pts[c], pts[d]
        if not (pa.x < z0 < pb.x and pc.x < z0 < pd.x):
            raise ValueError(f"z0={z0} is not inside the pair {iv.witness}")
        out.append((y_at(pa, pd, z0), y_at(pb, pc, z0), iv.witness))
    return out


def _lifts_generic(raw) -> bool:
    seen = set()
    for yp, yq, _ in raw:
        if yp == yq:
            return False
        key = (min(yp, yq), max(yp, yq))
        if key in seen:
            return False
        seen.add(key)
    return True


def _clean_lifts(raw, z0: Fraction) -> tuple[LiftedSegment, ...]:
    best: dict[tuple[Fraction, Fraction], ProjectedPair] = {}
    for yp, yq, w in raw:
        if yp == yq:
            continue
        key = (min(yp, yq), max(yp, yq))
        if key not in best or w < best[key]:
            best[key] = w
    return tuple(LiftedSegment(lo, hi, z0, w) for (lo, hi), w in sorted(best.items()))


def lift_to_vertical(m1, z0: Fraction, s: PointSet) -> tuple[LiftedSegment, ...]:
    """Lift each pair abc/abd to the segment between ad and bc on x = z0.

    Zero-length lifts are dropped and identical segments keep only their
    smallest witness.
    """
    z0 = Fraction(z0)
    if any(p.x == z0 for p in s):
        raise ValueError("z0 not in general position")
    return _clean_lifts(_raw_lifts(m1, z0, s), z0)


def bound_rhs(m: int, n: int) -> Fraction:
    """m^3 / (n^6 log2(n)^2); reporting only, so a rational approximation."""
    return Fraction(m ** 3 / (n ** 6 * math.log2(n) ** 2)).limit_denominator(10 ** 12)


def _choose_z0(ws: WeightedSelection, work: PointSet, max_retries: int):
    xs = {p.x for p in work}
    lo, _ = ws.split_gap
    z0 = ws.common_point
    for attempt in range(max_retries + 1):
        if z0 not in xs and _lifts_generic(_raw_lifts(ws.selected, z0, work)):
            return z0, attempt
        if attempt < max_retries:
            z0 = (lo + z0) / 2
    if z0 in xs:
        raise SelectionError(
            f"z0 stays on a point x-coordinate after {max_retries} retries in gap {ws.split_gap}")
    return z0, max_retries


def _off_edge_lines(z0: Fraction, stab: StabbingResult, tris: list[Triangle], work: PointSet) -> Fraction:
    # Keep x0 off every edge line so that each covering pair puts it in an open triangle.
    edges = {e for tri in tris for e in tri.edges()}
    y = stab.point
    for _ in range(len(edges) + 1):
        pt = Point2(z0, y)
        if all(cross(work[i], work[j], pt) != 0 for i, j in edges):
            return y
        y = (stab.gap[0] + y) / 2
    raise SelectionError("could not place x0 off the triangle edges")  # unreachable


def sample_points(seg: LiftedSegment, s: PointSet) -> list[Point2]:
    """Three interior points of ``seg``, none on the witness base line ab."""
    a, b = s[seg.witness.a], s[seg.witness.b]
    out = []
    for t in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        pt = Point2(seg.x, seg.y_lo + t * (seg.y_hi - seg.y_lo))
        if cross(a, b, pt) == 0:
            t += Fraction(1, 8)
            pt = Point2(seg.x, seg.y_lo + t * (seg.y_hi - seg.y_lo))
        out.append(pt)
    return out


def in_pair_union(pt: Point2, w: ProjectedPair, s: PointSet) -> bool:
    a, b, c, d = (s[v] for v in w)
    return strictly_inside(pt, a, b, c) or strictly_inside(pt, a, b, d)


def trace_selection(s: PointSet, t, *, oracle: bool = False,
                    max_retries: int = MAX_Z0_RETRIES) -> SelectionTrace:
    t = check_triangles(s, t)
    n, m = len(s), len(t)
    if n < 4 or m < 2:
        raise InputError("instance too small")
    require_general_position(s)

    work, eps = shear_to_distinct_x(s)
    groups = assign_bases(work, t)
    kept, m_discarded = prune_sparse_bases(groups, m, n)
    buckets = bucket_bases(kept, m, n)
    j_max_slack = choose_level(buckets, m)
    ranked = rank_levels(buckets)
    # The max-slack level can hold only singleton bases when m is small;
    # fall back to the best level that yields at least one pair.
    candidates = [b for b in ranked if b.pair_count > 0]
    if not candidates:
        raise SelectionError("no base carries two triangles; nothing to pair")
    satisfying = [b for b in candidates if b.m_j * 2 ** (b.j + 1) >= m]
    bucket = (satisfying or candidates)[0]
    j = bucket.j

    m0 = build_projected_pairs(bucket, work)
    ws = weighted_select(m0)
    z0, retries = _choose_z0(ws, work, max_retries)
    lifted = lift_to_vertical(ws.selected, z0, work)
    n2 = len({y for seg in lifted for y in (seg.y_lo, seg.y_hi)})
    stab = max_stabbing(IntervalMultiset.of(Interval1(seg.y_lo, seg.y_hi, seg.witness) for seg in lifted))

    t_j = bucket.triangles()
    y_star = _off_edge_lines(z0, stab, t_j, work)
    x0 = Point2(z0, y_star)
    covering = sorted(seg.witness for seg in lifted if seg.y_lo < y_star < seg.y_hi)
    depth_pairs = len(covering)
    assert depth_pairs == stab.depth
    depth_triangles = count_containing(x0, t_j, work)

    checks = [
        ChainCheck.evaluate("C1.discard", m_discarded, "<", Fraction(m, 2),
                            "triangles discarded with sparse bases < m/2"),
        ChainCheck.evaluate("C1.threshold", min(g.m_ab for g in kept.values()), ">=", Fraction(m, n * n),
                            "smallest surviving base group >= m/n^2"),
    ]
    k_max = max_level(m, n)
    in_range = sum(
        1 for b in buckets for g in b.bases
        if 4 ** (b.j - 1) * m <= g.m_ab * n * n < 4 ** b.j * m and 1 <= b.j <= k_max)
    checks.append(ChainCheck.evaluate("C2", in_range, "==", sum(len(b.bases) for b in buckets),
                                      "bases whose size lies in their level's half-open range"))
    checks.append(ChainCheck.evaluate("C3", bucket.m_j, ">=", Fraction(m, 2 ** (j + 1)),
                                      "m_j >= 2^-(j+1) m"))
    checks.append(ChainCheck.evaluate(
        "C4", len(m0), ">=", Fraction(bucket.m_j, 2) * (Fraction(4 ** (j - 1) * m, n * n) - 1),
        "|M0| >= (m_j/2)(4^(j-1) m/n^2 - 1)"))
    n0 = len(m0.endpoint_set)
    checks.append(ChainCheck.evaluate(
        "C5", Fraction(ws.m_prime, ws.n_prime), ">=", Fraction(len(m0), n0 * ws.levels_used),
        "|M1|/n1 >= |M0|/(n0 L)"))
    checks.append(ChainCheck.evaluate("C6", n2, "<=", n * ws.n_prime, "n2 <= n n1"))
    distinct_segments = len({(seg.y_lo, seg.y_hi) for seg in lifted})
    distinct_witnesses = len({seg.witness for seg in lifted})
    checks.append(ChainCheck.evaluate("C7", min(distinct_segments, distinct_witnesses), "==", len(lifted),
                                      "lifted segments and their witnesses are distinct"))
    checks.append(ChainCheck.evaluate(
        "C8", depth_triangles, ">=", math.ceil(Fraction(depth_pairs * n * n, 4 ** j * m)),
        "depth_triangles >= ceil(depth_pairs / (4^j m/n^2))"))
    inside = sum(1 for seg in lifted for pt in sample_points(seg, work) if in_pair_union(pt, seg.witness, work))
    checks.append(ChainCheck.evaluate("C9", inside, "==", 3 * len(lifted),
                                      "sampled lift points inside abc or abd"))

    oracle_depth = None
    if oracle:
        from .oracle import exact_max_depth

        oracle_depth = exact_max_depth(s, t).depth
        checks.append(ChainCheck.evaluate("C10", depth_triangles, "<=", oracle_depth,
                                          "depth_triangles <= exact maximum depth"))

    cert = SelectionCertificate(
        n=n, m=m, instance_digest=instance_digest(s, t), shear=eps,
        m_discarded=m_discarded, j_star=j, j_max_slack=j_max_slack, m_j=bucket.m_j,
        M0_size=len(m0), n0=n0, M1_size=ws.m_prime, n1=ws.n_prime, levels_used=ws.levels_used,
        z0=z0, z0_retries=retries, M2_size=len(lifted), n2=n2,
        x0=x0, x0_input=unshear(x0, eps),
        depth_pairs=depth_pairs, depth_triangles=depth_triangles, covering=covering,
        bound_rhs=bound_rhs(m, n), oracle_depth=oracle_depth, chain_checks=checks,
    )
    return SelectionTrace(s, work, groups, kept, buckets, bucket, m0, ws, lifted, stab, cert)


def run_selection(s: PointSet, t, *, oracle: bool = False) -> SelectionCertificate:
    return trace_selection(s, t, oracle=oracle).certificate
