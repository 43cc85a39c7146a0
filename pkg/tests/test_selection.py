from fractions import Fraction as F

import pytest

from triselect.errors import InputError, SelectionError
from triselect.generators import FAMILIES, GeneratorSpec, generate
from triselect.geometry import Point2, PointSet, Triangle, count_containing, strictly_inside
from triselect.intervals import Interval1
from triselect.selection import (
    BaseGroup,
    LevelBucket,
    ProjectedPair,
    _raw_lifts,
    assign_bases,
    bucket_bases,
    bucket_level,
    build_projected_pairs,
    choose_level,
    in_pair_union,
    lift_to_vertical,
    prune_sparse_bases,
    run_selection,
    sample_points,
    trace_selection,
)

FIG1 = PointSet.of([(0, 0), (4, 0), (1, 2), (3, 2)])
SQUARE = PointSet.of([(0, 0), (1, 0), (1, 1), (0, 1)])
SQUARE_T = [Triangle(0, 1, 2), Triangle(0, 1, 3), Triangle(0, 2, 3), Triangle(1, 2, 3)]
PARABOLA = PointSet.of([(i, i * i) for i in range(10)])


def groups_of_sizes(sizes):
    out, nxt = {}, 100
    for k, size in enumerate(sizes):
        out[(k, k + 50)] = BaseGroup((k, k + 50), tuple(range(nxt, nxt + size)))
        nxt += size
    return out


class TestAssignBases:
    def test_longest_projection(self):
        s = PointSet.of([(0, 0), (3, 1), (1, 2)])
        groups = assign_bases(s, [Triangle(0, 1, 2)])
        assert list(groups) == [(0, 1)] and groups[(0, 1)].apexes == (2,)

    def test_shared_base(self):
        groups = assign_bases(FIG1, [Triangle(0, 1, 2), Triangle(0, 1, 3)])
        assert list(groups) == [(0, 1)] and groups[(0, 1)].m_ab == 2

    def test_base_is_left_to_right(self):
        s = PointSet.of([(5, 0), (0, 1), (2, 3)])
        assert list(assign_bases(s, [Triangle(0, 1, 2)])) == [(1, 0)]

    def test_tie_break(self):
        # (0,1) and (0,2) both project to length 2; the smaller pair wins.
        s = PointSet.of([(0, 0), (2, 1), (2, 5)])
        assert list(assign_bases(s, [Triangle(0, 1, 2)])) == [(0, 1)]

    @pytest.mark.parametrize("family", FAMILIES)
    def test_partition(self, family):
        s, t = generate(GeneratorSpec(family, 9, 50, 4))
        groups = assign_bases(s, t)
        assert sum(g.m_ab for g in groups.values()) == len(t)
        for (a, b), g in groups.items():
            assert s[a].x < s[b].x
            assert all(s[a].x < s[c].x < s[b].x for c in g.apexes)


class TestPrune:
    def test_nothing_below_threshold(self):
        kept, dropped = prune_sparse_bases(groups_of_sizes([1, 1, 2]), 4, 4)
        assert dropped == 0 and len(kept) == 3

    def test_tiny_threshold(self):
        kept, dropped = prune_sparse_bases(groups_of_sizes([1]), 1, 3)
        assert dropped == 0 and len(kept) == 1

    def test_singletons_dropped(self):
        kept, dropped = prune_sparse_bases(groups_of_sizes([1, 1, 3, 195]), 200, 10)
        assert dropped == 2
        assert sorted(g.m_ab for g in kept.values()) == [3, 195]
        assert sum(g.m_ab for g in kept.values()) == 198 >= 100


class TestBucket:
    def test_left_edge(self):
        assert bucket_level(1, 100, 10) == 1

    def test_half_open(self):
        assert bucket_level(4, 100, 10) == 2
        assert bucket_level(3, 100, 10) == 1

    def test_between_powers(self):
        assert bucket_level(7, 100, 10) == 2

    def test_range_empty(self):
        with pytest.raises(InputError, match="bucket range empty"):
            bucket_bases({}, 1001, 10)

    def test_buckets_sorted_and_summed(self):
        buckets = bucket_bases(groups_of_sizes([1, 4, 7, 20]), 100, 10)
        assert [b.j for b in buckets] == [1, 2, 3]
        assert [b.m_j for b in buckets] == [1, 11, 20]


def bucket(j, m_j):
    return LevelBucket(j, (BaseGroup((0, 1), tuple(range(2, 2 + m_j))),))


class TestChooseLevel:
    def test_single_level(self):
        assert choose_level([bucket(1, 6)], 8) == 1

    def test_more_slack_on_level_two(self):
        assert choose_level([bucket(1, 1), bucket(2, 3)], 8) == 2

    def test_equal_sizes_pick_the_top(self):
        assert choose_level([bucket(1, 2), bucket(2, 2), bucket(3, 2)], 12) == 3


class TestProjectedPairs:
    @pytest.mark.parametrize("sizes, expected", [([3], 3), ([1], 0), ([2, 4], 7)])
    def test_counts(self, sizes, expected):
        apexes = iter(range(1, 9))
        groups = tuple(BaseGroup((0, 9), tuple(next(apexes) for _ in range(k))) for k in sizes)
        m0 = build_projected_pairs(LevelBucket(1, groups), PARABOLA)
        assert len(m0) == expected
        for iv in m0.items:
            a, b, c, d = iv.witness
            assert (iv.lo, iv.hi) == (PARABOLA[c].x, PARABOLA[d].x)


class TestLift:
    pair = ProjectedPair(0, 1, 2, 3)

    def test_figure_one(self):
        (seg,) = lift_to_vertical([Interval1(1, 3, self.pair)], F(3, 2), FIG1)
        assert (seg.y_lo, seg.y_hi) == (1, F(5, 3))
        assert strictly_inside(Point2(F(3, 2), F(4, 3)), FIG1[0], FIG1[1], FIG1[2])

    def test_symmetric_lift_is_dropped(self):
        (raw,) = _raw_lifts([Interval1(1, 3, self.pair)], F(2), FIG1)
        assert raw[0] == raw[1] == F(4, 3)
        assert lift_to_vertical([Interval1(1, 3, self.pair)], F(2), FIG1) == ()

    def test_mirror_keeps_length(self):
        mirrored = PointSet(tuple(Point2(-p.x, p.y) for p in FIG1))
        (seg,) = lift_to_vertical([Interval1(-3, -1, ProjectedPair(1, 0, 3, 2))], F(-3, 2), mirrored)
        assert seg.y_hi - seg.y_lo == F(5, 3) - 1

    def test_z0_on_point(self):
        s = PointSet.of([(0, 0), (4, 0), (1, 2), (3, 2), (2, 7)])
        with pytest.raises(ValueError, match="z0 not in general position"):
            lift_to_vertical([Interval1(1, 3, self.pair)], F(2), s)

    def test_samples_inside_union(self):
        (seg,) = lift_to_vertical([Interval1(1, 3, self.pair)], F(3, 2), FIG1)
        assert all(in_pair_union(pt, seg.witness, FIG1) for pt in sample_points(seg, FIG1))


class TestCountContaining:
    def test_outside_hull(self):
        assert count_containing(Point2(5, 5), SQUARE_T, SQUARE) == 0

    def test_lone_triangle(self):
        s = PointSet.of([(0, 0), (3, 0), (0, 3)])
        assert count_containing(Point2(1, 1), [Triangle(0, 1, 2)], s) == 1

    def test_square(self):
        # (1/2, 1/4) is below the diagonal y = x and the anti-diagonal x + y = 1
        assert count_containing(Point2(F(1, 2), F(1, 4)), SQUARE_T, SQUARE) == 2


class TestRunSelection:
    def test_figure_one_pipeline(self):
        tr = trace_selection(FIG1, [Triangle(0, 1, 2), Triangle(0, 1, 3)])
        c = tr.certificate
        assert c.passed and c.depth_triangles >= 1
        assert count_containing(c.x0_input, [Triangle(0, 1, 2), Triangle(0, 1, 3)], FIG1) >= 1
        assert len(tr.lifted) == 1

    def test_square(self):
        c = run_selection(SQUARE, SQUARE_T, oracle=True)
        assert c.passed and c.depth_triangles in (1, 2) and c.oracle_depth == 2

    def test_too_small(self):
        with pytest.raises(InputError, match="instance too small"):
            run_selection(PointSet.of([(0, 0), (1, 0), (0, 1)]), [Triangle(0, 1, 2)])
        with pytest.raises(InputError, match="instance too small"):
            run_selection(SQUARE, SQUARE_T[:1])

    def test_collinear_rejected(self):
        s = PointSet.of([(0, 0), (1, 1), (2, 2), (0, 5)])
        with pytest.raises(InputError, match="general position violated"):
            run_selection(s, [Triangle(0, 1, 3), Triangle(1, 2, 3)])

    def test_shared_x_input_is_sheared(self):
        s = PointSet.of([(0, 0), (0, 3), (2, 1), (4, 4), (5, 0)])
        t = [Triangle(*x) for x in [(0, 1, 2), (0, 1, 3), (0, 2, 4), (1, 3, 4), (0, 3, 4), (2, 3, 4)]]
        c = run_selection(s, t, oracle=True)
        assert c.passed and c.shear > 0 and c.depth_triangles >= 1

    def test_no_pairs(self):
        s, t = generate(GeneratorSpec("random_integer", 8, 6, 1))
        with pytest.raises(SelectionError, match="no base carries two triangles"):
            run_selection(s, t)

    def test_level_fallback(self):
        s, t = generate(GeneratorSpec("random_integer", 8, 6, 2))
        c = run_selection(s, t)
        assert (c.j_max_slack, c.j_star) == (2, 3)
        assert c.passed and c.depth_triangles >= 1

    @pytest.mark.parametrize("family", FAMILIES)
    @pytest.mark.parametrize("n, m", [(8, "ALL"), (10, 100), (12, 144)])
    def test_chain_passes(self, family, n, m):
        s, t = generate(GeneratorSpec(family, n, m, 11))
        tr = trace_selection(s, t)
        c = tr.certificate
        assert c.passed, c.failures()
        assert c.depth_triangles >= 1
        lo, hi = tr.weighted.split_gap
        assert lo < c.z0 < hi
        assert all(iv.lo < c.z0 < iv.hi for iv in tr.weighted.selected)

    def test_triangle_order_irrelevant(self):
        s, t = generate(GeneratorSpec("two_clusters", 9, 60, 5))
        assert run_selection(s, t) == run_selection(s, tuple(reversed(t)))
