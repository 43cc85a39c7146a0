from collections import defaultdict
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from triselect.errors import InputError
from triselect.intervals import (
    EndpointTree,
    Interval1,
    IntervalMultiset,
    assign_canonical_node,
    distinct_endpoints,
    max_stabbing,
    partition_by_node,
    weighted_select,
)


def brute_max_depth(pairs):
    """Deepest open-interval depth over midpoints of every pair of endpoint values."""
    values = sorted({v for p in pairs for v in p})
    best = 0
    for u, v in combinations(values, 2):
        x = (F(u) + F(v)) / 2
        best = max(best, sum(1 for lo, hi in pairs if lo < x < hi))
    return best


pair_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(1, 6)).map(lambda t: (t[0], t[0] + t[1])),
    min_size=1, max_size=25,
)


class TestMaxStabbing:
    def test_three_intervals(self):
        e = IntervalMultiset.from_pairs([(1, 2), (2, 3), (1, 3)])
        r = max_stabbing(e)
        assert r.depth == 2 == brute_max_depth([(1, 2), (2, 3), (1, 3)])
        assert r.point == F(3, 2)
        assert sorted(r.covering) == [0, 2]

    def test_single(self):
        r = max_stabbing(IntervalMultiset.from_pairs([(0, 1)]))
        assert (r.point, r.depth) == (F(1, 2), 1)

    def test_nested_right(self):
        pairs = [(1, 4), (2, 4), (3, 4)]
        r = max_stabbing(IntervalMultiset.from_pairs(pairs))
        assert (r.point, r.depth) == (F(7, 2), 3)
        assert brute_max_depth(pairs) == 3

    def test_empty(self):
        with pytest.raises(InputError, match="no intervals"):
            max_stabbing(IntervalMultiset.of([]))

    def test_degenerate_interval_rejected(self):
        with pytest.raises(InputError):
            Interval1(2, 2)

    @given(pair_lists)
    def test_matches_brute_force(self, pairs):
        r = max_stabbing(IntervalMultiset.from_pairs(pairs))
        assert r.depth == brute_max_depth(pairs)
        assert r.point not in {v for p in pairs for v in p}
        assert len(r.covering) == r.depth


class TestTree:
    def test_full_span_goes_to_root(self):
        tree = EndpointTree(range(1, 9))
        assert assign_canonical_node(Interval1(1, 8), tree) == 1

    @pytest.mark.parametrize("k", range(7))
    def test_adjacent_interval_lands_on_its_gap(self, k):
        tree = EndpointTree(range(1, 9))
        node = assign_canonical_node(Interval1(k + 1, k + 2), tree)
        assert tree.split_gap(node) == (k + 1, k + 2)

    def test_split_rule(self):
        tree = EndpointTree(range(1, 9))
        assert tree.split_gap(1) == (4, 5)
        assert tree.split_gap(2) == (2, 3)
        assert tree.split_gap(3) == (6, 7)
        assert tree.split_gap(4) == (1, 2)
        assert tree.split_gap(8) is None

    def test_interval_reaching_root_gap(self):
        # (2, 5) contains the root gap (4, 5), so the root is its highest node.
        tree = EndpointTree(range(1, 9))
        assert assign_canonical_node(Interval1(2, 5), tree) == 1

    def test_interval_inside_left_half(self):
        tree = EndpointTree(range(1, 9))
        node = assign_canonical_node(Interval1(2, 4), tree)
        assert node == 2 and tree.level[node] == 2

    def test_odd_size_split(self):
        tree = EndpointTree([1, 2, 3])
        assert tree.split_gap(1) == (2, 3)
        assert tree.split_gap(2) == (1, 2)
        assert tree.split_gap(3) is None


class TestWeightedSelect:
    def test_root_gap_shared(self):
        e = IntervalMultiset.from_pairs([(1, 3), (1, 3), (2, 4)])
        w = weighted_select(e)
        assert w.split_gap == (2, 3) and w.node == 1
        assert (w.m_prime, w.n_prime) == (3, 4)
        assert w.common_point == F(5, 2)

    def test_copies_with_wider_endpoint_set(self):
        k = 5
        e = IntervalMultiset(tuple(Interval1(1, 3, i) for i in range(k)), (1, 2, 3))
        w = weighted_select(e)
        assert w.m_prime == k and w.n_prime == 2
        assert w.ratio == F(k, 2)
        assert 1 < w.common_point < 3

    def test_disjoint_pair(self):
        e = IntervalMultiset.from_pairs([(1, 2), (3, 4)])
        w = weighted_select(e)
        tree = EndpointTree(e.endpoint_set)
        nodes = {assign_canonical_node(iv, tree) for iv in e.items}
        assert nodes == {2, 3} and {tree.level[v] for v in nodes} == {2}
        assert (w.m_prime, w.n_prime) == (1, 2)
        # ties on ratio and size go to the smaller node id
        assert w.node == 2 and w.common_point == F(3, 2)
        assert w.ratio >= F(2, 4 * 3)
        assert w.ratio >= w.guarantee

    def test_empty(self):
        with pytest.raises(InputError, match="no intervals"):
            weighted_select(IntervalMultiset.of([]))

    def test_endpoint_set_must_cover(self):
        with pytest.raises(InputError):
            IntervalMultiset((Interval1(1, 3),), (1, 2))


multisets = st.lists(
    st.tuples(st.integers(0, 40), st.integers(1, 15), st.integers(1, 4)),
    min_size=1, max_size=30,
).map(lambda rows: IntervalMultiset.of(
    Interval1(lo, lo + w, (i, c)) for i, (lo, w, mult) in enumerate(rows) for c in range(mult)))


@given(multisets)
def test_weighted_guarantee_and_common_point(e):
    w = weighted_select(e)
    n = len(e.endpoint_set)
    assert w.levels_used <= n.bit_length()
    assert F(w.m_prime, w.n_prime) >= F(len(e), n * w.levels_used)
    assert all(iv.lo < w.common_point < iv.hi for iv in w.selected)
    assert w.n_prime == len(distinct_endpoints(w.selected))


@given(multisets)
def test_partition_properties(e):
    tree = EndpointTree(e.endpoint_set)
    buckets = partition_by_node(e, tree)
    assert sum(len(v) for v in buckets.values()) == len(e)
    for node, ivs in buckets.items():
        g_lo, g_hi = tree.split_gap(node)
        assert all(iv.lo <= g_lo and g_hi <= iv.hi for iv in ivs)
    per_level = defaultdict(list)
    for node, ivs in buckets.items():
        per_level[tree.level[node]].extend(set(distinct_endpoints(ivs)))
    for values in per_level.values():
        counts = defaultdict(int)
        for v in values:
            counts[v] += 1
        assert max(counts.values()) <= 2
