"""One-dimensional selection on multisets of open intervals.

``max_stabbing`` finds a point of maximum depth by sweeping endpoints.
``weighted_select`` hangs every interval on a balanced binary tree over
the sorted endpoints and returns the node with the best ratio of
intervals to distinct endpoints; all intervals on one node share that
node's split gap, so they have a common interior point.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable

from .errors import InputError
from .geometry import RationalLike, to_rational


@dataclass(frozen=True)
class Interval1:
    lo: Fraction
    hi: Fraction
    witness: Hashable = None

    def __post_init__(self):
        lo, hi = to_rational(self.lo), to_rational(self.hi)
        if not lo < hi:
            raise InputError(f"degenerate interval ({lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, x: Fraction) -> bool:
        return self.lo < x < self.hi


@dataclass(frozen=True)
class IntervalMultiset:
    items: tuple[Interval1, ...]
    endpoint_set: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(sorted(set(to_rational(v) for v in self.endpoint_set)))
        if not set(distinct_endpoints(self.items)) <= set(values):
            raise InputError("interval endpoint missing from endpoint_set")
        if len(values) > 2 * len(self.items):
            raise InputError("endpoint_set larger than twice the number of intervals")
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "endpoint_set", values)

    @classmethod
    def of(cls, items: Iterable[Interval1]) -> "IntervalMultiset":
        items = tuple(items)
        return cls(items, distinct_endpoints(items))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[RationalLike, RationalLike]]) -> "IntervalMultiset":
        return cls.of(Interval1(lo, hi, k) for k, (lo, hi) in enumerate(pairs))

    def __len__(self) -> int:
        return len(self.items)


def distinct_endpoints(items: Iterable[Interval1]) -> tuple[Fraction, ...]:
    values = set()
    for iv in items:
        values.add(iv.lo)
        values.add(iv.hi)
    return tuple(sorted(values))


@dataclass(frozen=True)
class StabbingResult:
    point: Fraction
    depth: int
    covering: tuple[Any, ...]
    gap: tuple[Fraction, Fraction]


def max_stabbing(e: IntervalMultiset) -> StabbingResult:
    """Point of maximum open-interval depth (leftmost deepest gap, midpoint)."""
    if not e.items:
        raise InputError("no intervals")
    delta: Counter = Counter()
    for iv in e.items:
        delta[iv.lo] += 1
        delta[iv.hi] -= 1
    values = sorted(delta)
    depth = 0
    best_depth, best_k = -1, 0
    for k in range(len(values) - 1):
        depth += delta[values[k]]
        if depth > best_depth:
            best_depth, best_k = depth, k
    gap = (values[best_k], values[best_k + 1])
    point = (gap[0] + gap[1]) / 2
    covering = tuple(iv.witness for iv in e.items if iv.lo < point < iv.hi)
    assert len(covering) == best_depth
    return StabbingResult(point, best_depth, covering, gap)


class EndpointTree:
    """Balanced binary tree over sorted distinct endpoints.

    Node ids are heap-style (root 1, children 2i and 2i+1). A node covers
    the index range ``[lo, hi]`` of ``values``; its left child takes the
    first ceil(len/2) indices and the split gap is the open interval
    between the last left value and the first right value. Ranges of a
    single value have no gap.
    """

    def __init__(self, values: Iterable[Fraction]):
        self.values = tuple(sorted(set(values)))
        if len(self.values) < 2:
            raise InputError("need at least two distinct endpoints")
        self.ranges: dict[int, tuple[int, int]] = {}
        self.level: dict[int, int] = {}
        self._build(1, 0, len(self.values) - 1, 1)

    def _build(self, node: int, lo: int, hi: int, level: int) -> None:
        self.ranges[node] = (lo, hi)
        self.level[node] = level
        if hi > lo:
            mid = lo + (hi - lo + 2) // 2 - 1  # last index of the left half
            self._build(2 * node, lo, mid, level + 1)
            self._build(2 * node + 1, mid + 1, hi, level + 1)

    def split_index(self, node: int) -> int:
        lo, hi = self.ranges[node]
        return lo + (hi - lo + 2) // 2 - 1

    def split_gap(self, node: int) -> tuple[Fraction, Fraction] | None:
        lo, hi = self.ranges[node]
        if lo == hi:
            return None
        k = self.split_index(node)
        return self.values[k], self.values[k + 1]

    def gap_levels(self) -> int:
        return max(self.level[v] for v, (lo, hi) in self.ranges.items() if hi > lo)


def assign_canonical_node(iv: Interval1, tree: EndpointTree) -> int:
    """Highest node whose split gap lies inside ``iv``.

    Endpoints are tree values, so an interval that misses a node's gap
    lies wholly on one side of it.
    """
    node = 1
    while True:
        gap = tree.split_gap(node)
        if gap is None:
            raise InputError(f"interval ({iv.lo}, {iv.hi}) has endpoints outside the tree")
        g_lo, g_hi = gap
        if iv.lo <= g_lo and g_hi <= iv.hi:
            return node
        node = 2 * node if iv.hi <= g_lo else 2 * node + 1


@dataclass(frozen=True)
class WeightedSelection:
    selected: tuple[Interval1, ...]
    common_point: Fraction
    m_prime: int
    n_prime: int
    levels_used: int
    node: int
    split_gap: tuple[Fraction, Fraction]
    m: int
    n: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.m_prime, self.n_prime)

    @property
    def guarantee(self) -> Fraction:
        return Fraction(self.m, self.n * self.levels_used)


def partition_by_node(e: IntervalMultiset, tree: EndpointTree) -> dict[int, list[Interval1]]:
    buckets: dict[int, list[Interval1]] = {}
    for iv in e.items:
        buckets.setdefault(assign_canonical_node(iv, tree), []).append(iv)
    return buckets


def weighted_select(e: IntervalMultiset) -> WeightedSelection:
    if not e.items:
        raise InputError("no intervals")
    tree = EndpointTree(e.endpoint_set)
    buckets = partition_by_node(e, tree)

    def key(node):
        ivs = buckets[node]
        m_v, n_v = len(ivs), len(distinct_endpoints(ivs))
        return (Fraction(m_v, n_v), m_v, -node)

    node = max(buckets, key=key)
    chosen = tuple(buckets[node])
    gap = tree.split_gap(node)
    levels_used = len({tree.level[v] for v in buckets})
    result = WeightedSelection(
        selected=chosen,
        common_point=(gap[0] + gap[1]) / 2,
        m_prime=len(chosen),
        n_prime=len(distinct_endpoints(chosen)),
        levels_used=levels_used,
        node=node,
        split_gap=gap,
        m=len(e.items),
        n=len(e.endpoint_set),
    )
    assert levels_used <= len(e.endpoint_set).bit_length()  # floor(log2 |V|) + 1
    assert result.ratio >= result.guarantee, "weighted selection guarantee violated"
    return result
