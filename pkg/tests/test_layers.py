import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from physlayer.errors import InvalidOverride
from physlayer.layers import (
    LayerSet,
    assign_layer,
    build_layer_set,
    compute_layer_count,
    partition_depths,
    reassign,
)


def brute_force_partition(depths, k):
    """Optimal contiguous k-partition of sorted depths by within-cluster SSE."""
    xs = sorted(depths)
    n = len(xs)
    best_cost, best_means = math.inf, None
    for cuts in itertools.combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        cost = 0.0
        means = []
        for i in range(k):
            seg = xs[bounds[i] : bounds[i + 1]]
            mu = sum(seg) / len(seg)
            means.append(mu)
            cost += sum((x - mu) ** 2 for x in seg)
        if cost < best_cost:
            best_cost, best_means = cost, means
    return best_means


class TestLayerCount:
    def test_formula_table(self):
        assert compute_layer_count(16) == 8
        assert compute_layer_count(2) == 1
        assert compute_layer_count(0) == 1
        assert compute_layer_count(3) == 2
        assert compute_layer_count(100) == 8

    def test_matches_clamped_ceiling(self):
        for n in range(0, 40):
            assert compute_layer_count(n) == min(max(math.ceil(n / 2), 1), 8)

    def test_override(self):
        assert compute_layer_count(16, override=3) == 3
        with pytest.raises(InvalidOverride):
            compute_layer_count(4, override=0)


class TestPartition:
    def test_two_clusters_midpoint(self):
        bounds = partition_depths([1.0, 1.1, 5.0, 5.2], 2)
        assert bounds[0] == -math.inf and bounds[-1] == math.inf
        assert bounds[1] == pytest.approx(3.075)

    def test_all_equal_single_layer(self):
        assert partition_depths([2.0, 2.0, 2.0], 1) == (-math.inf, math.inf)
        # distinct-depth collapse also applies with larger L
        assert partition_depths([2.0, 2.0], 4) == (-math.inf, math.inf)

    def test_collapses_to_distinct_count(self):
        bounds = partition_depths([1.0, 2.0], 4)
        assert len(bounds) == 3  # two layers

    def test_matches_brute_force(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randint(2, 9)
            depths = [round(rng.uniform(0, 10), 3) for _ in range(n)]
            k = rng.randint(2, min(4, len(set(depths))))
            expected = sorted(brute_force_partition(depths, k))
            bounds = partition_depths(depths, k)
            inner = [
                (expected[i] + expected[i + 1]) / 2 for i in range(len(expected) - 1)
            ]
            assert list(bounds[1:-1]) == pytest.approx(inner)

    def test_deterministic(self):
        depths = [3.3, 1.2, 8.8, 1.1, 4.4, 9.0]
        assert partition_depths(depths, 3) == partition_depths(depths, 3)
        assert partition_depths(depths, 3) == partition_depths(sorted(depths), 3)


class TestAssign:
    BOUNDS = (-math.inf, 1.0, 3.0, math.inf)

    def test_boundary_is_low_inclusive(self):
        assert assign_layer(1.0, self.BOUNDS) == 1
        assert assign_layer(3.0, self.BOUNDS) == 2

    def test_sentinels(self):
        assert assign_layer(-1e9, self.BOUNDS) == 0
        assert assign_layer(1e9, self.BOUNDS) == 2

    def test_linear_scan_oracle(self):
        rng = random.Random(3)
        bounds = (-math.inf, -2.0, 0.5, 4.0, math.inf)
        for _ in range(1000):
            d = rng.uniform(-10, 10)
            expected = next(
                l
                for l in range(len(bounds) - 1)
                if bounds[l] <= d < bounds[l + 1]
            )
            assert assign_layer(d, bounds) == expected

    @settings(max_examples=200, deadline=None)
    @given(st.floats(allow_nan=False, allow_infinity=False, width=32),
           st.floats(allow_nan=False, allow_infinity=False, width=32))
    def test_monotone(self, d1, d2):
        lo, hi = min(d1, d2), max(d1, d2)
        assert assign_layer(lo, self.BOUNDS) <= assign_layer(hi, self.BOUNDS)

    def test_tiling_uniqueness(self):
        rng = random.Random(11)
        bounds = partition_depths([rng.uniform(0, 10) for _ in range(12)], 5)
        for _ in range(10_000):
            d = rng.uniform(-20, 20)
            l = assign_layer(d, bounds)
            assert bounds[l] <= d < bounds[l + 1]


class TestReassign:
    def make(self):
        bounds = (-math.inf, 2.0, math.inf)
        return build_layer_set(
            [("a", 1.0, False), ("b", 3.0, False), ("wall", 1.0, True)], bounds
        )

    def test_fixpoint_when_nothing_moved(self):
        ls = self.make()
        out = reassign(ls, {"a": 1.0, "b": 3.0, "wall": 1.0}, static_ids=["wall"])
        assert out.membership == ls.membership

    def test_crossing_changes_layer(self):
        ls = self.make()
        out = reassign(ls, {"a": 2.5, "b": 3.0, "wall": 1.0}, static_ids=["wall"])
        assert out.membership["a"] == 1

    def test_statics_pinned(self):
        ls = self.make()
        out = reassign(ls, {"a": 1.0, "b": 3.0, "wall": 99.0}, static_ids=["wall"])
        assert out.membership["wall"] == ls.membership["wall"] == 0

    def test_conservation(self):
        ls = self.make()
        out = reassign(ls, {"a": 9.0, "b": -9.0, "wall": 1.0}, static_ids=["wall"])
        assert set(out.membership) == set(ls.membership)
