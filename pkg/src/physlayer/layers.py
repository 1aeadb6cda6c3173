"""Depth discretization into ordered layers and dynamic membership.

Layers are half-open intervals [d_l, d_{l+1}) with -inf/+inf sentinels, so
every depth maps to exactly one layer. Boundaries come from exact 1-D
k-means over the bodies' initial depths (optimal clusters of sorted 1-D
data are contiguous, so dynamic programming over prefix sums finds the
global optimum deterministically), with cluster edges at midpoints between
adjacent cluster means.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidOverride

MAX_LAYERS = 8


@dataclass(frozen=True)
class LayerSet:
    boundaries: tuple  # ascending, boundaries[0] = -inf, boundaries[-1] = +inf
    membership: dict  # body id -> layer index

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(self.boundaries))

    @property
    def layer_count(self):
        return len(self.boundaries) - 1


def compute_layer_count(n_dynamic, override=None):
    """Number of depth layers for a scene with n_dynamic dynamic bodies."""
    if override is not None:
        if override < 1:
            raise InvalidOverride(override)
        return int(override)
    return min(max(math.ceil(n_dynamic / 2), 1), MAX_LAYERS)


def _kmeans_1d(values, k):
    """Exact 1-D k-means on sorted values; returns cluster means.

    DP over contiguous segments minimizing within-cluster sum of squares.
    """
    xs = np.sort(np.asarray(values, dtype=float))
    n = len(xs)
    prefix = np.concatenate(([0.0], np.cumsum(xs)))
    prefix_sq = np.concatenate(([0.0], np.cumsum(xs * xs)))

    def sse(i, j):
        # cost of cluster xs[i:j]
        s = prefix[j] - prefix[i]
        s2 = prefix_sq[j] - prefix_sq[i]
        return s2 - s * s / (j - i)

    INF = float("inf")
    cost = [[INF] * (n + 1) for _ in range(k + 1)]
    split = [[0] * (n + 1) for _ in range(k + 1)]
    cost[0][0] = 0.0
    for c in range(1, k + 1):
        for j in range(c, n + 1):
            best, best_i = INF, c - 1
            for i in range(c - 1, j):
                candidate = cost[c - 1][i] + sse(i, j)
                if candidate < best - 1e-15:
                    best, best_i = candidate, i
            cost[c][j] = best
            split[c][j] = best_i
    # Recover segment boundaries.
    cuts = [n]
    j = n
    for c in range(k, 0, -1):
        j = split[c][j]
        cuts.append(j)
    cuts.reverse()
    means = [float(xs[cuts[i]:cuts[i + 1]].mean()) for i in range(k)]
    return means


def partition_depths(depths, layer_count):
    """Depth boundaries for `layer_count` layers from initial body depths.

    Requested counts beyond the number of distinct depths collapse to the
    distinct-depth count. Returns the full boundary tuple including the
    -inf / +inf sentinels.
    """
    depths = [float(d) for d in depths]
    if layer_count <= 1 or not depths:
        return (-math.inf, math.inf)
    distinct = len(set(depths))
    k = min(layer_count, distinct)
    if k <= 1:
        return (-math.inf, math.inf)
    means = sorted(_kmeans_1d(depths, k))
    inner = [(means[i] + means[i + 1]) / 2.0 for i in range(k - 1)]
    return (-math.inf, *inner, math.inf)


def assign_layer(depth, boundaries):
    """The unique l with boundaries[l] <= depth < boundaries[l+1]."""
    return bisect.bisect_right(boundaries, depth, 1, len(boundaries) - 1) - 1


def build_layer_set(bodies, boundaries):
    """Initial LayerSet for (id, depth, is_static) triples."""
    membership = {
        body_id: assign_layer(depth, boundaries)
        for body_id, depth, _static in bodies
    }
    return LayerSet(boundaries, membership)


def reassign(layer_set, body_depths, static_ids=()):
    """Recompute membership from current depths; statics keep their layer."""
    static_ids = set(static_ids)
    membership = {}
    for body_id, depth in body_depths.items():
        if body_id in static_ids:
            membership[body_id] = layer_set.membership[body_id]
        else:
            membership[body_id] = assign_layer(depth, layer_set.boundaries)
    return LayerSet(layer_set.boundaries, membership)
