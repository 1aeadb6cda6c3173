"""Collision geometry derived from sprite alpha masks.

A body's collision shape is the convex hull of its opaque pixels (treated
as unit squares, so a 10x10 solid mask yields a 10x10 square of area 100),
simplified to at most 32 vertices. Vertices are counter-clockwise in a
y-down pixel coordinate system and expressed relative to the sprite's
top-left corner; the centroid doubles as the center of mass.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShape, EmptyMask

OPAQUE_THRESHOLD = 127
MAX_VERTICES = 32
SIMPLIFY_TOLERANCE = 0.5  # px


@dataclass(frozen=True)
class ConvexShape:
    vertices: np.ndarray  # Nx2 float, CCW, relative to sprite origin
    area: float  # px^2
    centroid: np.ndarray  # (x, y) px in sprite frame

    @property
    def local_vertices(self):
        """Vertices relative to the centroid (body frame)."""
        return self.vertices - self.centroid


def convex_hull(points):
    """Andrew's monotone chain; returns hull points in CCW order (y-down)."""
    pts = sorted({(float(x), float(y)) for x, y in points})
    if len(pts) <= 2:
        return np.asarray(pts, dtype=float)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.asarray(lower[:-1] + upper[:-1], dtype=float)
    return ensure_ccw(hull)


def ensure_ccw(vertices):
    """Orient a polygon so its shoelace sum is positive.

    With that orientation the outward normal of edge a->b is
    (b.y - a.y, a.x - b.x), which the collision code relies on.
    """
    v = np.asarray(vertices, dtype=float)
    if len(v) >= 3:
        x, y = v[:, 0], v[:, 1]
        if (x * np.roll(y, -1) - np.roll(x, -1) * y).sum() < 0:
            return v[::-1].copy()
    return v


def _point_segment_distance(points, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(points - a, axis=1)
    t = np.clip((points - a) @ ab / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.linalg.norm(points - proj, axis=1)


def _simplify_chain(points, tol):
    """Douglas-Peucker on an open chain."""
    if len(points) <= 2:
        return points
    d = _point_segment_distance(points[1:-1], points[0], points[-1])
    idx = int(np.argmax(d))
    if d[idx] <= tol:
        return points[[0, -1]]
    left = _simplify_chain(points[: idx + 2], tol)
    right = _simplify_chain(points[idx + 1 :], tol)
    return np.concatenate([left[:-1], right])


def simplify_polygon(vertices, tol=SIMPLIFY_TOLERANCE, max_vertices=MAX_VERTICES):
    """Douglas-Peucker on a closed polygon, capped at max_vertices."""
    verts = np.asarray(vertices, dtype=float)
    while True:
        if len(verts) > 3:
            # Split at the two most distant vertices so both chains are open.
            i = int(np.argmin(verts[:, 0] + verts[:, 1] * 1e-9))
            rolled = np.roll(verts, -i, axis=0)
            j = int(np.argmax(np.linalg.norm(rolled - rolled[0], axis=1)))
            chain_a = _simplify_chain(rolled[: j + 1], tol)
            chain_b = _simplify_chain(
                np.concatenate([rolled[j:], rolled[:1]]), tol
            )
            verts = np.concatenate([chain_a[:-1], chain_b[:-1]])
        if len(verts) <= max_vertices:
            return verts
        tol *= 2.0


def polygon_area_centroid(vertices):
    """Signed area (positive for CCW in y-down coords... see note) and centroid.

    Returns (|area|, centroid). Works for any simple polygon.
    """
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area2 = cross.sum()
    if area2 == 0.0:
        return 0.0, v.mean(axis=0)
    cx = ((x + xn) * cross).sum() / (3.0 * area2)
    cy = ((y + yn) * cross).sum() / (3.0 * area2)
    return abs(area2) / 2.0, np.array([cx, cy])


def shape_from_mask(alpha):
    """Convex collision shape from an alpha mask (HxW uint8 or bool)."""
    alpha = np.asarray(alpha)
    if alpha.dtype == bool:
        opaque = alpha
    else:
        opaque = alpha > OPAQUE_THRESHOLD
    ys, xs = np.nonzero(opaque)
    if len(xs) == 0:
        raise EmptyMask("alpha mask has no opaque pixel")
    # Treat each opaque pixel (x, y) as the unit square [x, x+1) x [y, y+1).
    # Its four corners suffice for the hull.
    corners = np.concatenate(
        [
            np.stack([xs, ys], axis=1),
            np.stack([xs + 1, ys], axis=1),
            np.stack([xs, ys + 1], axis=1),
            np.stack([xs + 1, ys + 1], axis=1),
        ]
    )
    hull = convex_hull(corners)
    hull = simplify_polygon(hull)
    area, centroid = polygon_area_centroid(hull)
    return ConvexShape(vertices=hull, area=area, centroid=centroid)


def polygon_inertia(vertices, mass, pixels_per_meter=1.0):
    """Moment of inertia (kg * m^2) of a uniform convex polygon.

    `vertices` are in pixels; the polygon is taken about its own centroid.
    """
    area, centroid = polygon_area_centroid(vertices)
    if area == 0.0:
        raise DegenerateShape("polygon has zero area")
    v = np.asarray(vertices, dtype=float) - centroid
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    num = (cross * (x * x + x * xn + xn * xn + y * y + y * yn + yn * yn)).sum()
    area2 = cross.sum()
    inertia_px2 = mass * num / (6.0 * area2)  # mass-normalized second moment
    return abs(inertia_px2) / (pixels_per_meter ** 2)
