"""Perspective-consistent scaling: apparent size as a function of depth.

The scale of a sprite at depth displacement d (in pixels, measured from
the body's initial depth) is S(d) = S0 * f / (f + d). The displacement is
converted from meters via pixels_per_meter so f and d share units.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SingularDepth

EPSILON = 1e-6  # px; below this the object has reached the camera plane


@dataclass(frozen=True)
class ScaleModel:
    focal_length: float  # px
    base_scale: float = 1.0  # scale at zero displacement

    def __post_init__(self):
        if self.focal_length <= 0:
            raise ValueError("focal_length must be > 0")
        if self.base_scale <= 0:
            raise ValueError("base_scale must be > 0")


def scale_factor(model, displacement_px, body_id="?"):
    """S0 * f / (f + d); strictly decreasing in the displacement."""
    denom = model.focal_length + displacement_px
    if denom <= EPSILON:
        raise SingularDepth(body_id, denom)
    return model.base_scale * model.focal_length / denom


def scale_for_depth(model, depth_displacement_m, pixels_per_meter, body_id="?"):
    """Scale factor for a depth displacement given in meters."""
    return scale_factor(model, depth_displacement_m * pixels_per_meter, body_id)


def apparent_size(width, height, model, displacement_px, body_id="?"):
    """Scaled sprite bounding box (w, h), centered on the body's anchor."""
    s = scale_factor(model, displacement_px, body_id)
    return width * s, height * s
