"""Motion-guided frame composition.

Each body's sprite is warped by rotation about its mask centroid, uniform
depth-dependent scale, and translation to the simulated position, then
alpha-blended onto the background far-to-near (painter's algorithm).
Resampling is inverse-mapped bilinear on premultiplied alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooManyFrames
from .perspective import ScaleModel, scale_for_depth
from .shapes import shape_from_mask


@dataclass(frozen=True)
class AffineTransform:
    """Rotation and uniform scale about the sprite anchor, plus translation.

    Forward map: world = R(theta) * S * (p - anchor) + translation, where
    `anchor` is in sprite pixel coordinates and `translation` is the world
    position of the anchor.
    """

    theta: float
    scale: float
    anchor: tuple  # (x, y) in sprite coords
    translation: tuple  # (x, y) world px

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale must be > 0")

    def forward(self, points):
        p = np.atleast_2d(points).astype(float) - self.anchor
        c, s = math.cos(self.theta), math.sin(self.theta)
        rot = np.array([[c, -s], [s, c]])
        return p @ (self.scale * rot).T + self.translation

    def inverse(self, points):
        p = np.atleast_2d(points).astype(float) - self.translation
        c, s = math.cos(self.theta), math.sin(self.theta)
        inv = np.array([[c, s], [-s, c]]) / self.scale
        return p @ inv.T + self.anchor


def sample_frames(steps, n_frames):
    """Uniform step indices over the steps+1 recorded states.

    floor(k * (steps + 1) / n_frames) for k in [0, n): 160 steps at 16
    frames gives {0, 10, ..., 150}, and n = steps + 1 selects every step.
    """
    if n_frames > steps + 1:
        raise TooManyFrames(n_frames, steps)
    return [k * (steps + 1) // n_frames for k in range(n_frames)]


def premultiply(rgba):
    """uint8 RGBA -> float premultiplied RGBA in [0, 1]."""
    out = rgba.astype(np.float64) / 255.0
    out[..., :3] *= out[..., 3:4]
    return out


def unpremultiply(prgba):
    out = prgba.copy()
    alpha = out[..., 3:4]
    nz = alpha[..., 0] > 0
    out[nz, :3] = np.clip(out[nz, :3] / alpha[nz], 0.0, 1.0)
    return out


def bilinear_sample(image, xs, ys):
    """Sample float image (HxWxC) at fractional pixel centers.

    Coordinates are in pixel-center convention: (0, 0) is the center of
    the top-left pixel. Out-of-bounds samples are zero (transparent).
    """
    h, w = image.shape[:2]
    x0 = np.floor(xs).astype(int)
    y0 = np.floor(ys).astype(int)
    fx = xs - x0
    fy = ys - y0
    out = np.zeros(xs.shape + (image.shape[2],), dtype=image.dtype)
    for dy in (0, 1):
        for dx in (0, 1):
            xi = x0 + dx
            yi = y0 + dy
            weight = ((1 - fx) if dx == 0 else fx) * ((1 - fy) if dy == 0 else fy)
            valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
            if not valid.any():
                continue
            sample = np.zeros_like(out)
            sample[valid] = image[yi[valid], xi[valid]]
            out += weight[..., None] * sample
    return out


def warp_patch(premult_image, transform, frame_size):
    """Warp a premultiplied float image into frame space.

    Returns (patch, (x0, y0)) where patch is the resampled premultiplied
    image covering the transformed bounding box clipped to the frame, or
    (None, None) when fully clipped.
    """
    h, w = premult_image.shape[:2]
    fw, fh = frame_size
    corners = np.array(
        [[-0.5, -0.5], [w - 0.5, -0.5], [w - 0.5, h - 0.5], [-0.5, h - 0.5]]
    )
    world = transform.forward(corners)
    x0 = max(int(math.floor(world[:, 0].min())), 0)
    y0 = max(int(math.floor(world[:, 1].min())), 0)
    x1 = min(int(math.ceil(world[:, 0].max())) + 1, fw)
    y1 = min(int(math.ceil(world[:, 1].max())) + 1, fh)
    if x0 >= x1 or y0 >= y1:
        return None, None
    xs, ys = np.meshgrid(np.arange(x0, x1, dtype=float), np.arange(y0, y1, dtype=float))
    src = transform.inverse(np.stack([xs.ravel(), ys.ravel()], axis=1))
    patch = bilinear_sample(
        premult_image, src[:, 0].reshape(xs.shape), src[:, 1].reshape(xs.shape)
    )
    return patch, (x0, y0)


def over_blend(canvas, patch, offset):
    """Alpha-over of a premultiplied patch onto a premultiplied canvas."""
    x0, y0 = offset
    ph, pw = patch.shape[:2]
    region = canvas[y0 : y0 + ph, x0 : x0 + pw]
    alpha = patch[..., 3:4]
    region *= 1.0 - alpha
    region += patch


@dataclass(frozen=True)
class RenderBody:
    """Everything the renderer needs for one body at one trajectory step."""

    body_id: str
    sprite: np.ndarray  # uint8 RGBA
    anchor: tuple  # mask centroid in sprite coords
    x: float
    y: float
    theta: float
    depth: float  # absolute, m (for painter ordering)
    scale: float
    albedo: np.ndarray | None = None
    normals: np.ndarray | None = None


def body_transform(rb):
    return AffineTransform(
        theta=rb.theta, scale=rb.scale, anchor=rb.anchor, translation=(rb.x, rb.y)
    )


def painter_order(bodies):
    """Far first; ties broken by body id ascending."""
    return sorted(bodies, key=lambda rb: (-rb.depth, rb.body_id))


def composite_frame(background, bodies):
    """Composite warped bodies over the background; returns uint8 RGBA."""
    canvas = premultiply(background)
    frame_size = (background.shape[1], background.shape[0])
    for rb in painter_order(bodies):
        patch, offset = warp_patch(
            premultiply(rb.sprite), body_transform(rb), frame_size
        )
        if patch is None:
            continue
        over_blend(canvas, patch, offset)
    out = unpremultiply(canvas)
    return np.clip(np.rint(out * 255.0), 0, 255).astype(np.uint8)


def render_bodies_at_step(scene, traj, step, world_shapes=None):
    """Build RenderBody list for one trajectory step.

    `world_shapes` caches body id -> mask centroid anchors.
    """
    bodies = []
    rec = traj.records[step]
    for spec in scene.bodies:
        if spec.id not in rec:
            continue
        x, y, z, theta, *_rest = rec[spec.id]
        if world_shapes is not None and spec.id in world_shapes:
            anchor = world_shapes[spec.id]
        else:
            # Mask centroid, shifted to the pixel-center coordinate
            # convention used for sampling.
            centroid = shape_from_mask(spec.sprite[:, :, 3]).centroid
            anchor = (centroid[0] - 0.5, centroid[1] - 0.5)
            if world_shapes is not None:
                world_shapes[spec.id] = anchor
        model = ScaleModel(scene.camera.focal_length)
        scale = scale_for_depth(model, z, scene.pixels_per_meter, spec.id)
        bodies.append(
            RenderBody(
                body_id=spec.id,
                sprite=spec.sprite,
                anchor=anchor,
                x=x,
                y=y,
                theta=theta,
                depth=spec.depth + z,
                scale=scale,
                albedo=spec.albedo,
                normals=spec.normals,
            )
        )
    return bodies
