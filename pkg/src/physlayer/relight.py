"""Depth-aware relighting of composited frames.

Foreground pixels are re-shaded as ambient plus Lambertian diffuse over
the warped albedo, with an optional reciprocal depth attenuation:

    shaded = albedo * (ambient + intensity * max(0, normal . light))
             / (1 + attenuation * depth)

Bodies without albedo/normal assets, and all background pixels, pass
through bitwise unchanged. Normal maps use the n = 2c - 1 RGB encoding;
warping rotates the in-plane components by the body rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compositor import (
    body_transform,
    over_blend,
    painter_order,
    warp_patch,
)
from .errors import DimensionMismatch


@dataclass(frozen=True)
class ShadingInputs:
    """Full-frame maps feeding one shade() call."""

    frame: np.ndarray  # uint8 RGBA composited frame
    albedo: np.ndarray  # HxWx3 float in [0, 1], premultiplied by coverage
    normals: np.ndarray  # HxWx3 float, premultiplied by coverage
    coverage: np.ndarray  # HxW float in [0, 1]; 0 = untouched background
    depth: np.ndarray  # HxW float, m, premultiplied by coverage
    light_direction: tuple
    light_intensity: float
    ambient: float
    attenuation: float = 0.0  # 1/m

    def __post_init__(self):
        shape = self.frame.shape[:2]
        for name in ("albedo", "normals", "coverage", "depth"):
            if getattr(self, name).shape[:2] != shape:
                raise DimensionMismatch(f"{name} does not match frame dimensions")
        if self.attenuation < 0:
            raise ValueError("attenuation must be >= 0")


def decode_normals(rgb):
    """uint8 normal map -> unit vectors (n = 2c - 1, renormalized)."""
    n = rgb.astype(np.float64) / 255.0 * 2.0 - 1.0
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    norm[norm == 0] = 1.0
    return n / norm


def rotate_normals(normals, theta):
    """Rotate the in-plane (x, y) components by theta; z preserved."""
    c, s = math.cos(theta), math.sin(theta)
    out = normals.copy()
    x = normals[..., 0]
    y = normals[..., 1]
    out[..., 0] = c * x - s * y
    out[..., 1] = s * x + c * y
    return out


def shade(inputs):
    """Relight the frame; returns uint8 RGBA.

    Shading weight per pixel is the foreground coverage: fully covered
    pixels are replaced by the shaded albedo, partially covered pixels
    blend, and zero-coverage pixels are returned bitwise unchanged.
    """
    frame = inputs.frame
    cov = inputs.coverage
    touched = cov > 0
    if not touched.any():
        return frame.copy()

    l = np.asarray(inputs.light_direction, dtype=float)
    l = l / np.linalg.norm(l)

    w = cov[touched][:, None]
    albedo = inputs.albedo[touched] / w  # un-premultiply
    normals = inputs.normals[touched] / w
    norm = np.linalg.norm(normals, axis=-1, keepdims=True)
    norm[norm == 0] = 1.0
    normals = normals / norm

    lambert = np.maximum(normals @ l, 0.0)[:, None]
    shading = inputs.ambient + inputs.light_intensity * lambert
    depth = inputs.depth[touched][:, None] / w
    atten = 1.0 / (1.0 + inputs.attenuation * depth)
    shaded = np.clip(albedo * shading * atten, 0.0, 1.0)

    out = frame.copy()
    base = frame[..., :3][touched].astype(np.float64) / 255.0
    blended = w * shaded + (1.0 - w) * base
    out[..., :3][touched] = np.clip(np.rint(blended * 255.0), 0, 255).astype(np.uint8)
    return out


def warp_aux_maps(rb, frame_size):
    """Warp one body's albedo and normal maps into frame space.

    Returns (albedo_patch, normal_patch, alpha_patch, offset) where the
    patches are premultiplied by the warped sprite alpha, or None when the
    body has no aux maps or is fully clipped.
    """
    if rb.albedo is None and rb.normals is None:
        return None
    h, w = rb.sprite.shape[:2]
    alpha = rb.sprite[:, :, 3].astype(np.float64) / 255.0

    albedo = (
        rb.albedo.astype(np.float64) / 255.0
        if rb.albedo is not None
        else rb.sprite[:, :, :3].astype(np.float64) / 255.0
    )
    if rb.normals is not None:
        normals = decode_normals(rb.normals)
    else:
        normals = np.zeros((h, w, 3))
        normals[..., 2] = 1.0  # camera-facing
    normals = rotate_normals(normals, rb.theta)

    stack = np.concatenate(
        [albedo * alpha[..., None], normals * alpha[..., None], alpha[..., None]],
        axis=-1,
    )
    patch, offset = warp_patch(stack, body_transform(rb), frame_size)
    if patch is None:
        return None
    return patch[..., 0:3], patch[..., 3:6], patch[..., 6], offset


def build_shading_inputs(frame, bodies, light, attenuation=0.0):
    """Accumulate per-body aux maps into full-frame ShadingInputs.

    Bodies fold far-to-near like the compositor. A body without aux maps
    still occludes: its warped alpha erases the shadeable coverage of
    bodies behind it so those pixels pass through unshaded.
    """
    h, w = frame.shape[:2]
    albedo_acc = np.zeros((h, w, 3))
    normal_acc = np.zeros((h, w, 3))
    cov = np.zeros((h, w))
    depth_acc = np.zeros((h, w))

    for rb in painter_order(bodies):
        aux = warp_aux_maps(rb, (w, h))
        if aux is not None:
            albedo_p, normal_p, alpha_p, (x0, y0) = aux
            sl = np.s_[y0 : y0 + alpha_p.shape[0], x0 : x0 + alpha_p.shape[1]]
            keep = (1.0 - alpha_p)[..., None]
            albedo_acc[sl] = albedo_acc[sl] * keep + albedo_p
            normal_acc[sl] = normal_acc[sl] * keep + normal_p
            depth_acc[sl] = depth_acc[sl] * keep[..., 0] + rb.depth * alpha_p
            cov[sl] = cov[sl] * keep[..., 0] + alpha_p
        else:
            # Occluder without aux maps: erase shading underneath it.
            sprite_alpha = rb.sprite[:, :, 3].astype(np.float64) / 255.0
            patch, offset = warp_patch(
                sprite_alpha[..., None], body_transform(rb), (w, h)
            )
            if patch is None:
                continue
            x0, y0 = offset
            a = patch[..., 0]
            sl = np.s_[y0 : y0 + a.shape[0], x0 : x0 + a.shape[1]]
            keep = 1.0 - a
            albedo_acc[sl] *= keep[..., None]
            normal_acc[sl] *= keep[..., None]
            depth_acc[sl] *= keep
            cov[sl] *= keep

    return ShadingInputs(
        frame=frame,
        albedo=albedo_acc,
        normals=normal_acc,
        coverage=cov,
        depth=depth_acc,
        light_direction=light.direction,
        light_intensity=light.intensity,
        ambient=light.ambient,
        attenuation=attenuation,
    )


def relight_frame(frame, bodies, light, attenuation=0.0):
    """Composited frame -> relit frame (uint8 RGBA)."""
    inputs = build_shading_inputs(frame, bodies, light, attenuation)
    return shade(inputs)
