import math

import numpy as np
import pytest

from physlayer.compositor import RenderBody, composite_frame
from physlayer.errors import DimensionMismatch
from physlayer.relight import (
    ShadingInputs,
    decode_normals,
    relight_frame,
    rotate_normals,
    shade,
    warp_aux_maps,
)
from physlayer.scene import DirectionalLight

from conftest import square_sprite


def flat_inputs(size=8, albedo=(0.8, 0.8, 0.8), normal=(0, 0, 1), light=(0, 0, 1),
                intensity=1.0, ambient=0.0, attenuation=0.0, depth=0.0,
                frame_color=(50, 60, 70)):
    frame = np.zeros((size, size, 4), dtype=np.uint8)
    frame[..., :3] = frame_color
    frame[..., 3] = 255
    alb = np.full((size, size, 3), albedo, dtype=float)
    nrm = np.full((size, size, 3), normal, dtype=float)
    cov = np.ones((size, size))
    dep = np.full((size, size), depth, dtype=float)
    return ShadingInputs(
        frame=frame, albedo=alb, normals=nrm, coverage=cov, depth=dep,
        light_direction=light, light_intensity=intensity, ambient=ambient,
        attenuation=attenuation,
    )


def encode_normal(n):
    """Unit vector -> uint8 RGB, n = 2c - 1."""
    return tuple(int(round((c + 1) / 2 * 255)) for c in n)


class TestShade:
    def test_full_diffuse_identity(self):
        inputs = flat_inputs(albedo=(0.8, 0.4, 0.2), normal=(0, 0, 1), light=(0, 0, 1))
        out = shade(inputs)
        expected = [round(255 * c) for c in (0.8, 0.4, 0.2)]
        assert (np.abs(out[..., :3].astype(int) - expected) <= 1).all()

    def test_perpendicular_ambient_only(self):
        inputs = flat_inputs(albedo=(0.8, 0.8, 0.8), normal=(1, 0, 0),
                             light=(0, 0, 1), ambient=0.3)
        out = shade(inputs)
        expected = round(255 * 0.8 * 0.3)
        assert (np.abs(out[..., :3].astype(int) - expected) <= 1).all()

    def test_cos60_case(self):
        n = (math.sin(math.pi / 3), 0.0, 0.5)  # 60 degrees from +z
        inputs = flat_inputs(albedo=(0.8, 0.8, 0.8), normal=n, light=(0, 0, 1),
                             ambient=0.2, intensity=1.0)
        out = shade(inputs)
        expected = round(255 * 0.8 * (0.2 + 0.5))
        assert (np.abs(out[..., :3].astype(int) - expected) <= 1).all()

    def test_background_bitwise_unchanged(self):
        inputs = flat_inputs()
        inputs.coverage[:4, :] = 0.0
        out = shade(inputs)
        assert (out[:4] == inputs.frame[:4]).all()

    def test_energy_bound(self):
        inputs = flat_inputs(albedo=(0.9, 0.5, 0.3), normal=(0, 0, 1),
                             light=(0, 0, 1), ambient=0.4, intensity=0.9)
        out = shade(inputs)
        bound = [math.ceil(255 * c * (0.4 + 0.9)) for c in (0.9, 0.5, 0.3)]
        assert (out[..., :3].astype(int) <= np.minimum(bound, 255)).all()

    def test_attenuation_disabled_at_zero_beta(self):
        near = flat_inputs(depth=0.0)
        far = flat_inputs(depth=100.0)
        assert (shade(near) == shade(far)).all()

    def test_attenuation_dims_with_depth(self):
        lit = shade(flat_inputs(attenuation=0.5, depth=0.0))
        dim = shade(flat_inputs(attenuation=0.5, depth=2.0))
        # 1/(1 + 0.5*2) = 0.5
        assert dim[0, 0, 0] == pytest.approx(lit[0, 0, 0] * 0.5, abs=1.0)

    def test_dimension_mismatch(self):
        inputs = flat_inputs()
        with pytest.raises(DimensionMismatch):
            ShadingInputs(
                frame=inputs.frame, albedo=inputs.albedo[:4], normals=inputs.normals,
                coverage=inputs.coverage, depth=inputs.depth,
                light_direction=(0, 0, 1), light_intensity=1.0, ambient=0.0,
            )

    def test_light_direction_continuity(self):
        base = flat_inputs(albedo=(0.8, 0.8, 0.8), normal=(0, 0, 1))
        prev = None
        for i in range(100):
            angle = i / 99.0 * math.pi / 2
            inputs = flat_inputs(albedo=(0.8, 0.8, 0.8), normal=(0, 0, 1),
                                 light=(math.sin(angle), 0, math.cos(angle)))
            out = shade(inputs)[0, 0, 0].astype(float)
            if prev is not None:
                delta_l = 2 * math.sin((math.pi / 2) / 99 / 2)  # chord length
                assert abs(out - prev) <= 255 * (1.0 * delta_l * 0.8) + 1.0
            prev = out


class TestNormalMaps:
    def test_decode_unit_vectors(self):
        rgb = np.array([[encode_normal((0, 0, 1))]], dtype=np.uint8)
        n = decode_normals(rgb)
        assert n[0, 0] == pytest.approx([0, 0, 1], abs=0.01)

    def test_rotate_half_turn_negates_xy(self):
        n = np.array([[[1.0, 0.0, 0.0]]])
        out = rotate_normals(n, math.pi)
        assert out[0, 0] == pytest.approx([-1, 0, 0], abs=1e-12)

    def test_rotate_quarter_x_to_y(self):
        n = np.array([[[1.0, 0.0, 0.0]]])
        out = rotate_normals(n, math.pi / 4)
        assert out[0, 0] == pytest.approx([math.sqrt(2) / 2, math.sqrt(2) / 2, 0],
                                          abs=1e-12)

    def test_z_preserved(self):
        n = np.array([[[0.6, 0.0, 0.8]]])
        out = rotate_normals(n, 1.234)
        assert out[0, 0, 2] == 0.8


def make_render_body(body_id, sprite, x, y, depth, theta=0.0, albedo=None,
                     normals=None):
    h, w = sprite.shape[:2]
    return RenderBody(
        body_id=body_id, sprite=sprite, anchor=((w - 1) / 2, (h - 1) / 2),
        x=x, y=y, theta=theta, depth=depth, scale=1.0,
        albedo=albedo, normals=normals,
    )


class TestRelightFrame:
    def background(self, size=48):
        bg = np.zeros((size, size, 4), dtype=np.uint8)
        bg[..., 2] = 99
        bg[..., 3] = 255
        return bg

    def test_body_without_aux_maps_passes_through(self):
        bg = self.background()
        rb = make_render_body("plain", square_sprite(8), 20, 20, 1.0)
        frame = composite_frame(bg, [rb])
        light = DirectionalLight(direction=(0, 0, 1), intensity=1.0, ambient=0.0)
        out = relight_frame(frame, [rb], light)
        assert (out == frame).all()

    def test_background_pixels_unchanged(self):
        bg = self.background()
        sprite = square_sprite(8)
        albedo = np.full((8, 8, 3), 128, dtype=np.uint8)
        normals = np.full((8, 8, 3), encode_normal((0, 0, 1)), dtype=np.uint8)
        rb = make_render_body("lit", sprite, 20, 20, 1.0, albedo=albedo,
                              normals=normals)
        frame = composite_frame(bg, [rb])
        light = DirectionalLight(direction=(0, 0, 1), intensity=1.0, ambient=0.0)
        out = relight_frame(frame, [rb], light)
        far_corner = np.s_[40:, 40:]
        assert (out[far_corner] == frame[far_corner]).all()
        # Interior of the lit body becomes its albedo under full diffuse.
        assert np.abs(int(out[20, 20, 0]) - 128) <= 1

    def test_warp_aux_identity(self):
        sprite = square_sprite(8)
        albedo = np.full((8, 8, 3), 100, dtype=np.uint8)
        normals = np.full((8, 8, 3), encode_normal((0, 0, 1)), dtype=np.uint8)
        rb = make_render_body("b", sprite, 10.5, 10.5, 1.0, albedo=albedo,
                              normals=normals)
        aux = warp_aux_maps(rb, (32, 32))
        assert aux is not None
        albedo_p, normal_p, alpha_p, _offset = aux
        inner = alpha_p > 0.999
        assert inner.any()
        assert np.allclose(albedo_p[inner], 100 / 255.0, atol=1e-9)
        assert np.allclose(normal_p[inner], [0, 0, 1], atol=0.01)
