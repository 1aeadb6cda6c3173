import json
import os

import numpy as np
import pytest
from PIL import Image

from physlayer.scene import BodySpec, Camera, DirectionalLight, Scene, SimConfig


def square_sprite(size=16, color=(200, 60, 60, 255)):
    sprite = np.zeros((size, size, 4), dtype=np.uint8)
    sprite[:, :] = color
    return sprite


def disc_sprite(radius=10, color=(60, 60, 200, 255)):
    size = 2 * radius
    sprite = np.zeros((size, size, 4), dtype=np.uint8)
    yy, xx = np.mgrid[0:size, 0:size]
    mask = (xx - radius + 0.5) ** 2 + (yy - radius + 0.5) ** 2 <= radius**2
    sprite[mask] = color
    return sprite


def make_body(body_id="ball", sprite=None, position=(100.0, 100.0), depth=2.0, **kw):
    if sprite is None:
        sprite = square_sprite()
    return BodySpec(id=body_id, sprite=sprite, position=position, depth=depth, **kw)


def make_scene(bodies=(), size=256, gravity=(0.0, 0.0), ppm=100.0, **kw):
    background = np.zeros((size, size, 4), dtype=np.uint8)
    background[..., 1] = 40
    background[..., 3] = 255
    defaults = dict(
        camera=Camera(focal_length=500.0, reference_depth=2.0),
        light=DirectionalLight(),
        sim=SimConfig(steps=160, hz=30.0, frames=16),
    )
    defaults.update(kw)
    return Scene(
        background=background,
        gravity=gravity,
        pixels_per_meter=ppm,
        bodies=tuple(bodies),
        **defaults,
    )


def write_scene_files(tmp_path, doc, images):
    """Write a raw scene JSON document plus PNG assets; returns scene path."""
    for name, arr in images.items():
        Image.fromarray(arr).save(os.path.join(tmp_path, name))
    path = os.path.join(tmp_path, "scene.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
    return path


@pytest.fixture
def simple_scene_path(tmp_path):
    doc = {
        "background": "bg.png",
        "gravity": [0.0, 9.81],
        "pixels_per_meter": 100.0,
        "bodies": [
            {"id": "ball", "sprite": "ball.png", "position": [64, 64], "depth": 2.0}
        ],
    }
    images = {
        "bg.png": np.full((128, 128, 4), 255, dtype=np.uint8),
        "ball.png": disc_sprite(8),
    }
    return write_scene_files(str(tmp_path), doc, images)
