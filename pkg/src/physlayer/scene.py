"""Static scene description: on-disk JSON format, loading, saving, validation.

A scene file is a single UTF-8 JSON document whose image assets are PNG
files referenced by paths relative to the scene file itself.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from PIL import Image

from .errors import (
    AssetNotFound,
    DuplicateBodyId,
    MalformedImage,
    MalformedScene,
    MissingField,
)

# Physical-property validation ranges.
MASS_RANGE = (0.1, 10.0)
FRICTION_RANGE = (0.1, 1.0)
ELASTICITY_RANGE = (0.1, 0.9)

DEFAULT_STEPS = 160
DEFAULT_HZ = 30.0
DEFAULT_FRAMES = 16


@dataclass(frozen=True)
class Camera:
    focal_length: float = 512.0  # px
    reference_depth: float = 1.0  # m; depth at which scale factor is 1

    def __post_init__(self):
        if self.focal_length <= 0:
            raise MalformedScene(f"focal_length must be > 0, got {self.focal_length}")


@dataclass(frozen=True)
class DirectionalLight:
    direction: tuple = (0.0, 0.0, 1.0)  # unit vector, toward the light
    intensity: float = 1.0
    ambient: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        n = float(np.linalg.norm(d))
        if n == 0:
            raise MalformedScene("light direction must be nonzero")
        object.__setattr__(self, "direction", tuple(d / n))
        if self.intensity < 0:
            raise MalformedScene("light intensity must be >= 0")
        if not 0.0 <= self.ambient <= 1.0:
            raise MalformedScene("ambient must be in [0, 1]")


@dataclass(frozen=True)
class SimConfig:
    steps: int = DEFAULT_STEPS
    hz: float = DEFAULT_HZ
    frames: int = DEFAULT_FRAMES
    layer_count_override: int | None = None

    def __post_init__(self):
        if not self.steps >= self.frames >= 1:
            raise MalformedScene(
                f"need steps >= frames >= 1, got steps={self.steps} frames={self.frames}"
            )
        if self.hz <= 0:
            raise MalformedScene(f"hz must be > 0, got {self.hz}")

    @property
    def dt(self):
        return 1.0 / self.hz


@dataclass(frozen=True)
class BodySpec:
    id: str
    sprite: np.ndarray  # HxWx4 uint8 RGBA
    position: tuple  # (x, y) px, center of mass in the frame
    depth: float  # m, initial absolute depth
    rotation: float = 0.0  # rad
    mass: float = 1.0  # kg
    friction: float = 0.5
    elasticity: float = 0.5
    initial_velocity: tuple = (0.0, 0.0, 0.0)  # (px/s, px/s, m/s)
    initial_angular_velocity: float = 0.0  # rad/s
    is_static: bool = False
    albedo: np.ndarray | None = None  # HxWx3 uint8
    normals: np.ndarray | None = None  # HxWx3 uint8, n = 2c - 1

    def __post_init__(self):
        if not self.is_static and self.mass <= 0:
            raise MalformedScene(f"body '{self.id}': mass must be > 0")
        if self.sprite.ndim != 3 or self.sprite.shape[2] != 4:
            raise MalformedScene(f"body '{self.id}': sprite must be RGBA")
        if not (self.sprite[:, :, 3] > 127).any():
            raise MalformedScene(f"body '{self.id}': alpha mask has no opaque pixel")


@dataclass(frozen=True)
class Scene:
    background: np.ndarray  # HxWx4 uint8 RGBA
    camera: Camera = field(default_factory=Camera)
    light: DirectionalLight = field(default_factory=DirectionalLight)
    gravity: tuple = (0.0, 9.81)  # m/s^2, image plane, +y is down
    pixels_per_meter: float = 100.0
    bodies: tuple = ()
    sim: SimConfig = field(default_factory=SimConfig)
    attenuation: float = 0.0  # 1/m, depth attenuation for relighting

    def __post_init__(self):
        if self.pixels_per_meter <= 0:
            raise MalformedScene("pixels_per_meter must be > 0")
        ids = [b.id for b in self.bodies]
        seen = set()
        for i in ids:
            if i in seen:
                raise DuplicateBodyId(i)
            seen.add(i)
        object.__setattr__(self, "bodies", tuple(self.bodies))

    @property
    def frame_size(self):
        h, w = self.background.shape[:2]
        return w, h

    def body(self, body_id):
        for b in self.bodies:
            if b.id == body_id:
                return b
        return None


@dataclass(frozen=True)
class Violation:
    body_id: str
    field: str
    value: float
    low: float
    high: float

    def __str__(self):
        return (
            f"{self.body_id}.{self.field} = {self.value:g} "
            f"outside [{self.low:g}, {self.high:g}]"
        )

    def clamped(self):
        return min(max(self.value, self.low), self.high)


def _load_png(path, mode):
    if not os.path.isfile(path):
        raise AssetNotFound(path)
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert(mode), dtype=np.uint8)
    except AssetNotFound:
        raise
    except Exception as exc:  # Pillow raises a mixed bag of types
        raise MalformedImage(path, str(exc)) from exc


def _require(doc, key, obj):
    if key not in doc:
        raise MissingField(key, obj)
    return doc[key]


def load_body_spec(doc, base_dir):
    """Build a BodySpec from its JSON dict, resolving asset paths."""
    body_id = _require(doc, "id", "body")
    sprite = _load_png(os.path.join(base_dir, _require(doc, "sprite", f"body '{body_id}'")), "RGBA")
    albedo = normals = None
    if doc.get("albedo"):
        albedo = _load_png(os.path.join(base_dir, doc["albedo"]), "RGB")
    if doc.get("normals"):
        normals = _load_png(os.path.join(base_dir, doc["normals"]), "RGB")
    return BodySpec(
        id=body_id,
        sprite=sprite,
        position=tuple(float(v) for v in _require(doc, "position", f"body '{body_id}'")),
        depth=float(_require(doc, "depth", f"body '{body_id}'")),
        rotation=float(doc.get("rotation", 0.0)),
        mass=float(doc.get("mass", 1.0)),
        friction=float(doc.get("friction", 0.5)),
        elasticity=float(doc.get("elasticity", 0.5)),
        initial_velocity=tuple(float(v) for v in doc.get("initial_velocity", (0, 0, 0))),
        initial_angular_velocity=float(doc.get("initial_angular_velocity", 0.0)),
        is_static=bool(doc.get("is_static", False)),
        albedo=albedo,
        normals=normals,
    )


def load_scene(path):
    """Load a scene file and all referenced assets into memory."""
    if not os.path.isfile(path):
        raise AssetNotFound(path)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedScene(f"{path}: {exc}") from exc
    base_dir = os.path.dirname(os.path.abspath(path))

    background = _load_png(os.path.join(base_dir, _require(doc, "background", "scene")), "RGBA")

    cam_doc = doc.get("camera", {})
    camera = Camera(
        focal_length=float(cam_doc.get("focal_length", Camera.focal_length)),
        reference_depth=float(cam_doc.get("reference_depth", Camera.reference_depth)),
    )
    light_doc = doc.get("light", {})
    light = DirectionalLight(
        direction=tuple(float(v) for v in light_doc.get("direction", (0, 0, 1))),
        intensity=float(light_doc.get("intensity", 1.0)),
        ambient=float(light_doc.get("ambient", 0.0)),
    )
    sim_doc = doc.get("sim", {})
    sim = SimConfig(
        steps=int(sim_doc.get("steps", DEFAULT_STEPS)),
        hz=float(sim_doc.get("hz", DEFAULT_HZ)),
        frames=int(sim_doc.get("frames", DEFAULT_FRAMES)),
        layer_count_override=sim_doc.get("layer_count_override"),
    )

    bodies = [load_body_spec(b, base_dir) for b in doc.get("bodies", [])]

    return Scene(
        background=background,
        camera=camera,
        light=light,
        gravity=tuple(float(v) for v in _require(doc, "gravity", "scene")),
        pixels_per_meter=float(_require(doc, "pixels_per_meter", "scene")),
        bodies=bodies,
        sim=sim,
        attenuation=float(doc.get("attenuation", 0.0)),
    )


def save_scene(scene, path):
    """Write a scene back to disk: JSON document plus PNG assets next to it."""
    base_dir = os.path.dirname(os.path.abspath(path))
    os.makedirs(base_dir, exist_ok=True)

    def write_png(arr, name):
        Image.fromarray(arr).save(os.path.join(base_dir, name))
        return name

    doc = {
        "background": write_png(scene.background, "background.png"),
        "camera": {
            "focal_length": scene.camera.focal_length,
            "reference_depth": scene.camera.reference_depth,
        },
        "light": {
            "direction": list(scene.light.direction),
            "intensity": scene.light.intensity,
            "ambient": scene.light.ambient,
        },
        "gravity": list(scene.gravity),
        "pixels_per_meter": scene.pixels_per_meter,
        "attenuation": scene.attenuation,
        "sim": {
            "steps": scene.sim.steps,
            "hz": scene.sim.hz,
            "frames": scene.sim.frames,
            "layer_count_override": scene.sim.layer_count_override,
        },
        "bodies": [],
    }
    for b in scene.bodies:
        bdoc = {
            "id": b.id,
            "sprite": write_png(b.sprite, f"{b.id}_sprite.png"),
            "position": list(b.position),
            "depth": b.depth,
            "rotation": b.rotation,
            "mass": b.mass,
            "friction": b.friction,
            "elasticity": b.elasticity,
            "initial_velocity": list(b.initial_velocity),
            "initial_angular_velocity": b.initial_angular_velocity,
            "is_static": b.is_static,
        }
        if b.albedo is not None:
            bdoc["albedo"] = write_png(b.albedo, f"{b.id}_albedo.png")
        if b.normals is not None:
            bdoc["normals"] = write_png(b.normals, f"{b.id}_normals.png")
        doc["bodies"].append(bdoc)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def validate_scene(scene, clamp=False):
    """Check physical properties against their allowed ranges.

    Returns a list of Violations when clamp is off, or (clamped_scene,
    warnings) when clamp is on. Static bodies are exempt from the mass range.
    """
    violations = []
    for b in scene.bodies:
        checks = [("friction", b.friction, FRICTION_RANGE), ("elasticity", b.elasticity, ELASTICITY_RANGE)]
        if not b.is_static:
            checks.insert(0, ("mass", b.mass, MASS_RANGE))
        for name, value, (lo, hi) in checks:
            if not lo <= value <= hi:
                violations.append(Violation(b.id, name, value, lo, hi))
    if not clamp:
        return violations

    warnings = [str(v) + " (clamped)" for v in violations]
    by_body = {}
    for v in violations:
        by_body.setdefault(v.body_id, {})[v.field] = v.clamped()
    new_bodies = [
        replace(b, **by_body[b.id]) if b.id in by_body else b for b in scene.bodies
    ]
    return replace(scene, bodies=tuple(new_bodies)), warnings


def scene_hash(scene):
    """Deterministic content hash over scene parameters and asset pixels."""
    h = hashlib.sha256()

    def feed_img(arr):
        if arr is None:
            h.update(b"none")
        else:
            h.update(str(arr.shape).encode())
            h.update(np.ascontiguousarray(arr).tobytes())

    meta = {
        "camera": [scene.camera.focal_length, scene.camera.reference_depth],
        "light": [list(scene.light.direction), scene.light.intensity, scene.light.ambient],
        "gravity": list(scene.gravity),
        "ppm": scene.pixels_per_meter,
        "attenuation": scene.attenuation,
        "sim": [scene.sim.steps, scene.sim.hz, scene.sim.frames, scene.sim.layer_count_override],
        "bodies": [
            [b.id, list(b.position), b.depth, b.rotation, b.mass, b.friction,
             b.elasticity, list(b.initial_velocity), b.initial_angular_velocity,
             b.is_static]
            for b in scene.bodies
        ],
    }
    h.update(json.dumps(meta, sort_keys=True).encode())
    feed_img(scene.background)
    for b in scene.bodies:
        feed_img(b.sprite)
        feed_img(b.albedo)
        feed_img(b.normals)
    return h.hexdigest()


def scenes_equal(a, b):
    """Structural equality including asset pixels."""
    return scene_hash(a) == scene_hash(b)
