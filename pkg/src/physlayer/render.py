"""Frame-sequence rendering: trajectory + scene -> PNG files.

Frames are pure functions of (trajectory step, scene assets), so they can
be rendered in parallel; the PHYSLAYER_THREADS environment variable caps
the worker count (0 or unset = auto).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from PIL import Image

from .compositor import composite_frame, render_bodies_at_step, sample_frames
from .relight import relight_frame


def thread_count():
    raw = os.environ.get("PHYSLAYER_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = min(os.cpu_count() or 1, 8)
    return n


def render_frame(scene, traj, step, relight=True, anchor_cache=None):
    """Render one trajectory step to a uint8 RGBA frame."""
    bodies = render_bodies_at_step(scene, traj, step, anchor_cache)
    frame = composite_frame(scene.background, bodies)
    if relight:
        frame = relight_frame(frame, bodies, scene.light, scene.attenuation)
    return frame


def render_sequence(scene, traj, n_frames=None, relight=True):
    """Render the uniformly sampled frame sequence; returns list of arrays."""
    if n_frames is None:
        n_frames = scene.sim.frames
    steps = sample_frames(traj.steps, n_frames)
    anchor_cache = {}
    # Warm the anchor cache single-threaded so workers only read it.
    if steps:
        render_bodies_at_step(scene, traj, steps[0], anchor_cache)

    workers = thread_count()
    if workers == 1 or len(steps) <= 1:
        return [render_frame(scene, traj, s, relight, anchor_cache) for s in steps]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(
                lambda s: render_frame(scene, traj, s, relight, anchor_cache), steps
            )
        )


def write_frames(frames, out_dir):
    """Write frames as frame_0000.png ...; returns the file paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i, frame in enumerate(frames):
        path = os.path.join(out_dir, f"frame_{i:04d}.png")
        Image.fromarray(frame).save(path)
        paths.append(path)
    return paths
