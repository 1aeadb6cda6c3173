"""The 2.5D rigid-body engine: per-body dynamics, layered collisions,
depth regulation, and trajectory production.

Each body carries planar position/rotation in pixels plus a scalar depth
displacement in meters. A fixed-step semi-implicit Euler integrator
advances velocities before positions; collisions are resolved only among
bodies sharing a depth layer; layer membership is recomputed between
steps, never mid-step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import collisions, layers, shapes
from .errors import NumericalFault
from .instructions import ForceSchedule, apply_instructions
from .scene import scene_hash as compute_scene_hash
from .trajectory import Trajectory

DEPTH_DRAG = 0.5  # 1/s; linear drag regulating depth-axis velocity


def normalize_angle(theta):
    """Wrap to (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass
class BodyState:
    x: float = 0.0  # px
    y: float = 0.0  # px
    z: float = 0.0  # m, depth displacement from the initial depth
    theta: float = 0.0  # rad
    vx: float = 0.0  # px/s
    vy: float = 0.0  # px/s
    vz: float = 0.0  # m/s
    omega: float = 0.0  # rad/s

    def is_finite(self):
        return all(
            math.isfinite(v)
            for v in (self.x, self.y, self.z, self.theta,
                      self.vx, self.vy, self.vz, self.omega)
        )


class RigidBody:
    """Runtime body: spec + collision shape + mutable state."""

    def __init__(self, spec, ppm):
        self.spec = spec
        self.id = spec.id
        self.is_static = spec.is_static
        self.shape = shapes.shape_from_mask(spec.sprite[:, :, 3])
        self.friction = spec.friction
        self.elasticity = spec.elasticity
        if spec.is_static:
            self.mass = math.inf
            self.inertia = math.inf
            self.inv_mass = 0.0
            self.inv_inertia = 0.0
        else:
            self.mass = spec.mass
            self.inertia = shapes.polygon_inertia(self.shape.vertices, spec.mass, ppm)
            self.inv_mass = 1.0 / self.mass
            self.inv_inertia = 1.0 / self.inertia
        self.ppm = ppm
        self.layer = 0
        self.state = BodyState(
            x=spec.position[0],
            y=spec.position[1],
            z=0.0,
            theta=spec.rotation,
            vx=spec.initial_velocity[0],
            vy=spec.initial_velocity[1],
            vz=spec.initial_velocity[2],
            omega=spec.initial_angular_velocity,
        )

    @property
    def depth(self):
        """Current absolute depth in meters."""
        return self.spec.depth + self.state.z

    def position_px(self):
        return np.array([self.state.x, self.state.y])

    def velocity_mps(self):
        return np.array([self.state.vx / self.ppm, self.state.vy / self.ppm])

    @property
    def omega(self):
        return self.state.omega

    def world_vertices(self):
        """Collision polygon in world pixels at the current pose."""
        c, s = math.cos(self.state.theta), math.sin(self.state.theta)
        rot = np.array([[c, -s], [s, c]])
        return self.shape.local_vertices @ rot.T + self.position_px()

    def apply_planar_impulse(self, impulse, r_m):
        """Apply impulse (N*s) at offset r_m (meters from COM)."""
        if self.is_static:
            return
        self.state.vx += impulse[0] * self.inv_mass * self.ppm
        self.state.vy += impulse[1] * self.inv_mass * self.ppm
        self.state.omega += (r_m[0] * impulse[1] - r_m[1] * impulse[0]) * self.inv_inertia

    def nudge_px(self, delta):
        if self.is_static:
            return
        self.state.x += delta[0]
        self.state.y += delta[1]


class World:
    """Mutable simulation state stepped at a fixed dt."""

    def __init__(self, scene, schedule=None):
        self.scene = scene
        self.ppm = scene.pixels_per_meter
        self.dt = scene.sim.dt
        self.schedule = schedule if schedule is not None else ForceSchedule()
        self.bodies = [RigidBody(spec, self.ppm) for spec in scene.bodies]
        self.step_index = 0
        self.stats = collisions.DetectStats()

        dynamic_depths = [b.depth for b in self.bodies if not b.is_static]
        n_layers = layers.compute_layer_count(
            len(dynamic_depths), scene.sim.layer_count_override
        )
        all_depths = [b.depth for b in self.bodies]
        self.boundaries = layers.partition_depths(all_depths or [0.0], n_layers)
        for b in self.bodies:
            b.layer = layers.assign_layer(b.depth, self.boundaries)

    def body(self, body_id):
        for b in self.bodies:
            if b.id == body_id:
                return b
        raise KeyError(body_id)

    @property
    def time(self):
        return self.step_index * self.dt

    def _integrate(self, body, t):
        st = body.state
        force, torque = self.schedule.at(body.id, t)
        gx, gy = self.scene.gravity
        # Accelerations: planar in px/s^2, depth in m/s^2.
        ax = (gx + force[0] * body.inv_mass) * self.ppm
        ay = (gy + force[1] * body.inv_mass) * self.ppm
        az = force[2] * body.inv_mass - DEPTH_DRAG * st.vz
        alpha = torque * body.inv_inertia
        st.vx += ax * self.dt
        st.vy += ay * self.dt
        st.vz += az * self.dt
        st.omega += alpha * self.dt
        st.x += st.vx * self.dt
        st.y += st.vy * self.dt
        st.z += st.vz * self.dt
        st.theta = normalize_angle(st.theta + st.omega * self.dt)

    def step(self):
        t = self.time
        for body in self.bodies:
            if not body.is_static:
                self._integrate(body, t)
            if not body.state.is_finite():
                raise NumericalFault(body.id, self.step_index)

        # Per-layer collision detection and response.
        by_layer = {}
        for body in self.bodies:
            by_layer.setdefault(body.layer, []).append(body)
        all_contacts = []
        for layer_idx in sorted(by_layer):
            group = by_layer[layer_idx]
            if len(group) < 2:
                continue
            verts = {b.id: b.world_vertices() for b in group}
            all_contacts.extend(
                collisions.detect_collisions(group, verts, self.stats)
            )
        collisions.resolve_contacts(all_contacts, self.ppm)

        # Dynamic layer reassignment between steps.
        for body in self.bodies:
            if not body.is_static:
                body.layer = layers.assign_layer(body.depth, self.boundaries)

        self.step_index += 1

    def snapshot(self):
        return {
            b.id: (
                b.state.x, b.state.y, b.state.z, b.state.theta,
                b.state.vx, b.state.vy, b.state.vz, b.state.omega, b.layer,
            )
            for b in self.bodies
        }


def simulate(scene, program=None, asset_dir=".", schedule=None):
    """Run the full fixed-step simulation and return the Trajectory.

    `program` is an InstructionProgram applied before step 0; a prebuilt
    `schedule` may be passed instead when no program text exists.
    """
    if program is not None:
        scene, schedule = apply_instructions(scene, program, asset_dir)
    world = World(scene, schedule)
    records = [world.snapshot()]
    for _ in range(scene.sim.steps):
        world.step()
        records.append(world.snapshot())
    return Trajectory(
        dt=world.dt,
        steps=scene.sim.steps,
        scene_hash=compute_scene_hash(scene),
        records=tuple(records),
    )
