"""Convex-polygon collision detection and impulse resolution.

Detection: AABB broad phase over id-ordered bodies, then a separating-axis
narrow phase with reference/incident edge clipping to build contact
manifolds. Resolution: sequential impulses (accumulated, clamped) with a
restitution velocity bias, Coulomb friction, and Baumgarte positional
correction. Impulses act in the image plane only; depth velocity is never
touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SOLVER_ITERATIONS = 4
BAUMGARTE = 0.2
SLOP_PX = 0.1


@dataclass
class Contact:
    a: object  # RigidBody
    b: object
    point: np.ndarray  # world px
    normal: np.ndarray  # unit, from a toward b
    penetration: float  # px, > 0

    # solver scratch
    bias_vn: float = 0.0
    jn_acc: float = 0.0
    jt_acc: float = 0.0


@dataclass
class DetectStats:
    """Probe counters for tests."""

    broad_pairs: int = 0
    narrow_calls: int = 0
    contacts: int = 0


def _cross2(a, b):
    return a[0] * b[1] - a[1] * b[0]


def polygon_aabb(verts):
    return verts.min(axis=0), verts.max(axis=0)


def _face_separation(verts_a, verts_b):
    """Max separation of B from A's faces; returns (separation, face index)."""
    best = -np.inf
    best_i = 0
    n = len(verts_a)
    for i in range(n):
        a0 = verts_a[i]
        a1 = verts_a[(i + 1) % n]
        edge = a1 - a0
        normal = np.array([edge[1], -edge[0]])
        normal /= np.linalg.norm(normal)
        sep = np.min((verts_b - a0) @ normal)
        if sep > best:
            best = sep
            best_i = i
    return best, best_i


def _clip_segment(points, plane_normal, plane_offset):
    """Keep the part of segment `points` with n.p <= offset."""
    d0 = plane_normal @ points[0] - plane_offset
    d1 = plane_normal @ points[1] - plane_offset
    out = []
    if d0 <= 0:
        out.append(points[0])
    if d1 <= 0:
        out.append(points[1])
    if d0 * d1 < 0:
        t = d0 / (d0 - d1)
        out.append(points[0] + t * (points[1] - points[0]))
    return out[:2]


def polygon_contacts(body_a, verts_a, body_b, verts_b):
    """SAT narrow phase; returns a list of Contacts (empty if separated)."""
    sep_a, face_a = _face_separation(verts_a, verts_b)
    if sep_a > 0:
        return []
    sep_b, face_b = _face_separation(verts_b, verts_a)
    if sep_b > 0:
        return []

    # Reference polygon: the one with the smaller penetration (larger
    # separation); ties go to A for determinism.
    if sep_b > sep_a + 1e-12:
        ref_verts, inc_verts, ref_face = verts_b, verts_a, face_b
        flip = True
    else:
        ref_verts, inc_verts, ref_face = verts_a, verts_b, face_a
        flip = False

    n = len(ref_verts)
    r0 = ref_verts[ref_face]
    r1 = ref_verts[(ref_face + 1) % n]
    edge = r1 - r0
    ref_normal = np.array([edge[1], -edge[0]])
    ref_normal /= np.linalg.norm(ref_normal)

    # Incident face: most anti-parallel to the reference normal.
    m = len(inc_verts)
    best_dot = np.inf
    inc_face = 0
    for i in range(m):
        e = inc_verts[(i + 1) % m] - inc_verts[i]
        fn = np.array([e[1], -e[0]])
        fn /= np.linalg.norm(fn)
        d = fn @ ref_normal
        if d < best_dot:
            best_dot = d
            inc_face = i
    seg = [inc_verts[inc_face], inc_verts[(inc_face + 1) % m]]

    # Clip against the reference face's side planes.
    tangent = edge / np.linalg.norm(edge)
    seg = _clip_segment(seg, -tangent, -(tangent @ r0))
    if len(seg) < 2:
        return []
    seg = _clip_segment(seg, tangent, tangent @ r1)
    if len(seg) < 2:
        return []

    contacts = []
    for p in seg:
        sep = ref_normal @ (p - r0)
        if sep <= 0:
            normal = -ref_normal if flip else ref_normal
            contacts.append(
                Contact(
                    a=body_a,
                    b=body_b,
                    point=np.asarray(p, dtype=float),
                    normal=normal.copy(),
                    penetration=float(-sep),
                )
            )
    return contacts


def detect_collisions(bodies, world_verts, stats=None):
    """Contacts among `bodies` (same layer), deterministic ordering.

    `world_verts` maps body id to its world-space polygon. Pairs are
    enumerated over bodies sorted by id; AABB overlap gates the narrow
    phase.
    """
    ordered = sorted(bodies, key=lambda b: b.id)
    boxes = {b.id: polygon_aabb(world_verts[b.id]) for b in ordered}
    contacts = []
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            a, b = ordered[i], ordered[j]
            if a.is_static and b.is_static:
                continue
            if stats:
                stats.broad_pairs += 1
            (amin, amax), (bmin, bmax) = boxes[a.id], boxes[b.id]
            if (amax < bmin).any() or (bmax < amin).any():
                continue
            if stats:
                stats.narrow_calls += 1
            found = polygon_contacts(a, world_verts[a.id], b, world_verts[b.id])
            contacts.extend(found)
    if stats:
        stats.contacts += len(contacts)
    return contacts


def combined_restitution(a, b):
    return max(a.elasticity, b.elasticity)


def combined_friction(a, b):
    return float(np.sqrt(a.friction * b.friction))


def _velocity_at(body, r_m):
    """Planar velocity (m/s) of the material point at offset r_m from the COM."""
    v = body.velocity_mps()
    return np.array([v[0] - body.omega * r_m[1], v[1] + body.omega * r_m[0]])


def resolve_contacts(contacts, ppm, iterations=SOLVER_ITERATIONS):
    """Sequential-impulse solver over a contact list (mutates body states)."""
    if not contacts:
        return

    # Precompute per-contact geometry in SI units.
    pre = []
    for c in contacts:
        a, b = c.a, c.b
        ra = (c.point - a.position_px()) / ppm
        rb = (c.point - b.position_px()) / ppm
        n = c.normal
        t = np.array([-n[1], n[0]])
        ran = _cross2(ra, n)
        rbn = _cross2(rb, n)
        rat = _cross2(ra, t)
        rbt = _cross2(rb, t)
        kn = a.inv_mass + b.inv_mass + ran * ran * a.inv_inertia + rbn * rbn * b.inv_inertia
        kt = a.inv_mass + b.inv_mass + rat * rat * a.inv_inertia + rbt * rbt * b.inv_inertia
        vn0 = (_velocity_at(b, rb) - _velocity_at(a, ra)) @ n
        e = combined_restitution(a, b)
        c.bias_vn = -e * vn0 if vn0 < 0 else 0.0
        pre.append((c, ra, rb, n, t, kn, kt, combined_friction(a, b)))

    def apply_impulse(a, b, ra, rb, impulse):
        a.apply_planar_impulse(-impulse, ra)
        b.apply_planar_impulse(impulse, rb)

    for _ in range(iterations):
        for c, ra, rb, n, t, kn, kt, mu in pre:
            a, b = c.a, c.b
            # Normal impulse toward the restitution target velocity.
            vn = (_velocity_at(b, rb) - _velocity_at(a, ra)) @ n
            d_jn = -(vn - c.bias_vn) / kn
            new_jn = max(c.jn_acc + d_jn, 0.0)
            d_jn = new_jn - c.jn_acc
            c.jn_acc = new_jn
            if d_jn != 0.0:
                apply_impulse(a, b, ra, rb, d_jn * n)
            # Friction impulse, clamped by the Coulomb cone.
            vt = (_velocity_at(b, rb) - _velocity_at(a, ra)) @ t
            d_jt = -vt / kt
            max_jt = mu * c.jn_acc
            new_jt = np.clip(c.jt_acc + d_jt, -max_jt, max_jt)
            d_jt = new_jt - c.jt_acc
            c.jt_acc = new_jt
            if d_jt != 0.0:
                apply_impulse(a, b, ra, rb, d_jt * t)

    # Positional correction (px) so stacks do not sink.
    for c, *_ in pre:
        a, b = c.a, c.b
        inv_sum = a.inv_mass + b.inv_mass
        if inv_sum == 0.0:
            continue
        corr = BAUMGARTE * max(c.penetration - SLOP_PX, 0.0) / inv_sum
        a.nudge_px(-corr * a.inv_mass * c.normal)
        b.nudge_px(corr * b.inv_mass * c.normal)
