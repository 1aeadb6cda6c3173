"""Immutable per-step record of simulated body states, with exports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass

STATE_FIELDS = ("x", "y", "z", "theta", "vx", "vy", "vz", "omega", "layer")


@dataclass(frozen=True)
class Trajectory:
    dt: float
    steps: int
    scene_hash: str
    # records[s] = {body_id: (x, y, z, theta, vx, vy, vz, omega, layer)}
    records: tuple

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))

    def state(self, step, body_id):
        return self.records[step][body_id]

    def body_ids(self):
        ids = set()
        for rec in self.records:
            ids.update(rec)
        return sorted(ids)

    def to_dict(self):
        return {
            "meta": {"dt": self.dt, "steps": self.steps, "scene_hash": self.scene_hash},
            "records": [
                {
                    body_id: dict(zip(STATE_FIELDS, rec[body_id]))
                    for body_id in sorted(rec)
                }
                for rec in self.records
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("step", "body") + STATE_FIELDS)
        for step, rec in enumerate(self.records):
            for body_id in sorted(rec):
                writer.writerow((step, body_id) + tuple(rec[body_id]))
        return buf.getvalue()

    def content_hash(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()


def trajectory_from_dict(doc):
    records = []
    for rec in doc["records"]:
        records.append(
            {
                body_id: tuple(state[f] for f in STATE_FIELDS)
                for body_id, state in rec.items()
            }
        )
    meta = doc["meta"]
    return Trajectory(
        dt=meta["dt"], steps=meta["steps"], scene_hash=meta["scene_hash"],
        records=tuple(records),
    )


def load_trajectory(path):
    with open(path, encoding="utf-8") as fh:
        return trajectory_from_dict(json.load(fh))


def save_trajectory(traj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(traj.to_json())
