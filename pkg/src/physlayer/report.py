"""Trajectory reports: CSV export plus matplotlib figures.

Figures are written next to the delimited output so a run can be eyeballed
without re-rendering frames.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _times(traj):
    return [s * traj.dt for s in range(len(traj.records))]


def _series(traj, body_id, index):
    return [rec[body_id][index] for rec in traj.records if body_id in rec]


def write_report(traj, out_dir):
    """Write trajectory.csv plus summary figures; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    csv_path = os.path.join(out_dir, "trajectory.csv")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(traj.to_csv())
    paths.append(csv_path)

    body_ids = traj.body_ids()
    times = _times(traj)
    if not body_ids:
        return paths

    fig, axes = plt.subplots(2, 2, figsize=(10, 7), sharex=True)
    panels = [
        (axes[0][0], "x [px]", 0),
        (axes[0][1], "y [px]", 1),
        (axes[1][0], "depth displacement [m]", 2),
        (axes[1][1], "rotation [rad]", 3),
    ]
    for ax, label, idx in panels:
        for body_id in body_ids:
            ax.plot(times, _series(traj, body_id, idx), label=body_id)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("time [s]")
    axes[0][0].legend(loc="best", fontsize="small")
    fig.suptitle("Body kinematics")
    fig.tight_layout()
    kin_path = os.path.join(out_dir, "kinematics.png")
    fig.savefig(kin_path, dpi=110)
    plt.close(fig)
    paths.append(kin_path)

    fig, ax = plt.subplots(figsize=(6, 6))
    for body_id in body_ids:
        xs = _series(traj, body_id, 0)
        ys = _series(traj, body_id, 1)
        ax.plot(xs, ys, label=body_id)
        ax.plot(xs[:1], ys[:1], "o", color=ax.lines[-1].get_color())
    ax.invert_yaxis()  # image coordinates, +y down
    ax.set_xlabel("x [px]")
    ax.set_ylabel("y [px]")
    ax.set_title("Planar paths")
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path_path = os.path.join(out_dir, "paths.png")
    fig.savefig(path_path, dpi=110)
    plt.close(fig)
    paths.append(path_path)

    return paths
