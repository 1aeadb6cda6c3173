"""Command-line entry point: validate, parse, simulate, render, report.

Exit codes: 0 ok, 2 validation/instruction errors, 3 I/O or scene parse
failures, 4 numerical faults during simulation, 5 stale trajectory
(scene hash mismatch).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import __version__
from .errors import (
    InstructionError,
    NumericalFault,
    ParseError,
    PhysLayerError,
    SceneError,
    StaleTrajectory,
)
from .instructions import apply_instructions, ast_to_json, format_program, parse_program
from .physics import simulate
from .render import render_sequence, write_frames
from .report import write_report
from .scene import load_scene, scene_hash, validate_scene
from .trajectory import load_trajectory, save_trajectory

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4
EXIT_STALE = 5


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".manifest-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_scene_or_exit(path):
    try:
        return load_scene(path)
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _read_program(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    try:
        return parse_program(text)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_VIOLATION)


def _effective_scene(scene_path, instructions_path, clamp):
    """Load, validate, and apply instructions; returns (scene, schedule)."""
    scene = _load_scene_or_exit(scene_path)
    result = validate_scene(scene, clamp=clamp)
    if clamp:
        scene, warnings = result
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
    elif result:
        for v in result:
            print(f"violation: {v}")
        raise SystemExit(EXIT_VIOLATION)
    schedule = None
    if instructions_path:
        prog = _read_program(instructions_path)
        try:
            scene, schedule = apply_instructions(
                scene, prog, os.path.dirname(os.path.abspath(instructions_path))
            )
        except (InstructionError, SceneError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_VIOLATION)
    return scene, schedule


def cmd_validate(args):
    scene = _load_scene_or_exit(args.scene)
    result = validate_scene(scene, clamp=args.clamp)
    if args.clamp:
        _scene, warnings = result
        for w in warnings:
            print(f"warning: {w}")
        return EXIT_OK
    if result:
        for v in result:
            print(f"violation: {v}")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_parse(args):
    prog = _read_program(args.instructions)
    if args.dump_ast:
        print(ast_to_json(prog))
    else:
        sys.stdout.write(format_program(prog))
    return EXIT_OK


def _run_simulation(scene, schedule):
    try:
        return simulate(scene, schedule=schedule)
    except NumericalFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_NUMERICAL)


def cmd_simulate(args):
    scene, schedule = _effective_scene(args.scene, args.instructions, args.clamp)
    traj = _run_simulation(scene, schedule)
    if args.seed_check:
        again = _run_simulation(scene, schedule)
        if traj.content_hash() != again.content_hash():
            print("error: simulation is not deterministic", file=sys.stderr)
            return EXIT_NUMERICAL
    save_trajectory(traj, args.out)
    manifest = {
        "tool_version": __version__,
        "scene": os.path.abspath(args.scene),
        "instructions": os.path.abspath(args.instructions) if args.instructions else None,
        "trajectory": os.path.abspath(args.out),
        "scene_hash": traj.scene_hash,
        "trajectory_hash": traj.content_hash(),
        "frames": [],
    }
    _write_atomic(
        os.path.join(os.path.dirname(os.path.abspath(args.out)), "manifest.json"),
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )
    print(f"wrote {args.out} ({traj.steps} steps, hash {traj.content_hash()[:12]})")
    return EXIT_OK


def cmd_render(args):
    scene, _schedule = _effective_scene(args.scene, args.instructions, args.clamp)
    try:
        traj = load_trajectory(args.trajectory)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if traj.scene_hash != scene_hash(scene):
        print(
            "error: trajectory was simulated from a different scene "
            f"(expected {traj.scene_hash[:12]}, got {scene_hash(scene)[:12]})",
            file=sys.stderr,
        )
        return EXIT_STALE
    try:
        frames = render_sequence(scene, traj, args.frames, relight=not args.no_relight)
    except PhysLayerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    paths = write_frames(frames, args.out)
    manifest_path = os.path.join(args.out, "manifest.json")
    manifest = {
        "tool_version": __version__,
        "scene": os.path.abspath(args.scene),
        "trajectory": os.path.abspath(args.trajectory),
        "scene_hash": traj.scene_hash,
        "trajectory_hash": traj.content_hash(),
        "frames": [os.path.abspath(p) for p in paths],
    }
    _write_atomic(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(paths)} frames to {args.out}")
    return EXIT_OK


def cmd_report(args):
    try:
        traj = load_trajectory(args.trajectory)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    paths = write_report(traj, args.out)
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="physlayer",
        description="Depth-aware layered 2.5D rigid-body animation engine.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scene's physical properties")
    p.add_argument("scene")
    p.add_argument("--clamp", action="store_true", help="clamp out-of-range values")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("parse", help="parse an instruction file")
    p.add_argument("instructions")
    p.add_argument("--dump-ast", action="store_true", help="print the AST as JSON")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("simulate", help="run the physics simulation")
    p.add_argument("scene")
    p.add_argument("--instructions", help="instruction (.phys) file")
    p.add_argument("--out", default="trajectory.json")
    p.add_argument("--clamp", action="store_true")
    p.add_argument(
        "--seed-check", action="store_true",
        help="run twice and fail unless trajectory hashes match",
    )
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="render frames from a trajectory")
    p.add_argument("trajectory")
    p.add_argument("scene")
    p.add_argument("--instructions", help="same instruction file used to simulate")
    p.add_argument("--out", default="frames")
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--no-relight", action="store_true")
    p.add_argument("--clamp", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("report", help="CSV and figures for a trajectory")
    p.add_argument("trajectory")
    p.add_argument("--out", default="report")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except PhysLayerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
