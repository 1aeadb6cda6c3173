"""Animation instruction DSL: parsing, canonical formatting, application.

Grammar:
    program := command*
    command := insert | remove | push | spin | gravity
    insert  := "insert" IDENT "from" PATH "at" "(" NUM "," NUM "," NUM ")" props?
    props   := ("mass" NUM)? ("friction" NUM)? ("elasticity" NUM)?
    remove  := "remove" IDENT
    push    := "push" IDENT "force" "(" NUM "," NUM "," NUM ")"
               ("at" NUM "s")? ("for" NUM "s")?
    spin    := "spin" IDENT "torque" NUM ("at" NUM "s")? ("for" NUM "s")?
    gravity := "set" "gravity" "(" NUM "," NUM ")"

Comments start with '#' and run to end of line. A Control with no "for"
clause defaults to a duration of one simulation timestep (impulse-like),
resolved when the schedule is built.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, replace as dc_replace

from .errors import DuplicateBodyId, ParseError, RangeViolationError, UnknownBody
from .scene import BodySpec, _load_png, validate_scene


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Insert:
    body_id: str
    path: str
    position: tuple  # (x px, y px)
    depth: float  # m
    mass: float | None = None
    friction: float | None = None
    elasticity: float | None = None


@dataclass(frozen=True)
class Remove:
    body_id: str


@dataclass(frozen=True)
class Control:
    body_id: str
    force: tuple = (0.0, 0.0, 0.0)  # N, (x, y, z)
    torque: float = 0.0  # N*m
    start: float = 0.0  # s
    duration: float | None = None  # s; None = one timestep
    kind: str = "push"  # "push" or "spin", for canonical formatting


@dataclass(frozen=True)
class SetGravity:
    gravity: tuple  # (x, y) m/s^2


@dataclass(frozen=True)
class InstructionProgram:
    commands: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "commands", tuple(self.commands))


@dataclass(frozen=True)
class ForceSchedule:
    """Timed force/torque intervals per body; overlaps sum."""

    entries: tuple = ()  # (body_id, start, duration, force3, torque)

    def at(self, body_id, t):
        """Total (force, torque) applying to body_id at time t."""
        fx = fy = fz = tq = 0.0
        for bid, start, duration, force, torque in self.entries:
            if bid == body_id and start <= t < start + duration:
                fx += force[0]
                fy += force[1]
                fz += force[2]
                tq += torque
        return (fx, fy, fz), tq


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<num>[-+]?(\d+\.\d*|\.\d+|\d+)([eE][-+]?\d+)?)
  | (?P<string>"[^"\n]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_./-]*)
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "insert", "remove", "push", "spin", "set", "gravity", "from", "at",
    "for", "force", "torque", "mass", "friction", "elasticity",
}


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, STRING, punct literal, EOF
    text: str
    line: int
    column: int


def tokenize(text):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "num":
            tokens.append(Token("NUM", value, line, col))
        elif kind == "string":
            tokens.append(Token("STRING", value[1:-1], line, col))
        elif kind == "ident":
            tokens.append(Token("IDENT", value, line, col))
        elif kind == "punct":
            tokens.append(Token(value, value, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self):
        return self.tokens[self.i]

    def error(self, expected):
        t = self.cur
        got = t.text if t.kind != "EOF" else "end of input"
        raise ParseError(f"unexpected {got!r}", t.line, t.column, expected)

    def accept(self, kind, text=None):
        t = self.cur
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind, text=None):
        tok = self.accept(kind, text)
        if tok is None:
            return self.error([text if text is not None else kind])
        return tok

    def keyword(self, word):
        return self.accept("IDENT", word)

    def expect_keyword(self, word):
        if not self.keyword(word):
            self.error([word])

    def number(self):
        tok = self.expect("NUM")
        return float(tok.text)

    def tuple_of(self, n):
        self.expect("(")
        vals = [self.number()]
        for _ in range(n - 1):
            self.expect(",")
            vals.append(self.number())
        self.expect(")")
        return tuple(vals)

    def ident(self):
        t = self.cur
        if t.kind == "IDENT" and t.text not in KEYWORDS:
            self.i += 1
            return t.text
        return self.error(["IDENT"])

    def path(self):
        t = self.cur
        if t.kind == "STRING":
            self.i += 1
            return t.text
        if t.kind == "IDENT":
            self.i += 1
            return t.text
        return self.error(["PATH"])

    def seconds_clause(self, word):
        """Optional ("at"|"for") NUM "s"; returns the number or None."""
        if not self.keyword(word):
            return None
        value = self.number()
        self.expect_keyword("s")
        return value

    def command(self):
        if self.keyword("insert"):
            body_id = self.ident()
            self.expect_keyword("from")
            path = self.path()
            self.expect_keyword("at")
            x, y, d = self.tuple_of(3)
            mass = friction = elasticity = None
            if self.keyword("mass"):
                mass = self.number()
            if self.keyword("friction"):
                friction = self.number()
            if self.keyword("elasticity"):
                elasticity = self.number()
            return Insert(body_id, path, (x, y), d, mass, friction, elasticity)
        if self.keyword("remove"):
            return Remove(self.ident())
        if self.keyword("push"):
            body_id = self.ident()
            self.expect_keyword("force")
            force = self.tuple_of(3)
            start = self.seconds_clause("at")
            duration = self.seconds_clause("for")
            return Control(body_id, force=force, start=start or 0.0,
                           duration=duration, kind="push")
        if self.keyword("spin"):
            body_id = self.ident()
            self.expect_keyword("torque")
            torque = self.number()
            start = self.seconds_clause("at")
            duration = self.seconds_clause("for")
            return Control(body_id, torque=torque, start=start or 0.0,
                           duration=duration, kind="spin")
        if self.keyword("set"):
            self.expect_keyword("gravity")
            return SetGravity(self.tuple_of(2))
        return self.error(["insert", "remove", "push", "spin", "set"])

    def program(self):
        commands = []
        while self.cur.kind != "EOF":
            commands.append(self.command())
        return InstructionProgram(tuple(commands))


def parse_program(text):
    """Parse instruction text into an InstructionProgram AST."""
    return _Parser(tokenize(text)).program()


# ---------------------------------------------------------------------------
# Canonical formatting


def _fmt_num(x):
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_command(cmd):
    if isinstance(cmd, Insert):
        parts = [
            f'insert {cmd.body_id} from "{cmd.path}" at '
            f"({_fmt_num(cmd.position[0])}, {_fmt_num(cmd.position[1])}, {_fmt_num(cmd.depth)})"
        ]
        if cmd.mass is not None:
            parts.append(f"mass {_fmt_num(cmd.mass)}")
        if cmd.friction is not None:
            parts.append(f"friction {_fmt_num(cmd.friction)}")
        if cmd.elasticity is not None:
            parts.append(f"elasticity {_fmt_num(cmd.elasticity)}")
        return " ".join(parts)
    if isinstance(cmd, Remove):
        return f"remove {cmd.body_id}"
    if isinstance(cmd, Control):
        if cmd.kind == "spin":
            out = f"spin {cmd.body_id} torque {_fmt_num(cmd.torque)}"
        else:
            fx, fy, fz = cmd.force
            out = f"push {cmd.body_id} force ({_fmt_num(fx)}, {_fmt_num(fy)}, {_fmt_num(fz)})"
        if cmd.start != 0.0:
            out += f" at {_fmt_num(cmd.start)} s"
        if cmd.duration is not None:
            out += f" for {_fmt_num(cmd.duration)} s"
        return out
    if isinstance(cmd, SetGravity):
        gx, gy = cmd.gravity
        return f"set gravity ({_fmt_num(gx)}, {_fmt_num(gy)})"
    raise TypeError(f"not a command: {cmd!r}")


def format_program(prog):
    """Canonical pretty-print; parse(format(p)) is structurally equal to p."""
    if not prog.commands:
        return ""
    return "\n".join(format_command(c) for c in prog.commands) + "\n"


def ast_to_json(prog):
    """JSON dump of the AST, one object per command."""
    out = []
    for cmd in prog.commands:
        d = {"command": type(cmd).__name__.lower()}
        for key, value in vars(cmd).items():
            d[key] = list(value) if isinstance(value, tuple) else value
        out.append(d)
    return json.dumps(out, indent=2)


# ---------------------------------------------------------------------------
# Application


def apply_instructions(scene, prog, asset_dir="."):
    """Apply a program to a scene; returns (new_scene, ForceSchedule).

    The input scene is never mutated. Inserted sprites are loaded from
    `asset_dir`. Commands apply in textual order.
    """
    bodies = list(scene.bodies)
    gravity = scene.gravity
    entries = []

    def index_of(body_id):
        for i, b in enumerate(bodies):
            if b.id == body_id:
                return i
        raise UnknownBody(body_id)

    for cmd in prog.commands:
        if isinstance(cmd, Insert):
            sprite = _load_png(os.path.join(asset_dir, cmd.path), "RGBA")
            spec = BodySpec(
                id=cmd.body_id,
                sprite=sprite,
                position=cmd.position,
                depth=cmd.depth,
                mass=cmd.mass if cmd.mass is not None else 1.0,
                friction=cmd.friction if cmd.friction is not None else 0.5,
                elasticity=cmd.elasticity if cmd.elasticity is not None else 0.5,
            )
            probe = dc_replace(scene, bodies=(spec,))
            violations = validate_scene(probe)
            if violations:
                raise RangeViolationError(violations)
            if any(b.id == cmd.body_id for b in bodies):
                raise DuplicateBodyId(cmd.body_id)
            bodies.append(spec)
        elif isinstance(cmd, Remove):
            bodies.pop(index_of(cmd.body_id))
        elif isinstance(cmd, Control):
            index_of(cmd.body_id)  # existence check
            entries.append((cmd.body_id, cmd.start, cmd.duration, cmd.force, cmd.torque))
        elif isinstance(cmd, SetGravity):
            gravity = cmd.gravity
        else:
            raise TypeError(f"not a command: {cmd!r}")

    dt = scene.sim.dt
    resolved = tuple(
        (bid, start, duration if duration is not None else dt, force, torque)
        for bid, start, duration, force, torque in entries
    )
    new_scene = dc_replace(scene, bodies=tuple(bodies), gravity=tuple(gravity))
    return new_scene, ForceSchedule(resolved)
