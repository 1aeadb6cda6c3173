"""Exception hierarchy shared across the engine."""


class PhysLayerError(Exception):
    """Base class for all engine errors."""


class SceneError(PhysLayerError):
    pass


class MissingField(SceneError):
    def __init__(self, field, obj="scene"):
        self.field = field
        self.obj = obj
        super().__init__(f"missing field '{field}' in {obj}")


class AssetNotFound(SceneError):
    def __init__(self, path):
        self.path = path
        super().__init__(f"asset not found: {path}")


class MalformedImage(SceneError):
    def __init__(self, path, reason=""):
        self.path = path
        super().__init__(f"malformed image {path}: {reason}")


class DuplicateBodyId(SceneError):
    def __init__(self, body_id):
        self.body_id = body_id
        super().__init__(f"duplicate body id '{body_id}'")


class MalformedScene(SceneError):
    pass


class InstructionError(PhysLayerError):
    pass


class ParseError(InstructionError):
    """Syntax error in an instruction program, with source location."""

    def __init__(self, message, line, column, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"line {line}, column {column}: {message}"
        if expected:
            detail += " (expected " + " | ".join(expected) + ")"
        super().__init__(detail)


class UnknownBody(InstructionError):
    def __init__(self, body_id):
        self.body_id = body_id
        super().__init__(f"unknown body '{body_id}'")


class RangeViolationError(InstructionError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class GeometryError(PhysLayerError):
    pass


class EmptyMask(GeometryError):
    pass


class DegenerateShape(GeometryError):
    pass


class InvalidOverride(PhysLayerError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"layer count override must be >= 1, got {value}")


class NumericalFault(PhysLayerError):
    def __init__(self, body_id, step):
        self.body_id = body_id
        self.step = step
        super().__init__(f"non-finite state for body '{body_id}' at step {step}")


class SingularDepth(PhysLayerError):
    def __init__(self, body_id, depth_px):
        self.body_id = body_id
        self.depth_px = depth_px
        super().__init__(
            f"body '{body_id}' reached the camera plane (f + d = {depth_px:g} px)"
        )


class TooManyFrames(PhysLayerError):
    def __init__(self, n_frames, steps):
        super().__init__(f"cannot sample {n_frames} frames from {steps} steps")


class DimensionMismatch(PhysLayerError):
    pass


class StaleTrajectory(PhysLayerError):
    """Trajectory's scene hash does not match the scene being rendered."""
