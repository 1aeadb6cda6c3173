"""Depth-aware layered 2.5D rigid-body animation engine."""

__version__ = "0.1.0"

from .scene import (  # noqa: F401
    BodySpec,
    Camera,
    DirectionalLight,
    Scene,
    SimConfig,
    Violation,
    load_scene,
    save_scene,
    scene_hash,
    validate_scene,
)
from .instructions import (  # noqa: F401
    ForceSchedule,
    InstructionProgram,
    apply_instructions,
    format_program,
    parse_program,
)
from .layers import (  # noqa: F401
    LayerSet,
    assign_layer,
    compute_layer_count,
    partition_depths,
)
from .physics import BodyState, RigidBody, World, simulate  # noqa: F401
from .perspective import ScaleModel, scale_factor  # noqa: F401
from .trajectory import Trajectory, load_trajectory, save_trajectory  # noqa: F401
