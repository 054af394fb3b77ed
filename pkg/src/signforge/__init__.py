"""Sign-to-animation toolchain: URDF arm model, IK, keyframe curves,
animation-file emission, sentence composition and recognition statistics."""

__version__ = "0.1.0"

from .animation import ActuatorCurve, Animation, Key, Tangent, auto_tangents, sample
from .kinematics import (
    DEFAULT_MIRROR_MAP,
    IkGoal,
    IkOptions,
    IkSolution,
    JointVector,
    MirrorMap,
    Pose,
    forward,
    jacobian,
    mirror,
    solve_ik,
)
from .qanim import emit_qanim, format_number, parse_qanim
from .robot_model import KinematicChain, RobotModel, build_chain, parse_urdf

__all__ = [
    "ActuatorCurve",
    "Animation",
    "DEFAULT_MIRROR_MAP",
    "IkGoal",
    "IkOptions",
    "IkSolution",
    "JointVector",
    "Key",
    "KinematicChain",
    "MirrorMap",
    "Pose",
    "RobotModel",
    "Tangent",
    "auto_tangents",
    "build_chain",
    "emit_qanim",
    "format_number",
    "forward",
    "jacobian",
    "mirror",
    "parse_qanim",
    "parse_urdf",
    "sample",
    "solve_ik",
]
