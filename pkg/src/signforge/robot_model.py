"""URDF subset parser and kinematic chain extraction.

Only ``revolute`` and ``fixed`` joints are supported; the tool targets arms
whose description uses nothing else. All angles are radians (URDF native);
degrees exist only at the animation-file boundary.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AmbiguousPath,
    DanglingLinkReference,
    MalformedXml,
    NoDof,
    NonUnitAxis,
    NoPath,
    UnsupportedJointType,
)

_SUPPORTED_JOINT_TYPES = ("revolute", "fixed")
_AXIS_UNIT_TOL = 1e-9


@dataclass(frozen=True)
class LinkSpec:
    name: str


@dataclass(frozen=True)
class JointSpec:
    name: str
    type: str  # "revolute" | "fixed"
    parent: str
    child: str
    origin_xyz: tuple[float, float, float]
    origin_rpy: tuple[float, float, float]
    axis: tuple[float, float, float]
    lower: float
    upper: float


@dataclass(frozen=True)
class RobotModel:
    links: tuple[LinkSpec, ...]
    joints: tuple[JointSpec, ...]
    # One entry per default applied while parsing (e.g. a missing <limit>).
    diagnostics: tuple[str, ...] = field(default=())

    def link_names(self) -> set[str]:
        return {link.name for link in self.links}


def rpy_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """URDF fixed-axis convention: R = Rz(yaw) @ Ry(pitch) @ Rx(roll)."""
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


def origin_transform(xyz, rpy) -> np.ndarray:
    T = np.eye(4)
    T[:3, :3] = rpy_matrix(*rpy)
    T[:3, 3] = xyz
    return T


def _parse_triplet(text: str, what: str) -> tuple[float, float, float]:
    parts = text.split()
    if len(parts) != 3:
        raise MalformedXml(f"{what} must hold 3 numbers, got {text!r}")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError as exc:
        raise MalformedXml(f"{what} is not numeric: {text!r}") from exc
    return (x, y, z)


def parse_urdf(text: str) -> RobotModel:
    """Parse a URDF document restricted to revolute/fixed joints.

    Missing ``<origin>`` defaults to the identity; a missing ``<limit>`` on a
    revolute joint defaults to [-pi, pi] and is reported in the model's
    diagnostics rather than rejected.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    if root.tag != "robot":
        raise MalformedXml(f"expected <robot> root element, got <{root.tag}>")

    links = tuple(LinkSpec(el.attrib["name"]) for el in root.findall("link"))
    link_names = {link.name for link in links}

    diagnostics: list[str] = []
    joints: list[JointSpec] = []
    for el in root.findall("joint"):
        name = el.attrib.get("name", "<unnamed>")
        jtype = el.attrib.get("type", "")
        if jtype not in _SUPPORTED_JOINT_TYPES:
            raise UnsupportedJointType(name, jtype)

        parent_el = el.find("parent")
        child_el = el.find("child")
        if parent_el is None or child_el is None:
            raise MalformedXml(f"joint {name!r} lacks <parent> or <child>")
        parent = parent_el.attrib["link"]
        child = child_el.attrib["link"]
        for link in (parent, child):
            if link not in link_names:
                raise DanglingLinkReference(name, link)

        origin_el = el.find("origin")
        xyz = (0.0, 0.0, 0.0)
        rpy = (0.0, 0.0, 0.0)
        if origin_el is not None:
            if "xyz" in origin_el.attrib:
                xyz = _parse_triplet(origin_el.attrib["xyz"], f"joint {name!r} origin xyz")
            if "rpy" in origin_el.attrib:
                rpy = _parse_triplet(origin_el.attrib["rpy"], f"joint {name!r} origin rpy")

        axis = (1.0, 0.0, 0.0)  # URDF default
        axis_el = el.find("axis")
        if axis_el is not None:
            axis = _parse_triplet(axis_el.attrib["xyz"], f"joint {name!r} axis")

        lower, upper = -math.pi, math.pi
        if jtype == "revolute":
            if abs(math.sqrt(sum(a * a for a in axis)) - 1.0) >= _AXIS_UNIT_TOL:
                raise NonUnitAxis(name)
            limit_el = el.find("limit")
            if limit_el is None:
                diagnostics.append(
                    f"joint {name!r} has no <limit>; defaulting to [-pi, pi]"
                )
            else:
                lower = float(limit_el.attrib.get("lower", -math.pi))
                upper = float(limit_el.attrib.get("upper", math.pi))
                if lower > upper:
                    raise MalformedXml(
                        f"joint {name!r} limit lower {lower} exceeds upper {upper}"
                    )

        joints.append(
            JointSpec(
                name=name,
                type=jtype,
                parent=parent,
                child=child,
                origin_xyz=xyz,
                origin_rpy=rpy,
                axis=axis,
                lower=lower,
                upper=upper,
            )
        )

    model = RobotModel(links=links, joints=tuple(joints), diagnostics=tuple(diagnostics))
    _check_acyclic(model)
    return model


def _check_acyclic(model: RobotModel) -> None:
    parent_of = {}
    for joint in model.joints:
        if joint.child in parent_of:
            raise AmbiguousPath(
                f"link {joint.child!r} has more than one parent joint"
            )
        parent_of[joint.child] = joint.parent
    for start in parent_of:
        seen = {start}
        link = start
        while link in parent_of:
            link = parent_of[link]
            if link in seen:
                raise MalformedXml(f"cycle through link {link!r}")
            seen.add(link)


def serialize_urdf(model: RobotModel, name: str = "robot") -> str:
    """Re-emit a parsed model as URDF text (used for round-trip checks)."""
    lines = [f'<robot name="{name}">']
    for link in model.links:
        lines.append(f'  <link name="{link.name}"/>')
    for j in model.joints:
        lines.append(f'  <joint name="{j.name}" type="{j.type}">')
        lines.append(f'    <parent link="{j.parent}"/>')
        lines.append(f'    <child link="{j.child}"/>')
        xyz = " ".join(repr(v) for v in j.origin_xyz)
        rpy = " ".join(repr(v) for v in j.origin_rpy)
        lines.append(f'    <origin xyz="{xyz}" rpy="{rpy}"/>')
        if j.type == "revolute":
            axis = " ".join(repr(v) for v in j.axis)
            lines.append(f'    <axis xyz="{axis}"/>')
            lines.append(f'    <limit lower="{j.lower!r}" upper="{j.upper!r}"/>')
        lines.append("  </joint>")
    lines.append("</robot>")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ChainJoint:
    """A revolute joint on the extracted path.

    ``pre_transform`` folds the joint's own origin together with any fixed
    joints encountered since the previous revolute joint.
    """

    name: str
    pre_transform: np.ndarray  # 4x4, read-only
    axis: np.ndarray  # unit 3-vector in the joint frame, read-only
    lower: float
    upper: float


@dataclass(frozen=True)
class KinematicChain:
    base: str
    tip: str
    joints: tuple[ChainJoint, ...]
    tip_transform: np.ndarray  # fixed transform after the last revolute joint

    @property
    def n(self) -> int:
        return len(self.joints)

    @property
    def joint_names(self) -> tuple[str, ...]:
        return tuple(j.name for j in self.joints)

    @property
    def lower(self) -> np.ndarray:
        return np.array([j.lower for j in self.joints])

    @property
    def upper(self) -> np.ndarray:
        return np.array([j.upper for j in self.joints])


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


def build_chain(model: RobotModel, base: str, tip: str) -> KinematicChain:
    """Extract the serial chain between two links.

    Fixed joints on the path are folded into the neighbouring revolute
    joint's pre-transform (or into the tip transform when they trail the last
    revolute joint). The result does not depend on declaration order.
    """
    names = model.link_names()
    if base not in names:
        raise NoPath(base, tip)
    if tip not in names:
        raise NoPath(base, tip)

    joint_to_child = {}
    for joint in model.joints:
        if joint.child in joint_to_child:
            raise AmbiguousPath(f"link {joint.child!r} has more than one parent joint")
        joint_to_child[joint.child] = joint

    # Walk tip -> base through parent joints, then reverse.
    path: list[JointSpec] = []
    link = tip
    while link != base:
        joint = joint_to_child.get(link)
        if joint is None:
            raise NoPath(base, tip)
        path.append(joint)
        link = joint.parent
    path.reverse()

    joints: list[ChainJoint] = []
    pending = np.eye(4)
    for joint in path:
        pending = pending @ origin_transform(joint.origin_xyz, joint.origin_rpy)
        if joint.type == "revolute":
            joints.append(
                ChainJoint(
                    name=joint.name,
                    pre_transform=_freeze(pending),
                    axis=_freeze(joint.axis),
                    lower=joint.lower,
                    upper=joint.upper,
                )
            )
            pending = np.eye(4)

    if not joints:
        raise NoDof(f"path {base!r} -> {tip!r} contains no revolute joint")

    return KinematicChain(
        base=base,
        tip=tip,
        joints=tuple(joints),
        tip_transform=_freeze(pending),
    )
