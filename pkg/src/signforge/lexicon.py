"""Declarative sign definitions and the sign -> animation compiler.

A sign is a JSON document (one per gloss, ``<GLOSS>.sign.json``) listing
timed task-space waypoints for the right hand plus hand state, mirroring and
repetition flags. Compilation solves IK per waypoint (seeded from the gloss
and waypoint index so whole-lexicon builds are reproducible), converts the
solved joint values to keyframe curves with automatic tangents, mirrors them
onto the left arm when requested, and appends hand-actuator curves.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .animation import ActuatorCurve, Animation, auto_tangents
from .errors import NonIncreasingTimes, SchemaViolation
from .kinematics import (
    HAND_STATES,
    IkGoal,
    IkOptions,
    JointVector,
    MirrorMap,
    Pose,
    forward,
    mirror,
    solve_ik,
)
from .robot_model import KinematicChain

_GLOSS_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")

DEFAULT_WEIGHTS = (0.1, 0.1, 0.1, 1.0, 1.0, 1.0)
IDENTITY_QUAT = (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Waypoint:
    time: float  # s
    position: tuple[float, float, float]  # m, base frame
    orientation: tuple[float, float, float, float] = IDENTITY_QUAT  # (w, x, y, z)
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    hand_state: str = "neutral"

    def pose(self) -> Pose:
        return Pose(np.array(self.position), np.array(self.orientation))


@dataclass(frozen=True)
class SignDefinition:
    gloss: str
    waypoints: tuple[Waypoint, ...]
    category: str = ""
    two_handed: bool = False
    mirrored: bool = False
    repetitions: int = 1
    manual_only: bool = False

    def __post_init__(self):
        if not _GLOSS_RE.match(self.gloss):
            raise SchemaViolation("gloss", f"{self.gloss!r} is not an uppercase identifier")
        if self.repetitions < 1:
            raise SchemaViolation("repetitions", "must be a positive integer")
        if self.mirrored and not self.two_handed:
            raise SchemaViolation("mirrored", "a mirrored sign must be two_handed")
        n = len(self.waypoints)
        if n == 0:
            raise SchemaViolation("waypoints", "at least one waypoint is required")
        if n == 1 and self.repetitions != 1:
            raise SchemaViolation("waypoints", "a static hold cannot be repeated")
        times = [w.time for w in self.waypoints]
        if times[0] != 0.0:
            raise NonIncreasingTimes("waypoint times must start at 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise NonIncreasingTimes("waypoint times must be strictly increasing")

    @property
    def duration(self) -> float:
        return self.waypoints[-1].time


@dataclass(frozen=True)
class KeepOutRegion:
    """Axis-aligned box around the chest tablet, base frame, metres."""

    minimum: tuple[float, float, float]
    maximum: tuple[float, float, float]

    def __post_init__(self):
        if any(a > b for a, b in zip(self.minimum, self.maximum)):
            raise SchemaViolation("keepout", "min corner exceeds max corner")

    def contains(self, point) -> bool:
        return all(a <= p <= b for p, a, b in zip(point, self.minimum, self.maximum))


@dataclass(frozen=True)
class HandConfig:
    right_actuator: str = "RHand"
    left_actuator: str = "LHand"
    open_value: float = 0.98
    closed_value: float = 0.02
    neutral_value: float = 0.5
    scale: float = 1.0  # applied at curve construction (wire unit handling)

    def value(self, state: str) -> float:
        nominal = {
            "open": self.open_value,
            "closed": self.closed_value,
            "neutral": self.neutral_value,
        }[state]
        return nominal * self.scale


@dataclass(frozen=True)
class Diagnostic:
    kind: str  # KeepOutViolation | LikelyUnreachable
    waypoint: int
    message: str


@dataclass(frozen=True)
class CompileReport:
    gloss: str
    status: str  # Automated | Failed | Skipped
    waypoint_status: tuple[str, ...] = ()
    failure_reasons: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CompileOptions:
    fps: int = 25
    ik: IkOptions = field(default_factory=IkOptions)
    hand: HandConfig = field(default_factory=HandConfig)
    rest_posture: tuple[float, ...] | None = None  # rad, per chain joint; default zeros
    strict: bool = False
    keepout: KeepOutRegion | None = None


# --- parsing ---------------------------------------------------------------


def _expect(condition: bool, path: str, reason: str) -> None:
    if not condition:
        raise SchemaViolation(path, reason)


def _number_list(value, path: str, length: int) -> tuple[float, ...]:
    _expect(isinstance(value, (list, tuple)), path, "expected a list of numbers")
    _expect(len(value) == length, path, f"expected {length} numbers, got {len(value)}")
    out = []
    for i, item in enumerate(value):
        _expect(isinstance(item, (int, float)) and not isinstance(item, bool),
                f"{path}[{i}]", "expected a number")
        out.append(float(item))
    return tuple(out)


def parse_sign(document) -> SignDefinition:
    """Validate a sign document (JSON text or an already-decoded mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaViolation("$", f"invalid JSON: {exc}") from exc
    else:
        data = document
    _expect(isinstance(data, dict), "$", "sign document must be a JSON object")

    _expect("gloss" in data, "gloss", "required field missing")
    _expect(isinstance(data["gloss"], str), "gloss", "expected a string")
    _expect("waypoints" in data, "waypoints", "required field missing")
    _expect(isinstance(data["waypoints"], list), "waypoints", "expected a list")

    for flag in ("two_handed", "mirrored", "manual_only"):
        if flag in data:
            _expect(isinstance(data[flag], bool), flag, "expected true/false")
    if "repetitions" in data:
        _expect(
            isinstance(data["repetitions"], int) and not isinstance(data["repetitions"], bool),
            "repetitions",
            "expected an integer",
        )
    if "category" in data:
        _expect(isinstance(data["category"], str), "category", "expected a string")

    waypoints = []
    for i, wp in enumerate(data["waypoints"]):
        path = f"waypoints[{i}]"
        _expect(isinstance(wp, dict), path, "expected an object")
        _expect("time" in wp, f"{path}.time", "required field missing")
        _expect(
            isinstance(wp["time"], (int, float)) and not isinstance(wp["time"], bool),
            f"{path}.time",
            "expected a number",
        )
        _expect(wp["time"] >= 0, f"{path}.time", "must be nonnegative")
        _expect("position" in wp, f"{path}.position", "required field missing")
        position = _number_list(wp["position"], f"{path}.position", 3)
        orientation = (
            _number_list(wp["orientation"], f"{path}.orientation", 4)
            if "orientation" in wp
            else IDENTITY_QUAT
        )
        norm = math.sqrt(sum(c * c for c in orientation))
        _expect(abs(norm - 1.0) < 1e-5, f"{path}.orientation", "quaternion must be unit length")
        if abs(norm - 1.0) >= 1e-12:  # keep normalization idempotent across reparses
            orientation = tuple(c / norm for c in orientation)
        weights = (
            _number_list(wp["weights"], f"{path}.weights", 6)
            if "weights" in wp
            else DEFAULT_WEIGHTS
        )
        _expect(all(w >= 0 for w in weights), f"{path}.weights", "weights must be nonnegative")
        _expect(any(w > 0 for w in weights), f"{path}.weights", "at least one weight must be positive")
        hand_state = wp.get("hand_state", "neutral")
        _expect(hand_state in HAND_STATES, f"{path}.hand_state",
                f"must be one of {', '.join(HAND_STATES)}")
        waypoints.append(
            Waypoint(
                time=float(wp["time"]),
                position=position,
                orientation=orientation,
                weights=weights,
                hand_state=hand_state,
            )
        )

    return SignDefinition(
        gloss=data["gloss"],
        waypoints=tuple(waypoints),
        category=data.get("category", ""),
        two_handed=data.get("two_handed", False),
        mirrored=data.get("mirrored", False),
        repetitions=data.get("repetitions", 1),
        manual_only=data.get("manual_only", False),
    )


def sign_to_dict(sign: SignDefinition) -> dict:
    return {
        "gloss": sign.gloss,
        "category": sign.category,
        "two_handed": sign.two_handed,
        "mirrored": sign.mirrored,
        "repetitions": sign.repetitions,
        "manual_only": sign.manual_only,
        "waypoints": [
            {
                "time": w.time,
                "position": list(w.position),
                "orientation": list(w.orientation),
                "weights": list(w.weights),
                "hand_state": w.hand_state,
            }
            for w in sign.waypoints
        ],
    }


# --- validation ------------------------------------------------------------


def chain_reach(chain: KinematicChain) -> tuple[np.ndarray, float]:
    """(shoulder position, maximum reach) from the chain's fixed offsets."""
    shoulder = chain.joints[0].pre_transform[:3, 3]
    reach = 0.0
    for joint in chain.joints[1:]:
        reach += float(np.linalg.norm(joint.pre_transform[:3, 3]))
    reach += float(np.linalg.norm(chain.tip_transform[:3, 3]))
    return shoulder, reach


def validate_sign(
    sign: SignDefinition,
    chain: KinematicChain,
    keepout: KeepOutRegion | None = None,
) -> list[Diagnostic]:
    """Static checks that need no IK solve; returns diagnostics, maybe empty."""
    diagnostics: list[Diagnostic] = []
    shoulder, reach = chain_reach(chain)
    for i, wp in enumerate(sign.waypoints):
        position = np.array(wp.position)
        if keepout is not None and keepout.contains(position):
            diagnostics.append(
                Diagnostic(
                    "KeepOutViolation",
                    i,
                    f"waypoint {i} at {wp.position} lies inside the keep-out box",
                )
            )
        if float(np.linalg.norm(position - shoulder)) > reach:
            diagnostics.append(
                Diagnostic(
                    "LikelyUnreachable",
                    i,
                    f"waypoint {i} is {np.linalg.norm(position - shoulder):.3f} m from the "
                    f"shoulder, beyond the {reach:.3f} m arm length",
                )
            )
    return diagnostics


# --- compilation -----------------------------------------------------------


def waypoint_seed(gloss: str, index: int) -> int:
    """Stable 32-bit restart seed per (gloss, waypoint)."""
    digest = hashlib.sha256(f"{gloss}:{index}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def _pose_gap(a: Waypoint, b: Waypoint) -> float:
    dp = np.linalg.norm(np.array(a.position) - np.array(b.position))
    dot = abs(sum(x * y for x, y in zip(a.orientation, b.orientation)))
    dq = 2.0 * math.acos(min(1.0, dot))
    return float(dp + dq)


def compile_sign(
    sign: SignDefinition,
    chain: KinematicChain,
    mirror_map: MirrorMap,
    options: CompileOptions | None = None,
) -> tuple[Animation | None, CompileReport]:
    """Compile one sign; returns (animation, report), animation None on Failed.

    Every waypoint is solved once; repetitions reuse the solved values with
    time offsets, dropping each later block's first key onto the previous
    block's last frame (repeated signs are expected to be cyclic; a warning
    is recorded when the endpoints differ).
    """
    options = options or CompileOptions()
    fps = options.fps
    warnings: list[str] = []
    reasons: list[str] = []

    if options.strict:
        for diag in validate_sign(sign, chain, options.keepout):
            if diag.kind == "KeepOutViolation":
                reasons.append(diag.message)
        if reasons:
            report = CompileReport(
                gloss=sign.gloss,
                status="Failed",
                failure_reasons=tuple(reasons),
            )
            return None, report

    solutions = []
    statuses = []
    for i, wp in enumerate(sign.waypoints):
        goal = IkGoal(
            target=wp.pose(),
            weights=np.array(wp.weights),
            hand_state=wp.hand_state,
            mirror=sign.mirrored,
            seed=waypoint_seed(sign.gloss, i),
        )
        solution = solve_ik(chain, goal, options.ik)
        solutions.append(solution)
        statuses.append(solution.status)
        if solution.status == "Unreachable":
            reasons.append(
                f"waypoint {i}: kinematic infeasibility (weighted residual {solution.residual:.4g})"
            )
        elif solution.status == "BestEffort":
            warnings.append(
                f"waypoint {i}: best-effort solve, residual {solution.residual:.4g}"
            )

    if reasons:
        report = CompileReport(
            gloss=sign.gloss,
            status="Failed",
            waypoint_status=tuple(statuses),
            failure_reasons=tuple(reasons),
            warnings=tuple(warnings),
        )
        return None, report

    if sign.repetitions > 1 and _pose_gap(sign.waypoints[0], sign.waypoints[-1]) > 1e-6:
        warnings.append(
            "repetition discontinuity: first and last waypoints differ; "
            "the repeated block will jump at block boundaries"
        )

    period = sign.duration
    frame_angle_pairs: list[tuple[int, np.ndarray, str]] = []
    for repetition in range(sign.repetitions):
        for i, wp in enumerate(sign.waypoints):
            if repetition > 0 and i == 0:
                continue  # lands on the previous block's last frame
            t = repetition * period + wp.time
            frame = int(round(t * fps))
            frame_angle_pairs.append((frame, solutions[i].q.values, wp.hand_state))

    frames = [f for f, _, _ in frame_angle_pairs]
    if any(b <= a for a, b in zip(frames, frames[1:])):
        report = CompileReport(
            gloss=sign.gloss,
            status="Failed",
            waypoint_status=tuple(statuses),
            failure_reasons=("waypoint times collapse to non-increasing frames at "
                             f"{fps} fps",),
            warnings=tuple(warnings),
        )
        return None, report

    curves: list[ActuatorCurve] = []
    for j, name in enumerate(chain.joint_names):
        keys = [(f, math.degrees(angles[j])) for f, angles, _ in frame_angle_pairs]
        curves.append(auto_tangents(keys, actuator=name))

    hand = options.hand
    hand_keys = [(f, hand.value(state)) for f, _, state in frame_angle_pairs]
    curves.append(auto_tangents(hand_keys, actuator=hand.right_actuator))

    if sign.two_handed:
        if sign.mirrored:
            mirrored_names = None
            left_values = []
            for f, angles, _ in frame_angle_pairs:
                jv = mirror(JointVector(angles, chain.joint_names), mirror_map)
                if mirrored_names is None:
                    mirrored_names = jv.names
                left_values.append((f, jv.values))
            for j, name in enumerate(mirrored_names):
                keys = [(f, math.degrees(values[j])) for f, values in left_values]
                curves.append(auto_tangents(keys, actuator=name))
            curves.append(auto_tangents(hand_keys, actuator=hand.left_actuator))
        else:
            # Stationary left arm: hold the (mirrored) rest posture.
            rest = np.array(
                options.rest_posture
                if options.rest_posture is not None
                else np.zeros(chain.n)
            )
            held = mirror(JointVector(rest, chain.joint_names), mirror_map)
            first, last = frames[0], frames[-1]
            hold_frames = [first] if last == first else [first, last]
            for name, value in zip(held.names, held.values):
                keys = [(f, math.degrees(value)) for f in hold_frames]
                curves.append(auto_tangents(keys, actuator=name))
            neutral = [(f, hand.value("neutral")) for f in hold_frames]
            curves.append(auto_tangents(neutral, actuator=hand.left_actuator))

    animation = Animation(fps=fps, curves=tuple(curves))
    report = CompileReport(
        gloss=sign.gloss,
        status="Automated",
        waypoint_status=tuple(statuses),
        warnings=tuple(warnings),
    )
    return animation, report


# --- batch -----------------------------------------------------------------


@dataclass(frozen=True)
class BatchReport:
    reports: tuple[CompileReport, ...]
    emitted: tuple[str, ...]  # written .qanim paths
    errors: tuple[str, ...] = ()  # per-file I/O or schema problems

    @property
    def counts(self) -> dict[str, int]:
        out = {"Automated": 0, "Failed": 0, "Skipped": 0}
        for report in self.reports:
            out[report.status] += 1
        return out


def compile_lexicon(
    directory,
    chain: KinematicChain,
    mirror_map: MirrorMap,
    options: CompileOptions | None = None,
    output_dir=None,
) -> BatchReport:
    """Compile every ``*.sign.json`` under ``directory`` (sorted by gloss).

    One ``<GLOSS>.qanim`` per non-manual-only sign, written atomically to
    ``output_dir`` (the lexicon directory by default). Per-file failures are
    collected, not fatal.
    """
    from .qanim import write_qanim

    directory = Path(directory)
    out_dir = Path(output_dir) if output_dir is not None else directory
    out_dir.mkdir(parents=True, exist_ok=True)

    parsed: list[SignDefinition] = []
    errors: list[str] = []
    for path in sorted(directory.glob("*.sign.json")):
        try:
            sign = parse_sign(path.read_text(encoding="utf-8"))
        except (SchemaViolation, NonIncreasingTimes, OSError) as exc:
            errors.append(f"{path.name}: {exc}")
            continue
        parsed.append(sign)
    parsed.sort(key=lambda s: s.gloss)

    reports: list[CompileReport] = []
    emitted: list[str] = []
    for sign in parsed:
        if sign.manual_only:
            reports.append(CompileReport(gloss=sign.gloss, status="Skipped"))
            continue
        animation, report = compile_sign(sign, chain, mirror_map, options)
        reports.append(report)
        if animation is not None:
            target = out_dir / f"{sign.gloss}.qanim"
            try:
                write_qanim(target, animation)
                emitted.append(str(target))
            except OSError as exc:
                errors.append(f"{target.name}: {exc}")

    return BatchReport(reports=tuple(reports), emitted=tuple(emitted), errors=tuple(errors))


def load_keepout(text: str) -> KeepOutRegion:
    data = json.loads(text)
    return KeepOutRegion(
        minimum=tuple(float(v) for v in data["min"]),
        maximum=tuple(float(v) for v in data["max"]),
    )


def load_mirror_map(text: str) -> MirrorMap:
    data = json.loads(text)
    return MirrorMap.from_entries(
        (e["source"], e["target"], e["sign"]) for e in data["entries"]
    )


def load_hand_config(text: str) -> HandConfig:
    data = json.loads(text)
    base = HandConfig()
    return replace(
        base,
        right_actuator=data.get("right_actuator", base.right_actuator),
        left_actuator=data.get("left_actuator", base.left_actuator),
        open_value=data.get("open", base.open_value),
        closed_value=data.get("closed", base.closed_value),
        neutral_value=data.get("neutral", base.neutral_value),
        scale=data.get("scale", base.scale),
    )
