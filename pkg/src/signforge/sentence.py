"""Compose compiled signs into a single sentence animation.

The composed timeline is: lead-in from the rest posture, the signs in gloss
order, a fixed-length transition bridging each boundary, then a lead-out back
to rest. Each sign's keys and tangents are copied verbatim (frame-shifted),
so sampling inside a sign segment reproduces the standalone sign exactly;
only the bridging keys (rest, holds) and the tangents facing bridge segments
are new, and those are flat (zero slope).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .animation import ActuatorCurve, Animation, Key, Tangent
from .errors import EmptyAnimation, FpsMismatch, SchemaViolation, UnknownGloss
from .kinematics import JointVector, MirrorMap, mirror
from .lexicon import HandConfig
from .robot_model import KinematicChain

import numpy as np

DEFAULT_TRANSITION_FRAMES = 10
DEFAULT_LEAD_FRAMES = 12


@dataclass(frozen=True)
class GlossSentence:
    glosses: tuple[str, ...]
    transition_frames: int = DEFAULT_TRANSITION_FRAMES
    lead_in_frames: int = DEFAULT_LEAD_FRAMES
    lead_out_frames: int = DEFAULT_LEAD_FRAMES

    def __post_init__(self):
        if self.transition_frames < 0 or self.lead_in_frames < 0 or self.lead_out_frames < 0:
            raise SchemaViolation("durations", "must be nonnegative")


def sov_order(subject: str, obj: str, verb: str) -> list[str]:
    """Subject-object-verb gloss ordering for declarative sentences."""
    return [subject, obj, verb]


def parse_sentence(document) -> GlossSentence:
    if isinstance(document, (str, bytes)):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaViolation("$", f"invalid JSON: {exc}") from exc
    else:
        data = document
    if not isinstance(data, dict) or "glosses" not in data:
        raise SchemaViolation("glosses", "required field missing")
    glosses = data["glosses"]
    if not isinstance(glosses, list) or not all(isinstance(g, str) for g in glosses):
        raise SchemaViolation("glosses", "expected a list of gloss strings")
    kwargs = {}
    for field_name in ("transition_frames", "lead_in_frames", "lead_out_frames"):
        if field_name in data:
            value = data[field_name]
            if not isinstance(value, int) or isinstance(value, bool):
                raise SchemaViolation(field_name, "expected an integer")
            kwargs[field_name] = value
    return GlossSentence(glosses=tuple(glosses), **kwargs)


def rest_values(
    chain: KinematicChain,
    mirror_map: MirrorMap | None = None,
    hand: HandConfig | None = None,
    rest_posture=None,
) -> dict[str, float]:
    """Per-actuator rest values in the animation's units (degrees / hand range)."""
    rest = np.array(rest_posture if rest_posture is not None else np.zeros(chain.n), dtype=float)
    out = {name: math.degrees(v) for name, v in zip(chain.joint_names, rest)}
    if mirror_map is not None:
        held = mirror(JointVector(rest, chain.joint_names), mirror_map)
        for name, v in zip(held.names, held.values):
            out[name] = math.degrees(v)
    hand = hand or HandConfig()
    out[hand.right_actuator] = hand.value("neutral")
    out[hand.left_actuator] = hand.value("neutral")
    return out


def _append_key(keys: list[Key], key: Key) -> None:
    # Zero-length bridges collapse the seam; the incoming key wins.
    if keys and keys[-1].frame == key.frame:
        keys[-1] = key
    else:
        keys.append(key)


def _shift_key(key: Key, offset: int) -> Key:
    return Key(key.frame + offset, key.value, left=key.left, right=key.right)


def _fill_bridge_tangents(keys: list[Key]) -> list[Key]:
    """Give every interior key the tangents the curve invariant requires;
    added tangents are flat with the one-third-gap span."""
    n = len(keys)
    out = []
    for i, key in enumerate(keys):
        left, right = key.left, key.right
        if i == 0:
            left = None
        elif left is None:
            gap = key.frame - keys[i - 1].frame
            left = Tangent("left", -gap / 3.0, 0.0)
        if i == n - 1:
            right = None
        elif right is None:
            gap = keys[i + 1].frame - key.frame
            right = Tangent("right", gap / 3.0, 0.0)
        out.append(Key(key.frame, key.value, left=left, right=right))
    return out


def compose(
    sentence: GlossSentence,
    compiled: dict[str, Animation],
    rest: dict[str, float] | None = None,
) -> Animation:
    """Stitch compiled sign animations into one sentence animation."""
    if not sentence.glosses:
        raise EmptyAnimation("a sentence needs at least one gloss")
    animations = []
    for gloss in sentence.glosses:
        if gloss not in compiled:
            raise UnknownGloss(gloss)
        animations.append(compiled[gloss])
    fps = animations[0].fps
    for gloss, animation in zip(sentence.glosses, animations):
        if animation.fps != fps:
            raise FpsMismatch(f"sign {gloss!r} has fps {animation.fps}, expected {fps}")

    rest = rest or {}
    lead_in = sentence.lead_in_frames
    lead_out = sentence.lead_out_frames
    transition = sentence.transition_frames

    starts = []
    cursor = lead_in
    for animation in animations:
        starts.append(cursor)
        cursor += animation.last_frame + transition
    cursor -= transition  # no transition after the final sign
    end_frame = cursor + lead_out

    actuators: list[str] = []
    meta: dict[str, tuple[str, bool]] = {}
    for animation in animations:
        for curve in animation.curves:
            if curve.actuator not in meta:
                actuators.append(curve.actuator)
                meta[curve.actuator] = (curve.unit, curve.mute)

    curves = []
    for actuator in actuators:
        unit, mute = meta[actuator]
        held = rest.get(actuator, 0.0)
        keys: list[Key] = []
        if lead_in > 0:
            keys.append(Key(0, held))
        for start, animation in zip(starts, animations):
            segment_end = start + animation.last_frame
            try:
                curve = animation.curve(actuator)
            except KeyError:
                _append_key(keys, Key(start, held))
                if segment_end != start:
                    _append_key(keys, Key(segment_end, held))
                continue
            for key in curve.keys:
                _append_key(keys, _shift_key(key, start))
            held = curve.keys[-1].value
        if lead_out > 0:
            _append_key(keys, Key(end_frame, rest.get(actuator, 0.0)))
        curves.append(ActuatorCurve(actuator, tuple(_fill_bridge_tangents(keys)), unit=unit, mute=mute))

    return Animation(fps=fps, curves=tuple(curves))
