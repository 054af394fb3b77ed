"""Keyframe animation model with automatic cubic-Bezier tangents.

Values are stored in degrees (the animation file's native unit); radians are
converted when curves are built from solved joint vectors.

Tangent rule
------------
Tangents are horizontal offsets in frames plus value offsets in degrees. The
two tangents facing a segment share one span: a third of that segment's gap,
clamped by the preceding segment's gap when there is one, i.e.

    span(segment j) = min(gap_j, gap_{j-1}) / 3      (gap_{-1} = infinity)

Slopes are Catmull-Rom at interior keys, clamped to zero at local extrema or
when the key equals a neighbour's value; endpoint slopes are zero. The value
offset of a tangent is slope * abscissa.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .errors import (
    EmptyAnimation,
    EmptyKeys,
    InvariantViolation,
    NonMonotoneFrames,
)

BEZIER_AUTO = "bezier_auto"

# Bisection tolerance for inverting the Bezier x(t) = frame equation.
_FRAME_TOL = 1e-9


@dataclass(frozen=True)
class Tangent:
    side: str  # "left" | "right"
    abscissa: float  # frames; left <= 0, right >= 0
    ordinate: float  # degrees
    interp: str = BEZIER_AUTO

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise InvariantViolation(f"tangent side must be left/right, got {self.side!r}")
        if self.side == "left" and self.abscissa > 0.0:
            raise InvariantViolation("left tangent abscissa must be <= 0")
        if self.side == "right" and self.abscissa < 0.0:
            raise InvariantViolation("right tangent abscissa must be >= 0")


@dataclass(frozen=True)
class Key:
    frame: int
    value: float  # degrees
    left: Tangent | None = None
    right: Tangent | None = None

    def __post_init__(self):
        if self.frame < 0:
            raise InvariantViolation("key frame must be nonnegative")
        if self.left is not None and self.left.side != "left":
            raise InvariantViolation("key.left must be a left tangent")
        if self.right is not None and self.right.side != "right":
            raise InvariantViolation("key.right must be a right tangent")


@dataclass(frozen=True)
class ActuatorCurve:
    actuator: str
    keys: tuple[Key, ...]
    unit: str = "degree"
    mute: bool = False

    def __post_init__(self):
        frames = [k.frame for k in self.keys]
        if any(b <= a for a, b in zip(frames, frames[1:])):
            raise NonMonotoneFrames(f"curve {self.actuator!r} key frames must increase")
        n = len(self.keys)
        for i, key in enumerate(self.keys):
            interior = 0 < i < n - 1
            if n > 1:
                if i == 0 and key.left is not None:
                    raise InvariantViolation("first key must not carry a left tangent")
                if i == n - 1 and key.right is not None:
                    raise InvariantViolation("last key must not carry a right tangent")
                if interior and (key.left is None or key.right is None):
                    raise InvariantViolation("interior keys must carry both tangents")
            if key.left is not None and i > 0:
                gap = key.frame - self.keys[i - 1].frame
                if abs(key.left.abscissa) > gap:
                    raise InvariantViolation("left tangent reaches past the previous key")
            if key.right is not None and i < n - 1:
                gap = self.keys[i + 1].frame - key.frame
                if abs(key.right.abscissa) > gap:
                    raise InvariantViolation("right tangent reaches past the next key")

    @property
    def first_frame(self) -> int:
        return self.keys[0].frame if self.keys else 0

    @property
    def last_frame(self) -> int:
        return self.keys[-1].frame if self.keys else 0


@dataclass(frozen=True)
class Animation:
    fps: int
    curves: tuple[ActuatorCurve, ...] = field(default=())

    def __post_init__(self):
        if int(self.fps) != self.fps or self.fps <= 0:
            raise InvariantViolation("fps must be a positive integer")
        names = [c.actuator for c in self.curves]
        if len(names) != len(set(names)):
            raise InvariantViolation("actuator names must be unique")

    @property
    def last_frame(self) -> int:
        return max((c.last_frame for c in self.curves), default=0)

    def curve(self, actuator: str) -> ActuatorCurve:
        for c in self.curves:
            if c.actuator == actuator:
                return c
        raise KeyError(actuator)


def _segment_spans(frames: list[int]) -> list[float]:
    gaps = [b - a for a, b in zip(frames, frames[1:])]
    spans = []
    for j, gap in enumerate(gaps):
        limit = gap if j == 0 else min(gap, gaps[j - 1])
        spans.append(limit / 3.0)
    return spans


def auto_tangents(keys, actuator: str = "", mute: bool = False) -> ActuatorCurve:
    """Build an ActuatorCurve with automatic tangents from (frame, value) pairs."""
    pairs = [(int(f), float(v)) for f, v in keys]
    if not pairs:
        raise EmptyKeys("a curve needs at least one key")
    frames = [f for f, _ in pairs]
    values = [v for _, v in pairs]
    if any(b <= a for a, b in zip(frames, frames[1:])):
        raise NonMonotoneFrames("key frames must be strictly increasing")

    n = len(pairs)
    if n == 1:
        return ActuatorCurve(actuator, (Key(frames[0], values[0]),), mute=mute)

    spans = _segment_spans(frames)
    slopes = [0.0] * n
    for i in range(1, n - 1):
        lo, hi = values[i - 1], values[i + 1]
        v = values[i]
        if v >= max(lo, hi) or v <= min(lo, hi):
            continue  # local extremum or neighbour-equal plateau: keep flat
        slopes[i] = (values[i + 1] - values[i - 1]) / (frames[i + 1] - frames[i - 1])

    out = []
    for i in range(n):
        left = None
        right = None
        if i > 0:
            a = -spans[i - 1]
            left = Tangent("left", a, slopes[i] * a)
        if i < n - 1:
            a = spans[i]
            right = Tangent("right", a, slopes[i] * a)
        out.append(Key(frames[i], values[i], left=left, right=right))
    return ActuatorCurve(actuator, tuple(out), mute=mute)


def _bezier(p0: float, p1: float, p2: float, p3: float, t: float) -> float:
    u = 1.0 - t
    return u * u * u * p0 + 3.0 * u * u * t * p1 + 3.0 * u * t * t * p2 + t * t * t * p3


def sample_curve(curve: ActuatorCurve, frame: float) -> float:
    """Evaluate one curve at a (possibly fractional) frame.

    The frame is clamped to the curve's key span. Between keys the cubic
    Bezier defined by the bracketing keys' tangents is inverted for t by
    bisection (x(t) is monotone because spans never exceed a third of the
    gap), then evaluated in y.
    """
    if not curve.keys:
        raise EmptyKeys(f"curve {curve.actuator!r} has no keys")
    keys = curve.keys
    if frame <= keys[0].frame:
        return keys[0].value
    if frame >= keys[-1].frame:
        return keys[-1].value
    frames = [k.frame for k in keys]
    i = bisect_right(frames, frame) - 1
    a, b = keys[i], keys[i + 1]
    if frame == a.frame:
        return a.value

    x0, y0 = float(a.frame), a.value
    x3, y3 = float(b.frame), b.value
    rx = a.right.abscissa if a.right else 0.0
    ry = a.right.ordinate if a.right else 0.0
    lx = b.left.abscissa if b.left else 0.0
    ly = b.left.ordinate if b.left else 0.0
    x1, y1 = x0 + rx, y0 + ry
    x2, y2 = x3 + lx, y3 + ly

    lo, hi = 0.0, 1.0
    t = 0.5
    for _ in range(200):
        t = 0.5 * (lo + hi)
        x = _bezier(x0, x1, x2, x3, t)
        if abs(x - frame) <= _FRAME_TOL:
            break
        if x < frame:
            lo = t
        else:
            hi = t
    return _bezier(y0, y1, y2, y3, t)


def sample(animation: Animation, frame: float) -> dict[str, float]:
    """Evaluate every curve at a frame; each curve clamps to its own span."""
    if not animation.curves:
        raise EmptyAnimation("animation has no curves")
    return {c.actuator: sample_curve(c, frame) for c in animation.curves}


def radians_curve(actuator: str, frame_values, mute: bool = False) -> ActuatorCurve:
    """auto_tangents over (frame, radians) pairs, converting values to degrees."""
    return auto_tangents(
        [(f, math.degrees(v)) for f, v in frame_values], actuator=actuator, mute=mute
    )
