"""Exception types raised across the toolchain.

Every error subclasses SignforgeError so callers (CLI, HTTP service) can map
the whole family to an exit code / status code in one place.
"""

from __future__ import annotations


class SignforgeError(Exception):
    """Base class for all toolchain errors."""


# --- URDF / robot model ---

class MalformedXml(SignforgeError):
    pass


class UnsupportedJointType(SignforgeError):
    def __init__(self, joint: str, joint_type: str):
        super().__init__(f"joint {joint!r} has unsupported type {joint_type!r}")
        self.joint = joint
        self.joint_type = joint_type


class DanglingLinkReference(SignforgeError):
    def __init__(self, joint: str, link: str):
        super().__init__(f"joint {joint!r} references unknown link {link!r}")
        self.joint = joint
        self.link = link


class NonUnitAxis(SignforgeError):
    def __init__(self, joint: str):
        super().__init__(f"revolute joint {joint!r} has a non-unit axis")
        self.joint = joint


class NoPath(SignforgeError):
    def __init__(self, base: str, tip: str):
        super().__init__(f"no path from {base!r} to {tip!r}")
        self.base = base
        self.tip = tip


class AmbiguousPath(SignforgeError):
    pass


class NoDof(SignforgeError):
    pass


# --- kinematics ---

class DimensionMismatch(SignforgeError):
    pass


class InvalidOptions(SignforgeError):
    pass


class UnmappedJoint(SignforgeError):
    def __init__(self, joint: str):
        super().__init__(f"mirror map has no entry for joint {joint!r}")
        self.joint = joint


# --- animation / qanim ---

class NonMonotoneFrames(SignforgeError):
    pass


class EmptyKeys(SignforgeError):
    pass


class EmptyAnimation(SignforgeError):
    pass


class InvariantViolation(SignforgeError):
    pass


class MissingAttribute(SignforgeError):
    def __init__(self, element: str, attribute: str):
        super().__init__(f"element <{element}> is missing attribute {attribute!r}")
        self.element = element
        self.attribute = attribute


class NonNumericValue(SignforgeError):
    pass


class NonFinite(SignforgeError):
    pass


# --- lexicon / sentence ---

class SchemaViolation(SignforgeError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class NonIncreasingTimes(SignforgeError):
    pass


class FailedCompile(SignforgeError):
    def __init__(self, report):
        super().__init__(f"sign compilation failed: {'; '.join(report.failure_reasons)}")
        self.report = report


class UnknownGloss(SignforgeError):
    def __init__(self, gloss: str):
        super().__init__(f"gloss {gloss!r} is not in the lexicon")
        self.gloss = gloss


class FpsMismatch(SignforgeError):
    pass


# --- stats ---

class DomainError(SignforgeError):
    pass


class CsvParseError(SignforgeError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason
