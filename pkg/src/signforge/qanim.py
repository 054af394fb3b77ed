"""Animation-file (.qanim) XML emitter and parser.

Emission is byte-stable: fixed attribute order, 2-space indentation, one
element per line, numbers rendered at the canonical wire precision of 7
fractional digits (round half even, trailing zeros trimmed). Parsing accepts
attribute reordering and ignores unknown attributes with a diagnostic.

Round-tripping an emitted document reproduces the Animation exactly when its
values already sit at wire precision; arbitrary values are narrowed to 7
fractional digits on emission.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

from .animation import ActuatorCurve, Animation, Key, Tangent
from .errors import (
    InvariantViolation,
    MalformedXml,
    MissingAttribute,
    NonFinite,
    NonNumericValue,
)

EDITOR_NAMESPACE = "http://www.ald.softbankrobotics.com/animation/editor"
TYPE_VERSION = "2.0"

_NS_FPS = f"{{{EDITOR_NAMESPACE}}}fps"
_NS_INTERP = f"{{{EDITOR_NAMESPACE}}}interpType"


def format_number(x: float) -> str:
    """Decimal text at wire precision: 7 fractional digits, no exponent,
    trailing zeros then a trailing point trimmed, negative zero normalized."""
    if not math.isfinite(x):
        raise NonFinite(f"cannot format {x!r}")
    s = f"{x:.7f}"
    s = s.rstrip("0").rstrip(".")
    if s in ("-0", ""):
        s = "0"
    return s


def _tangent_lines(tangent: Tangent, indent: str) -> str:
    return (
        f'{indent}<Tangent side="{tangent.side}"'
        f' abscissaParam="{format_number(tangent.abscissa)}"'
        f' ordinateParam="{format_number(tangent.ordinate)}"'
        f' editor:interpType="{tangent.interp}"/>'
    )


def emit_qanim(animation: Animation) -> str:
    """Serialize an Animation to .qanim XML text."""
    if not isinstance(animation, Animation):
        raise InvariantViolation("emit_qanim expects an Animation")
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    envelope = (
        f'<Animation xmlns:editor="{EDITOR_NAMESPACE}"'
        f' typeVersion="{TYPE_VERSION}" editor:fps="{animation.fps}"'
    )
    if not animation.curves:
        lines.append(envelope + "/>")
        return "\n".join(lines) + "\n"
    lines.append(envelope + ">")
    for curve in animation.curves:
        mute = "true" if curve.mute else "false"
        lines.append(
            f'  <ActuatorCurve fps="{animation.fps}" actuator="{curve.actuator}"'
            f' mute="{mute}" unit="{curve.unit}">'
        )
        for key in curve.keys:
            opening = f'    <Key value="{format_number(key.value)}" frame="{key.frame}"'
            if key.left is None and key.right is None:
                lines.append(opening + "/>")
                continue
            lines.append(opening + ">")
            if key.left is not None:
                lines.append(_tangent_lines(key.left, "      "))
            if key.right is not None:
                lines.append(_tangent_lines(key.right, "      "))
            lines.append("    </Key>")
        lines.append("  </ActuatorCurve>")
    lines.append("</Animation>")
    return "\n".join(lines) + "\n"


_KNOWN = {
    "Animation": {"typeVersion", _NS_FPS},
    "ActuatorCurve": {"fps", "actuator", "mute", "unit"},
    "Key": {"value", "frame"},
    "Tangent": {"side", "abscissaParam", "ordinateParam", _NS_INTERP},
}


def _require(el, attr: str, label: str | None = None) -> str:
    if attr not in el.attrib:
        raise MissingAttribute(el.tag, label or attr)
    return el.attrib[attr]


def _number(text: str, context: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise NonNumericValue(f"{context}: {text!r}") from exc


def _integer(text: str, context: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise NonNumericValue(f"{context}: {text!r}") from exc


def _note_unknown(el, diagnostics: list[str]) -> None:
    for attr in el.attrib:
        if attr not in _KNOWN.get(el.tag, set()):
            diagnostics.append(f"ignored unknown attribute {attr!r} on <{el.tag}>")


def parse_qanim(text: str, diagnostics: list[str] | None = None) -> Animation:
    """Parse .qanim XML text back into an Animation.

    ``diagnostics`` collects notes about ignored/unknown content when given.
    """
    diags = diagnostics if diagnostics is not None else []
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    if root.tag != "Animation":
        raise MalformedXml(f"expected <Animation> root, got <{root.tag}>")
    _note_unknown(root, diags)
    fps = _integer(_require(root, _NS_FPS, "editor:fps"), "Animation editor:fps")

    curves = []
    for curve_el in root:
        if curve_el.tag != "ActuatorCurve":
            diags.append(f"ignored unexpected element <{curve_el.tag}>")
            continue
        _note_unknown(curve_el, diags)
        actuator = _require(curve_el, "actuator")
        unit = _require(curve_el, "unit")
        mute = _require(curve_el, "mute") == "true"
        curve_fps = _integer(_require(curve_el, "fps"), "ActuatorCurve fps")
        if curve_fps != fps:
            diags.append(
                f"curve {actuator!r} fps {curve_fps} differs from animation fps {fps}"
            )
        keys = []
        for key_el in curve_el:
            if key_el.tag != "Key":
                diags.append(f"ignored unexpected element <{key_el.tag}>")
                continue
            _note_unknown(key_el, diags)
            value = _number(_require(key_el, "value"), "Key value")
            frame = _integer(_require(key_el, "frame"), "Key frame")
            left = right = None
            for tan_el in key_el:
                if tan_el.tag != "Tangent":
                    diags.append(f"ignored unexpected element <{tan_el.tag}>")
                    continue
                _note_unknown(tan_el, diags)
                side = _require(tan_el, "side")
                tangent = Tangent(
                    side=side,
                    abscissa=_number(_require(tan_el, "abscissaParam"), "abscissaParam"),
                    ordinate=_number(_require(tan_el, "ordinateParam"), "ordinateParam"),
                    interp=tan_el.attrib.get(_NS_INTERP, "bezier_auto"),
                )
                if side == "left":
                    left = tangent
                else:
                    right = tangent
            keys.append(Key(frame=frame, value=value, left=left, right=right))
        curves.append(ActuatorCurve(actuator=actuator, keys=tuple(keys), unit=unit, mute=mute))
    return Animation(fps=fps, curves=tuple(curves))


def write_qanim(path, animation: Animation) -> None:
    """Atomic write: emit to a sibling temp file, then rename into place."""
    import os
    import tempfile

    text = emit_qanim(animation)
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
