"""Local HTTP service exposing the pipeline to the interactive authoring UI.

All request/response bodies are UTF-8 JSON. Responses use a fixed envelope:
exactly one of ``payload`` or ``error`` is present, plus a ``request_id``
echoed from the X-Request-Id header (or generated). Handlers are stateless
except for lexicon persistence, which writes one JSON document per gloss
atomically, serialized per gloss.

Binds localhost by default: this is an authoring tool, not a deployment
target.
"""

from __future__ import annotations

import json
import math
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .animation import ActuatorCurve, Animation, Key, Tangent, sample
from .config import Toolchain
from .errors import (
    SchemaViolation,
    SignforgeError,
    UnknownGloss,
)
from .kinematics import IkGoal, IkSolution, Pose, forward, mirror, solve_ik
from .lexicon import compile_sign, parse_sign, sign_to_dict, validate_sign
from .qanim import emit_qanim
from .sentence import GlossSentence, compose, parse_sentence, rest_values

_SIGN_SUFFIX = ".sign.json"


# --- JSON codecs -------------------------------------------------------------


def _tangent_payload(tangent: Tangent | None):
    if tangent is None:
        return None
    return {"abscissa": tangent.abscissa, "ordinate": tangent.ordinate}


def animation_to_payload(animation: Animation) -> dict:
    return {
        "fps": animation.fps,
        "curves": [
            {
                "actuator": curve.actuator,
                "unit": curve.unit,
                "mute": curve.mute,
                "keys": [
                    {
                        "frame": key.frame,
                        "value": key.value,
                        "left": _tangent_payload(key.left),
                        "right": _tangent_payload(key.right),
                    }
                    for key in curve.keys
                ],
            }
            for curve in animation.curves
        ],
    }


def _tangent_from(payload, side: str) -> Tangent | None:
    if payload is None:
        return None
    try:
        return Tangent(side, float(payload["abscissa"]), float(payload["ordinate"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation("animation", f"bad {side} tangent: {exc}") from exc


def animation_from_payload(data) -> Animation:
    try:
        curves = []
        for curve in data["curves"]:
            keys = tuple(
                Key(
                    frame=int(k["frame"]),
                    value=float(k["value"]),
                    left=_tangent_from(k.get("left"), "left"),
                    right=_tangent_from(k.get("right"), "right"),
                )
                for k in curve["keys"]
            )
            curves.append(
                ActuatorCurve(
                    actuator=str(curve["actuator"]),
                    keys=keys,
                    unit=str(curve.get("unit", "degree")),
                    mute=bool(curve.get("mute", False)),
                )
            )
        return Animation(fps=int(data["fps"]), curves=tuple(curves))
    except SignforgeError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation("animation", str(exc)) from exc


def pose_payload(pose: Pose) -> dict:
    return {
        "position": [float(v) for v in pose.position],
        "orientation": [float(v) for v in pose.orientation],
    }


def solution_payload(solution: IkSolution) -> dict:
    return {
        "joints": {
            "names": list(solution.q.names),
            "values": [float(v) for v in solution.q.values],
        },
        "residual": solution.residual,
        "status": solution.status,
        "iterations": solution.iterations,
        "restarts_used": solution.restarts_used,
    }


def _chain_payload(chain) -> dict:
    return {
        "base": chain.base,
        "tip": chain.tip,
        "joints": [
            {
                "name": j.name,
                "axis": [float(v) for v in j.axis],
                "pre_transform": [[float(v) for v in row] for row in j.pre_transform],
                "lower": j.lower,
                "upper": j.upper,
            }
            for j in chain.joints
        ],
        "tip_transform": [[float(v) for v in row] for row in chain.tip_transform],
    }


# --- HTTP plumbing -----------------------------------------------------------


class HttpError(Exception):
    def __init__(self, status: int, code: str, message: str, extra: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.extra = extra or {}


@dataclass
class ServiceConfig:
    toolchain: Toolchain
    lexicon_dir: Path
    ui_dir: Path | None = None


class AuthoringService:
    """Route table + shared state; one instance serves many handler threads."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.tool = config.toolchain
        self.lexicon_dir = Path(config.lexicon_dir)
        self.lexicon_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # --- lexicon persistence ---

    def _gloss_lock(self, gloss: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(gloss, threading.Lock())

    def _gloss_path(self, gloss: str) -> Path:
        if "/" in gloss or "\\" in gloss or gloss in (".", ".."):
            raise HttpError(400, "bad_gloss", f"invalid gloss {gloss!r}")
        return self.lexicon_dir / f"{gloss}{_SIGN_SUFFIX}"

    def list_glosses(self) -> list[str]:
        return sorted(
            p.name[: -len(_SIGN_SUFFIX)]
            for p in self.lexicon_dir.glob(f"*{_SIGN_SUFFIX}")
        )

    def read_sign(self, gloss: str) -> dict:
        path = self._gloss_path(gloss)
        if not path.exists():
            raise UnknownGloss(gloss)
        return sign_to_dict(parse_sign(path.read_text(encoding="utf-8")))

    def write_sign(self, gloss: str, document: dict) -> dict:
        sign = parse_sign(document)
        if sign.gloss != gloss:
            raise SchemaViolation("gloss", f"document gloss {sign.gloss!r} != path gloss {gloss!r}")
        canonical = sign_to_dict(sign)
        path = self._gloss_path(gloss)
        with self._gloss_lock(gloss):
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(canonical, indent=2) + "\n", encoding="utf-8")
            tmp.replace(path)
        return canonical

    def delete_sign(self, gloss: str) -> None:
        path = self._gloss_path(gloss)
        with self._gloss_lock(gloss):
            if not path.exists():
                raise UnknownGloss(gloss)
            path.unlink()

    # --- pipeline endpoints ---

    def model_payload(self) -> dict:
        keepout = self.tool.keepout
        hand = self.tool.hand
        return {
            "arms": {
                "right": _chain_payload(self.tool.chain),
                "left": _chain_payload(self.tool.left_chain) if self.tool.left_chain else None,
            },
            "mirror": [
                {"source": s, "target": t, "sign": g}
                for s, t, g in self.tool.mirror_map.entries
            ],
            "keepout": {"min": list(keepout.minimum), "max": list(keepout.maximum)},
            "hand": {
                "right_actuator": hand.right_actuator,
                "left_actuator": hand.left_actuator,
            },
            "fps": self.tool.config.fps,
        }

    def ik_payload(self, body: dict) -> dict:
        try:
            target = Pose(
                np.array(body["target"]["position"], dtype=float),
                np.array(body["target"]["orientation"], dtype=float),
            )
            goal = IkGoal(
                target=target,
                weights=np.array(body.get("weights", [0.1, 0.1, 0.1, 1, 1, 1]), dtype=float),
                hand_state=body.get("hand_state", "neutral"),
                mirror=bool(body.get("mirror", False)),
                seed=int(body.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation("ik", str(exc)) from exc
        solution = solve_ik(self.tool.chain, goal, self.tool.ik_options)
        payload = solution_payload(solution)
        if goal.mirror:
            mirrored = mirror(solution.q, self.tool.mirror_map)
            payload["mirrored_joints"] = {
                "names": list(mirrored.names),
                "values": [float(v) for v in mirrored.values],
            }
        return payload

    def compile_payload(self, body: dict) -> dict:
        sign = parse_sign(body)
        animation, report = compile_sign(
            sign, self.tool.chain, self.tool.mirror_map, self.tool.compile_options
        )
        report_payload = {
            "gloss": report.gloss,
            "status": report.status,
            "waypoint_status": list(report.waypoint_status),
            "failure_reasons": list(report.failure_reasons),
            "warnings": list(report.warnings),
        }
        if animation is None:
            raise HttpError(422, "compile_failed", "sign could not be compiled",
                            {"report": report_payload})
        diagnostics = validate_sign(sign, self.tool.chain, self.tool.keepout)
        return {
            "animation": animation_to_payload(animation),
            "report": report_payload,
            "diagnostics": [
                {"kind": d.kind, "waypoint": d.waypoint, "message": d.message}
                for d in diagnostics
            ],
        }

    def sample_payload(self, body: dict) -> dict:
        animation = animation_from_payload(body.get("animation", {}))
        rate = int(body.get("fps", animation.fps))
        if rate <= 0:
            raise SchemaViolation("fps", "must be positive")
        native = animation.fps
        last = animation.last_frame
        count = last + 1 if rate == native else int(math.floor(last / native * rate)) + 1

        right = self.tool.chain
        left = self.tool.left_chain
        frames = []
        for k in range(count):
            frame = float(k) if rate == native else k * native / rate
            values = sample(animation, frame)
            tips = {}
            if all(name in values for name in right.joint_names):
                q = np.array([math.radians(values[name]) for name in right.joint_names])
                tips["right"] = pose_payload(forward(right, q))
            if left is not None and all(name in values for name in left.joint_names):
                q = np.array([math.radians(values[name]) for name in left.joint_names])
                tips["left"] = pose_payload(forward(left, q))
            frames.append({"frame": frame, "values": values, "tips": tips})
        return {"fps": rate, "frames": frames}

    def export_payload(self, body: dict) -> dict:
        animation = animation_from_payload(body.get("animation", {}))
        return {"qanim": emit_qanim(animation)}

    def sentence_payload(self, body: dict) -> dict:
        sentence = parse_sentence(body)
        compiled = {}
        for gloss in sentence.glosses:
            document = self.read_sign(gloss)
            sign = parse_sign(document)
            animation, report = compile_sign(
                sign, self.tool.chain, self.tool.mirror_map, self.tool.compile_options
            )
            if animation is None:
                raise HttpError(
                    422,
                    "compile_failed",
                    f"gloss {gloss!r} failed to compile",
                    {"report": {"gloss": gloss, "failure_reasons": list(report.failure_reasons)}},
                )
            compiled[gloss] = animation
        rest = rest_values(self.tool.chain, self.tool.mirror_map, self.tool.hand)
        animation = compose(sentence, compiled, rest)
        return {"animation": animation_to_payload(animation)}


def _error_status(exc: SignforgeError) -> int:
    if isinstance(exc, UnknownGloss):
        return 404
    return 400


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: AuthoringService  # set by make_server

    # --- plumbing ---

    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass

    def _request_id(self) -> str:
        return self.headers.get("X-Request-Id") or str(uuid.uuid4())

    def _read_json(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise HttpError(400, "bad_json", f"request body is not valid JSON: {exc}") from exc

    def _send(self, status: int, body: dict) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _send_payload(self, payload, status: int = 200) -> None:
        self._send(status, {"request_id": self._request_id(), "payload": payload})

    def _send_error_envelope(self, status: int, code: str, message: str, extra=None) -> None:
        error = {"code": code, "message": message}
        if extra:
            error.update(extra)
        self._send(status, {"request_id": self._request_id(), "error": error})

    def _dispatch(self, handler) -> None:
        try:
            handler()
        except HttpError as exc:
            self._send_error_envelope(exc.status, exc.code, str(exc), exc.extra)
        except SignforgeError as exc:
            self._send_error_envelope(_error_status(exc), type(exc).__name__, str(exc))
        except Exception as exc:  # noqa: BLE001 - last-resort boundary
            self._send_error_envelope(500, "internal_error", f"{type(exc).__name__}: {exc}")

    # --- static UI ---

    def _serve_static(self, path: str) -> bool:
        ui_dir = self.service.config.ui_dir
        if ui_dir is None:
            return False
        relative = "index.html" if path == "/" else path.lstrip("/")
        target = (ui_dir / relative).resolve()
        if not str(target).startswith(str(Path(ui_dir).resolve())) or not target.is_file():
            return False
        content_types = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".map": "application/json",
            ".svg": "image/svg+xml",
            ".png": "image/png",
        }
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_types.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)
        return True

    # --- verbs ---

    def do_GET(self):  # noqa: N802 - stdlib naming
        path = self.path.split("?", 1)[0]
        if path == "/model":
            self._dispatch(lambda: self._send_payload(self.service.model_payload()))
        elif path == "/lexicon":
            self._dispatch(lambda: self._send_payload({"glosses": self.service.list_glosses()}))
        elif path.startswith("/lexicon/"):
            gloss = path[len("/lexicon/"):]
            self._dispatch(lambda: self._send_payload(self.service.read_sign(gloss)))
        elif self._serve_static(path):
            pass
        elif path == "/":
            self._dispatch(
                lambda: self._send_payload(
                    {
                        "service": "signforge-authoring",
                        "endpoints": [
                            "GET /model",
                            "POST /ik",
                            "POST /compile",
                            "POST /sample",
                            "POST /export",
                            "POST /sentence",
                            "GET /lexicon",
                            "GET/PUT/DELETE /lexicon/{gloss}",
                        ],
                    }
                )
            )
        else:
            self._send_error_envelope(404, "not_found", f"no route for GET {path}")

    def do_POST(self):  # noqa: N802
        path = self.path.split("?", 1)[0]
        routes = {
            "/ik": self.service.ik_payload,
            "/compile": self.service.compile_payload,
            "/sample": self.service.sample_payload,
            "/export": self.service.export_payload,
            "/sentence": self.service.sentence_payload,
        }
        if path not in routes:
            self._send_error_envelope(404, "not_found", f"no route for POST {path}")
            return

        def handle():
            body = self._read_json()
            self._send_payload(routes[path](body))

        self._dispatch(handle)

    def do_PUT(self):  # noqa: N802
        path = self.path.split("?", 1)[0]
        if not path.startswith("/lexicon/"):
            self._send_error_envelope(404, "not_found", f"no route for PUT {path}")
            return
        gloss = path[len("/lexicon/"):]

        def handle():
            body = self._read_json()
            self._send_payload(self.service.write_sign(gloss, body))

        self._dispatch(handle)

    def do_DELETE(self):  # noqa: N802
        path = self.path.split("?", 1)[0]
        if not path.startswith("/lexicon/"):
            self._send_error_envelope(404, "not_found", f"no route for DELETE {path}")
            return
        gloss = path[len("/lexicon/"):]

        def handle():
            self.service.delete_sign(gloss)
            self._send_payload({"deleted": gloss})

        self._dispatch(handle)


def make_server(config: ServiceConfig, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Build (but do not start) the threaded HTTP server; port 0 picks a free one."""
    service = AuthoringService(config)

    class BoundHandler(_Handler):
        pass

    BoundHandler.service = service
    server = ThreadingHTTPServer((host, port), BoundHandler)
    server.daemon_threads = True
    return server


def run_service(config: ServiceConfig, host: str = "127.0.0.1", port: int = 7465) -> None:
    server = make_server(config, host=host, port=port)
    actual = server.server_address[1]
    print(f"signforge authoring service on http://{host}:{actual} "
          f"(lexicon: {config.lexicon_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
