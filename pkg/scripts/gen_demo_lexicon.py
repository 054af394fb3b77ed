#!/usr/bin/env python3
"""Regenerate the bundled demo lexicon.

Waypoints are forward-kinematics poses of in-limit joint configurations of
the bundled arm model, so every demo sign is reachable by construction. Each
generated sign is compiled as a sanity check before being written.

Usage: python scripts/gen_demo_lexicon.py [output_dir]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from signforge.kinematics import forward
from signforge.lexicon import (
    CompileOptions,
    compile_sign,
    load_keepout,
    load_mirror_map,
    parse_sign,
)
from signforge.robot_model import build_chain, parse_urdf

DATA = Path(__file__).resolve().parent.parent / "src" / "signforge" / "data"
KEEPOUT_MARGIN = 0.03  # m clearance beyond the keep-out box

# gloss -> (category, two_handed, mirrored, repetitions, hand_state, n_waypoints, cyclic)
SIGNS = {
    "AMARE": ("verb", True, True, 2, "open", 2, True),
    "ANDARE": ("verb", True, False, 1, "neutral", 2, False),
    "MELA": ("noun", False, False, 1, "closed", 2, False),
    "MANGIARE": ("verb", False, False, 2, "closed", 2, True),
    "FATTO": ("verb", True, True, 1, "open", 2, False),
    "CASA": ("noun", True, True, 1, "open", 2, False),
    "STUDIARE": ("verb", False, False, 1, "neutral", 3, False),
    "IO": ("pronoun", False, False, 1, "neutral", 2, False),
    "ACQUA": ("noun", False, False, 1, "neutral", 2, False),
    "DOCCIA": ("noun", True, True, 1, "open", 2, False),
    "IDEA": ("noun", False, False, 1, "closed", 2, False),
    "SHAMPOO": ("noun", True, True, 2, "open", 2, True),
}

STEP_SECONDS = 0.6


def clear_of_keepout(position, keepout) -> bool:
    grown_min = [m - KEEPOUT_MARGIN for m in keepout.minimum]
    grown_max = [m + KEEPOUT_MARGIN for m in keepout.maximum]
    return not all(a <= p <= b for p, a, b in zip(position, grown_min, grown_max))


def sample_pose(chain, rng, keepout):
    while True:
        q = rng.uniform(chain.lower, chain.upper)
        pose = forward(chain, q)
        if clear_of_keepout(pose.position, keepout):
            return pose


def waypoint_dict(pose, time_s, hand_state):
    return {
        "time": round(time_s, 3),
        "position": [round(float(v), 6) for v in pose.position],
        "orientation": [round(float(v), 9) for v in pose.orientation],
        "weights": [0.1, 0.1, 0.1, 1.0, 1.0, 1.0],
        "hand_state": hand_state,
    }


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else DATA / "demo_lexicon"
    out_dir.mkdir(parents=True, exist_ok=True)

    model = parse_urdf((DATA / "pepper_right_arm.urdf").read_text())
    chain = build_chain(model, "Torso", "RHand")
    keepout = load_keepout((DATA / "keepout.json").read_text())
    mirror_map = load_mirror_map((DATA / "mirror_map.json").read_text())
    options = CompileOptions(strict=True, keepout=keepout)

    for index, (gloss, spec) in enumerate(sorted(SIGNS.items())):
        category, two_handed, mirrored, repetitions, hand_state, n_points, cyclic = spec
        rng = np.random.default_rng(1000 + index)
        distinct = [sample_pose(chain, rng, keepout) for _ in range(n_points)]
        waypoints = [
            waypoint_dict(p, i * STEP_SECONDS, hand_state) for i, p in enumerate(distinct)
        ]
        if cyclic:
            closing = dict(waypoints[0])
            closing["time"] = round(n_points * STEP_SECONDS, 3)
            waypoints.append(closing)
        document = {
            "gloss": gloss,
            "category": category,
            "two_handed": two_handed,
            "mirrored": mirrored,
            "repetitions": repetitions,
            "manual_only": False,
            "waypoints": waypoints,
        }

        sign = parse_sign(document)
        animation, report = compile_sign(sign, chain, mirror_map, options)
        if report.status != "Automated":
            print(f"{gloss}: NOT automated: {report.failure_reasons}", file=sys.stderr)
            return 1
        if report.warnings:
            print(f"{gloss}: warnings: {report.warnings}", file=sys.stderr)

        path = out_dir / f"{gloss}.sign.json"
        path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path.name}: {len(waypoints)} waypoints, "
              f"reps={repetitions}, frames 0..{animation.last_frame}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
