"""Command-line frontend.

Exit codes: 0 success, 1 validation/compile/solve failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .animation import sample
from .config import DEFAULT_PORT, build_toolchain, load_config
from .errors import SignforgeError
from .kinematics import IkGoal, JointVector, Pose, mirror
from .lexicon import compile_lexicon, compile_sign, parse_sign, validate_sign
from .qanim import parse_qanim, write_qanim
from .sentence import compose, parse_sentence, rest_values
from .stats import analyze, format_report, load_records

_CONFIG_KEYS = (
    "urdf",
    "base_link",
    "tip_link",
    "mirror_map",
    "keepout",
    "hand_map",
    "fps",
    "tol_pos",
    "tol_ori",
    "max_iterations",
    "max_restarts",
    "lexicon_dir",
    "port",
)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("configuration")
    group.add_argument("--config", help="signforge.toml-style config file")
    group.add_argument("--urdf", help="robot description file")
    group.add_argument("--base-link", dest="base_link")
    group.add_argument("--tip-link", dest="tip_link")
    group.add_argument("--mirror-map", dest="mirror_map")
    group.add_argument("--keepout")
    group.add_argument("--hand-map", dest="hand_map")
    group.add_argument("--fps", type=int)
    group.add_argument("--tol-pos", dest="tol_pos", type=float)
    group.add_argument("--tol-ori", dest="tol_ori", type=float)
    group.add_argument("--max-iterations", dest="max_iterations", type=int)
    group.add_argument("--max-restarts", dest="max_restarts", type=int)
    group.add_argument("--strict", action="store_const", const=True, default=None)
    return common


def _toolchain(args):
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    if getattr(args, "strict", None):
        overrides["strict"] = True
    config = load_config(args.config, overrides)
    return build_toolchain(config)


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="signforge",
        description="Compile sign definitions into robot keyframe animations.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="one IK query, joint values on stdout")
    p.add_argument("--position", nargs=3, type=float, required=True, metavar=("X", "Y", "Z"))
    p.add_argument("--orientation", nargs=4, type=float, default=[1.0, 0.0, 0.0, 0.0],
                   metavar=("W", "X", "Y", "Z"))
    p.add_argument("--weights", nargs=6, type=float,
                   default=[0.1, 0.1, 0.1, 1.0, 1.0, 1.0])
    p.add_argument("--hand-state", dest="hand_state", default="neutral",
                   choices=("open", "closed", "neutral"))
    p.add_argument("--mirror", action="store_true")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("compile", parents=[common], help="compile one sign file to .qanim")
    p.add_argument("sign_file")
    p.add_argument("-o", "--output", help="output file or directory (default: <GLOSS>.qanim)")

    p = sub.add_parser("build", parents=[common], help="compile a lexicon directory")
    p.add_argument("lexicon")
    p.add_argument("-o", "--output", default="build", help="output directory (default: build/)")
    p.add_argument("--figure", help="render the build summary chart to this PNG")

    p = sub.add_parser("sentence", parents=[common], help="compose a sentence file to .qanim")
    p.add_argument("sentence_file")
    p.add_argument("--lexicon", help="lexicon directory (default: bundled demo)")
    p.add_argument("-o", "--output", help="output .qanim path")

    p = sub.add_parser("preview", help="sample a .qanim to a per-frame CSV trace")
    p.add_argument("qanim")
    p.add_argument("--fps", dest="sample_fps", type=int,
                   help="resample rate (default: the animation's own fps)")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.add_argument("--figure", help="render the sampled curves to this PNG")

    p = sub.add_parser("validate", parents=[common], help="static checks for one sign file")
    p.add_argument("sign_file")

    p = sub.add_parser("stats",
                       help="exact binomial recognition analysis of a counts CSV")
    p.add_argument("csv_file")
    p.add_argument("--p0", type=float, default=0.25, help="chance level (default 0.25)")
    p.add_argument("--format", dest="fmt", choices=("table", "csv"), default="table")
    p.add_argument("--figure", help="render the rate chart to this PNG")

    p = sub.add_parser("serve", parents=[common], help="run the local authoring service")
    p.add_argument("--port", type=int, default=None, help=f"default {DEFAULT_PORT}")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--lexicon", help="lexicon directory to persist signs in")
    p.add_argument("--ui", help="directory with a built UI bundle to serve at /")

    return parser


# --- subcommand bodies -------------------------------------------------------


def _cmd_solve(args) -> int:
    tool = _toolchain(args)
    goal = IkGoal(
        target=Pose(np.array(args.position), np.array(args.orientation)),
        weights=np.array(args.weights),
        hand_state=args.hand_state,
        mirror=args.mirror,
        seed=args.seed,
    )
    from .kinematics import solve_ik

    solution = solve_ik(tool.chain, goal, tool.ik_options)
    for name, value in solution.q.as_dict().items():
        print(f"{name} {value:.9f} rad ({math.degrees(value):.4f} deg)")
    if args.mirror:
        mirrored = mirror(solution.q, tool.mirror_map)
        for name, value in mirrored.as_dict().items():
            print(f"{name} {value:.9f} rad ({math.degrees(value):.4f} deg)")
    print(
        f"status={solution.status} residual={solution.residual:.6g} "
        f"iterations={solution.iterations} restarts={solution.restarts_used}"
    )
    return 0 if solution.status != "Unreachable" else 1


def _print_report(report) -> None:
    print(f"{report.gloss}: {report.status}")
    for i, status in enumerate(report.waypoint_status):
        print(f"  waypoint {i}: {status}")
    for reason in report.failure_reasons:
        print(f"  reason: {reason}")
    for warning in report.warnings:
        print(f"  warning: {warning}")


def _cmd_compile(args) -> int:
    tool = _toolchain(args)
    sign = parse_sign(Path(args.sign_file).read_text(encoding="utf-8"))
    animation, report = compile_sign(sign, tool.chain, tool.mirror_map, tool.compile_options)
    _print_report(report)
    if animation is None:
        return 1
    out = Path(args.output) if args.output else Path(f"{sign.gloss}.qanim")
    if out.is_dir():
        out = out / f"{sign.gloss}.qanim"
    write_qanim(out, animation)
    print(f"wrote {out}")
    return 0


def _cmd_build(args) -> int:
    tool = _toolchain(args)
    out_dir = Path(args.output)
    report = compile_lexicon(
        args.lexicon, tool.chain, tool.mirror_map, tool.compile_options, output_dir=out_dir
    )
    rows = io.StringIO()
    writer = csv.writer(rows, lineterminator="\n")
    writer.writerow(["gloss", "status", "reasons", "warnings"])
    for entry in report.reports:
        writer.writerow(
            [entry.gloss, entry.status, "; ".join(entry.failure_reasons),
             "; ".join(entry.warnings)]
        )
    (out_dir / "build_report.csv").write_text(rows.getvalue(), encoding="utf-8")

    counts = report.counts
    for entry in report.reports:
        print(f"{entry.gloss}: {entry.status}")
    for problem in report.errors:
        print(f"error: {problem}", file=sys.stderr)
    print(
        f"built {counts['Automated']} automated, {counts['Failed']} failed, "
        f"{counts['Skipped']} skipped -> {out_dir}"
    )
    if args.figure:
        from .figures import build_figure

        build_figure(report, args.figure)
        print(f"wrote {args.figure}")
    return 0 if counts["Failed"] == 0 and not report.errors else 1


def _cmd_sentence(args) -> int:
    tool = _toolchain(args)
    sentence = parse_sentence(Path(args.sentence_file).read_text(encoding="utf-8"))
    lexicon_dir = Path(args.lexicon) if args.lexicon else tool.lexicon_dir

    compiled = {}
    for gloss in sentence.glosses:
        path = lexicon_dir / f"{gloss}.sign.json"
        if not path.exists():
            print(f"unknown gloss {gloss!r}: {path} not found", file=sys.stderr)
            return 1
        sign = parse_sign(path.read_text(encoding="utf-8"))
        animation, report = compile_sign(sign, tool.chain, tool.mirror_map, tool.compile_options)
        if animation is None:
            _print_report(report)
            return 1
        compiled[gloss] = animation

    rest = rest_values(tool.chain, tool.mirror_map, tool.hand)
    animation = compose(sentence, compiled, rest)
    out = Path(args.output) if args.output else Path(Path(args.sentence_file).stem).with_suffix(".qanim")
    write_qanim(out, animation)
    print(f"wrote {out} ({animation.last_frame + 1} frames at {animation.fps} fps)")
    return 0


def _cmd_preview(args) -> int:
    animation = parse_qanim(Path(args.qanim).read_text(encoding="utf-8"))
    native = animation.fps
    rate = args.sample_fps or native
    last = animation.last_frame
    count = int(math.floor(last / native * rate)) + 1 if rate != native else last + 1

    actuators = [c.actuator for c in animation.curves]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["frame", *actuators])
    for k in range(count):
        frame = k if rate == native else k * native / rate
        values = sample(animation, float(frame))
        writer.writerow([f"{frame:g}", *[f"{values[a]:.6f}" for a in actuators]])
    text = out.getvalue()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output} ({count} rows)")
    else:
        sys.stdout.write(text)
    if args.figure:
        from .figures import curves_figure

        curves_figure(animation, args.figure)
        print(f"wrote {args.figure}", file=sys.stderr)
    return 0


def _cmd_validate(args) -> int:
    tool = _toolchain(args)
    sign = parse_sign(Path(args.sign_file).read_text(encoding="utf-8"))
    diagnostics = validate_sign(sign, tool.chain, tool.keepout)
    for diag in diagnostics:
        print(f"{diag.kind}: {diag.message}")
    if diagnostics:
        return 1
    print(f"{sign.gloss}: ok ({len(sign.waypoints)} waypoints)")
    return 0


def _cmd_stats(args) -> int:
    records = load_records(Path(args.csv_file).read_text(encoding="utf-8"))
    rows = analyze(records, p0=args.p0)
    sys.stdout.write(format_report(rows, args.fmt))
    if args.figure:
        from .figures import recognition_figure

        recognition_figure(rows, args.figure, p0=args.p0)
        print(f"wrote {args.figure}", file=sys.stderr)
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, run_service

    tool = _toolchain(args)
    port = args.port if args.port is not None else tool.config.port
    lexicon_dir = Path(args.lexicon) if args.lexicon else tool.lexicon_dir
    service_config = ServiceConfig(
        toolchain=tool,
        lexicon_dir=lexicon_dir,
        ui_dir=Path(args.ui) if args.ui else None,
    )
    run_service(service_config, host=args.host, port=port)
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "compile": _cmd_compile,
    "build": _cmd_build,
    "sentence": _cmd_sentence,
    "preview": _cmd_preview,
    "validate": _cmd_validate,
    "stats": _cmd_stats,
    "serve": _cmd_serve,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SignforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
