"""Acceptance suite: one test per release criterion, tolerances pinned.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion.
"""

from __future__ import annotations

import random
import time
import xml.etree.ElementTree as ET

import numpy as np

from signforge.animation import Animation, auto_tangents, sample
from signforge.kinematics import IkGoal, JointVector, forward, jacobian, mirror, solve_ik
from signforge.lexicon import compile_lexicon, compile_sign, parse_sign
from signforge.qanim import emit_qanim, format_number, parse_qanim
from signforge.resources import data_path, data_text
from signforge.sentence import GlossSentence, compose, parse_sentence, rest_values
from signforge.stats import analyze, load_records

from test_kinematics import _finite_difference_jacobian
from test_qanim import GOLDEN, _random_wire_animation


def _pass(line: str) -> None:
    print(f"ACCEPTANCE PASS - {line}")


# 1 -------------------------------------------------------------------------

def test_golden_constant_curve_emission():
    started = time.perf_counter()
    keys = [(0, 90.5273514), (30, 90.5273514), (50, 90.5273514), (80, 90.5273514)]
    animation = Animation(fps=25, curves=(auto_tangents(keys, actuator="LShoulderPitch"),))
    emitted = emit_qanim(animation)

    assert emitted == GOLDEN  # byte-for-byte against the golden reference

    # token stream: element tags and ordered attribute name/value pairs
    def tokens(text):
        out = []
        for el in ET.fromstring(text).iter():
            out.append(el.tag)
            out.extend(f"{k}={v}" for k, v in el.attrib.items())
        return out

    assert tokens(emitted) == tokens(GOLDEN)

    spans = [
        key.attrib["abscissaParam"]
        for key in ET.fromstring(emitted).iter("Tangent")
    ]
    assert spans == ["10", "-10", "6.6666667", "-6.6666667", "6.6666667", "-6.6666667"]
    assert {t.attrib["ordinateParam"] for t in ET.fromstring(emitted).iter("Tangent")} == {"0"}
    assert format_number(20 / 3) == "6.6666667"

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _pass(f"golden constant-curve emission, byte and token exact ({elapsed:.3f}s)")


# 2 -------------------------------------------------------------------------

def test_qanim_round_trip_and_byte_stability():
    started = time.perf_counter()
    rng = random.Random(31415)
    for _ in range(100):
        animation = _random_wire_animation(rng)
        text = emit_qanim(animation)
        assert parse_qanim(text) == animation
        assert emit_qanim(animation) == text  # byte-stable across runs
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    _pass(f"100 randomized animations round-trip structurally, emission byte-stable ({elapsed:.2f}s)")


# 3 -------------------------------------------------------------------------

def test_jacobian_against_finite_differences(chain):
    started = time.perf_counter()
    rng = np.random.default_rng(271828)
    worst = 0.0
    for _ in range(100):
        q = rng.uniform(chain.lower, chain.upper)
        J = jacobian(chain, q)
        Jfd = _finite_difference_jacobian(chain, q)
        scale = max(1.0, float(np.abs(J).max()))
        worst = max(worst, float(np.abs(J - Jfd).max()) / scale)
    elapsed = time.perf_counter() - started
    assert worst < 1e-5
    assert elapsed < 5.0
    _pass(f"jacobian vs central differences on 100 configurations, max rel err {worst:.2e} ({elapsed:.2f}s)")


# 4 -------------------------------------------------------------------------

def test_ik_round_trip_rate_and_speed(chain):
    rng = np.random.default_rng(161803)
    weights = np.array([0.1, 0.1, 0.1, 1.0, 1.0, 1.0])
    targets = [forward(chain, rng.uniform(chain.lower, chain.upper)) for _ in range(100)]

    started = time.perf_counter()
    solutions = [
        solve_ik(chain, IkGoal(target=target, weights=weights, seed=i))
        for i, target in enumerate(targets)
    ]
    elapsed = time.perf_counter() - started

    converged = 0
    for target, solution in zip(targets, solutions):
        if solution.status != "Converged":
            continue
        error = float(np.linalg.norm(forward(chain, solution.q).position - target.position))
        assert error <= 1e-3
        converged += 1
    mean_ms = elapsed / 100 * 1000.0
    assert converged >= 95
    assert mean_ms < 50.0
    _pass(f"IK round trip: {converged}/100 converged <= 1 mm, mean {mean_ms:.1f} ms/solve")


# 5 -------------------------------------------------------------------------

def test_mirror_reflection_on_two_arm_fixture(right_chain_two_arm, left_chain, mirror_map):
    rng = np.random.default_rng(577215)
    worst = 0.0
    for _ in range(100):
        q = rng.uniform(right_chain_two_arm.lower, right_chain_two_arm.upper)
        right_pose = forward(right_chain_two_arm, q)
        mirrored = mirror(JointVector(q, right_chain_two_arm.joint_names), mirror_map)
        left_pose = forward(left_chain, mirrored.values)
        expected = right_pose.position * np.array([1.0, -1.0, 1.0])
        worst = max(worst, float(np.max(np.abs(left_pose.position - expected))))
    assert worst <= 1e-9
    _pass(f"mirror reflection on 100 configurations, worst deviation {worst:.2e} m")


# 6 -------------------------------------------------------------------------

def test_stats_audit_of_bundled_counts():
    started = time.perf_counter()
    rows = analyze(load_records(data_text("table1.csv")), p0=0.25)
    by_sign = {row.sign: row for row in rows}

    below_bound = [
        "Dimenticare (To forget)",
        "Finire/Fatto (Done)",
        "Shampoo",
        "Università (University)",
        "Che/Come? (What/How?)",
        "Idea",
    ]
    for sign in below_bound:
        row = by_sign[sign]
        assert row.computed_p < 1e-4
        assert row.mismatch is False

    assert by_sign["Profumo (Perfume)"].computed_p == 1.0  # exactly
    assert by_sign["Profumo (Perfume)"].mismatch is False

    for row in rows:
        if row.reported_p is not None:
            assert row.mismatch == (abs(row.computed_p - row.reported_p) > 0.005)
    flagged = sorted(r.sign for r in rows if r.mismatch)
    assert flagged == [
        "Acqua (Water)",
        "Antipatico (Unpleasant)",
        "Capriccioso (Capricious)",
        "Chiedere (To ask)",
        "Insegnare (To teach)",
        "Libro (Book)",
        "Spaventarsi (To get scared)",
    ]

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _pass(f"stats audit: 15 rows, {len(flagged)} mismatches flagged, bounds honoured ({elapsed:.3f}s)")


# 7 -------------------------------------------------------------------------

def test_demo_sentences_compose_correctly(chain, mirror_map, demo_lexicon_dir, sentences_dir):
    compiled = {}
    for path in sorted(demo_lexicon_dir.glob("*.sign.json")):
        sign = parse_sign(path.read_text(encoding="utf-8"))
        animation, report = compile_sign(sign, chain, mirror_map)
        assert report.status == "Automated"
        compiled[sign.gloss] = animation
    rest = rest_values(chain, mirror_map)

    started = time.perf_counter()  # composition itself is the timed part
    for name in ("MELA-MANGIARE-FATTO", "CASA-STUDIARE-ANDARE"):
        sentence = parse_sentence((sentences_dir / f"{name}.sentence.json").read_text())
        composed = compose(sentence, compiled, rest)

        durations = sum(compiled[g].last_frame for g in sentence.glosses)
        lead = sentence.lead_in_frames
        transition = sentence.transition_frames
        assert composed.last_frame == 2 * lead + durations + 2 * transition

        cursor = lead
        for gloss in sentence.glosses:
            standalone = compiled[gloss]
            span = standalone.last_frame
            # seam continuity at both segment edges
            for seam in (cursor, cursor + span):
                before = sample(composed, seam - 1e-7)
                after = sample(composed, seam + 1e-7)
                for actuator, value in before.items():
                    assert abs(after[actuator] - value) < 1e-5
            # per-segment equality with the standalone sign
            for step in range(0, 2 * span + 1):
                frame = step / 2.0
                standalone_values = sample(standalone, frame)
                composed_values = sample(composed, cursor + frame)
                for actuator, value in standalone_values.items():
                    assert abs(composed_values[actuator] - value) <= 1e-9
            cursor += span + transition

    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _pass(f"both demo sentences: duration formula, seam continuity, segment equality ({elapsed:.2f}s)")


# 8 -------------------------------------------------------------------------

def test_batch_build_is_fast_and_deterministic(tmp_path, chain, mirror_map, demo_lexicon_dir):
    out_first = tmp_path / "one"
    out_second = tmp_path / "two"

    started = time.perf_counter()
    first = compile_lexicon(demo_lexicon_dir, chain, mirror_map, output_dir=out_first)
    elapsed = time.perf_counter() - started
    second = compile_lexicon(demo_lexicon_dir, chain, mirror_map, output_dir=out_second)

    assert first.counts["Automated"] >= 10
    assert first.counts["Failed"] == 0
    assert elapsed < 10.0

    names = sorted(p.name for p in out_first.glob("*.qanim"))
    assert names == sorted(p.name for p in out_second.glob("*.qanim"))
    for name in names:
        assert (out_first / name).read_bytes() == (out_second / name).read_bytes()
    _pass(f"lexicon build: {len(names)} signs in {elapsed:.2f}s, byte-identical across runs")
