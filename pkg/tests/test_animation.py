from __future__ import annotations

import random

import pytest

from signforge.animation import (
    ActuatorCurve,
    Animation,
    Key,
    Tangent,
    auto_tangents,
    sample,
    sample_curve,
)
from signforge.errors import (
    EmptyAnimation,
    EmptyKeys,
    InvariantViolation,
    NonMonotoneFrames,
)

CONSTANT_KEYS = [(0, 90.5273514), (30, 90.5273514), (50, 90.5273514), (80, 90.5273514)]


def _tangent_table(curve: ActuatorCurve):
    rows = []
    for key in curve.keys:
        rows.append(
            (
                key.frame,
                key.left.abscissa if key.left else None,
                key.left.ordinate if key.left else None,
                key.right.abscissa if key.right else None,
                key.right.ordinate if key.right else None,
            )
        )
    return rows


def test_constant_curve_tangent_spans_match_editor_reference():
    curve = auto_tangents(CONSTANT_KEYS, actuator="LShoulderPitch")
    table = _tangent_table(curve)
    third = 20.0 / 3.0
    assert table == [
        (0, None, None, 10.0, 0.0),
        (30, -10.0, 0.0, third, 0.0),
        (50, -third, 0.0, third, 0.0),
        (80, -third, 0.0, None, None),
    ]


def test_single_key_curve_has_no_tangents():
    curve = auto_tangents([(0, 12.5)])
    assert len(curve.keys) == 1
    assert curve.keys[0].left is None and curve.keys[0].right is None
    assert sample_curve(curve, 0.0) == 12.5


def test_local_extremum_keeps_flat_tangents():
    curve = auto_tangents([(0, 0.0), (30, 30.0), (60, 0.0)])
    for key in curve.keys:
        for tangent in (key.left, key.right):
            if tangent is not None:
                assert tangent.ordinate == 0.0


def test_monotone_interior_key_gets_catmull_rom_slope():
    curve = auto_tangents([(0, 0.0), (10, 10.0), (20, 40.0)])
    middle = curve.keys[1]
    slope = (40.0 - 0.0) / (20.0 - 0.0)
    assert middle.right.ordinate == pytest.approx(slope * middle.right.abscissa)
    assert middle.left.ordinate == pytest.approx(slope * middle.left.abscissa)


def test_auto_tangents_idempotent_on_own_output():
    rng = random.Random(99)
    for _ in range(50):
        frames = sorted(rng.sample(range(0, 300), rng.randint(2, 8)))
        keys = [(f, rng.uniform(-90, 90)) for f in frames]
        first = auto_tangents(keys, actuator="a")
        again = auto_tangents([(k.frame, k.value) for k in first.keys], actuator="a")
        assert again == first


def test_errors_on_bad_keys():
    with pytest.raises(EmptyKeys):
        auto_tangents([])
    with pytest.raises(NonMonotoneFrames):
        auto_tangents([(0, 1.0), (0, 2.0)])
    with pytest.raises(NonMonotoneFrames):
        auto_tangents([(10, 1.0), (5, 2.0)])


def test_sampling_at_keys_is_exact():
    rng = random.Random(5)
    frames = sorted(rng.sample(range(0, 200), 6))
    keys = [(f, rng.uniform(-50, 50)) for f in frames]
    curve = auto_tangents(keys, actuator="a")
    for frame, value in keys:
        assert sample_curve(curve, float(frame)) == value


def test_constant_curve_samples_constant():
    animation = Animation(fps=25, curves=(auto_tangents(CONSTANT_KEYS, actuator="a"),))
    for frame in range(0, 81):
        assert sample(animation, float(frame))["a"] == pytest.approx(90.5273514, abs=1e-9)


def test_two_key_curve_midpoint_is_halfway():
    curve = auto_tangents([(0, 0.0), (30, 30.0)], actuator="a")
    assert sample_curve(curve, 15.0) == pytest.approx(15.0, abs=1e-6)


def test_sampling_clamps_to_key_span():
    curve = auto_tangents([(10, 5.0), (20, 9.0)], actuator="a")
    assert sample_curve(curve, 0.0) == 5.0
    assert sample_curve(curve, 99.0) == 9.0


def test_sampled_x_inversion_is_monotone():
    curve = auto_tangents([(0, 0.0), (7, 11.0), (40, -3.0), (45, 8.0)], actuator="a")
    values = [sample_curve(curve, f / 4.0) for f in range(0, 181)]
    # inverting x(t) must give one value per frame; resampling twice agrees
    again = [sample_curve(curve, f / 4.0) for f in range(0, 181)]
    assert values == again


def test_constant_curve_never_overshoots():
    curve = auto_tangents(CONSTANT_KEYS, actuator="a")
    lo = hi = 90.5273514
    for i in range(0, 801):
        v = sample_curve(curve, i / 10.0)
        assert lo - 1e-9 <= v <= hi + 1e-9


def test_flat_segment_stays_within_endpoints():
    curve = auto_tangents([(0, 10.0), (20, 10.0), (40, 30.0)], actuator="a")
    for i in range(0, 201):
        v = sample_curve(curve, i / 10.0)
        assert 10.0 - 1e-9 <= v  # first segment flat, second eases upward


def test_curve_invariants_enforced():
    with pytest.raises(InvariantViolation):
        Tangent("left", +1.0, 0.0)
    with pytest.raises(InvariantViolation):
        Tangent("right", -1.0, 0.0)
    with pytest.raises(InvariantViolation):
        # first key of a multi-key curve must not carry a left tangent
        ActuatorCurve(
            "a",
            (
                Key(0, 1.0, left=Tangent("left", -1.0, 0.0), right=Tangent("right", 1.0, 0.0)),
                Key(10, 2.0, left=Tangent("left", -1.0, 0.0)),
            ),
        )
    with pytest.raises(InvariantViolation):
        # tangent reaching past the neighbour key
        ActuatorCurve(
            "a",
            (
                Key(0, 1.0, right=Tangent("right", 20.0, 0.0)),
                Key(10, 2.0, left=Tangent("left", -1.0, 0.0)),
            ),
        )


def test_animation_invariants():
    curve = auto_tangents([(0, 1.0)], actuator="a")
    with pytest.raises(InvariantViolation):
        Animation(fps=0, curves=(curve,))
    with pytest.raises(InvariantViolation):
        Animation(fps=25, curves=(curve, curve))
    with pytest.raises(EmptyAnimation):
        sample(Animation(fps=25), 0.0)
