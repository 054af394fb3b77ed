from __future__ import annotations

import math
import re

import numpy as np
import pytest

from signforge.errors import DimensionMismatch, InvalidOptions, UnmappedJoint
from signforge.kinematics import (
    IkGoal,
    IkOptions,
    JointVector,
    MirrorMap,
    Pose,
    forward,
    forward_matrix,
    jacobian,
    mirror,
    solve_ik,
)
from signforge.resources import data_text
from signforge.robot_model import build_chain, parse_urdf

SINGLE_Z = """
<robot name="one">
  <link name="base"/><link name="arm"/><link name="tip"/>
  <joint name="spin" type="revolute">
    <parent link="base"/><child link="arm"/>
    <axis xyz="0 0 1"/><limit lower="-3.0" upper="3.0"/>
  </joint>
  <joint name="end" type="fixed">
    <parent link="arm"/><child link="tip"/>
    <origin xyz="0.1 0 0"/>
  </joint>
</robot>
"""


@pytest.fixture(scope="module")
def single_joint_chain():
    return build_chain(parse_urdf(SINGLE_Z), "base", "tip")


def test_single_joint_at_zero(single_joint_chain):
    pose = forward(single_joint_chain, [0.0])
    assert np.allclose(pose.position, [0.1, 0.0, 0.0], atol=1e-15)


def test_single_joint_quarter_turn(single_joint_chain):
    pose = forward(single_joint_chain, [math.pi / 2])
    assert np.allclose(pose.position, [0.0, 0.1, 0.0], atol=1e-12)


def test_zeros_position_is_sum_of_origin_translations(chain):
    # Independent oracle: read the translations straight out of the document.
    text = data_text("pepper_right_arm.urdf")
    triplets = [
        tuple(float(v) for v in m.group(1).split())
        for m in re.finditer(r'<origin xyz="([^"]+)"', text)
    ]
    expected = np.sum(np.array(triplets), axis=0)
    pose = forward(chain, np.zeros(chain.n))
    assert np.allclose(pose.position, expected, atol=1e-15)


def test_forward_is_deterministic(chain):
    q = np.array([0.3, -0.7, 0.9, 1.1, -0.2])
    first = forward(chain, q)
    second = forward(chain, q)
    assert first == second  # bit-identical fields


def test_forward_rejects_wrong_length(chain):
    with pytest.raises(DimensionMismatch):
        forward(chain, np.zeros(chain.n + 1))


def test_jacobian_single_joint_column(single_joint_chain):
    J = jacobian(single_joint_chain, [0.0])
    assert J.shape == (6, 1)
    assert np.allclose(J[:, 0], [0.0, 0.0, 1.0, 0.0, 0.1, 0.0], atol=1e-15)


def test_jacobian_shape(chain):
    assert jacobian(chain, np.zeros(chain.n)).shape == (6, chain.n)


def _finite_difference_jacobian(chain, q, step=1e-6):
    J = np.zeros((6, chain.n))
    T0 = forward_matrix(chain, q)
    for j in range(chain.n):
        plus, minus = q.copy(), q.copy()
        plus[j] += step
        minus[j] -= step
        Tp, Tm = forward_matrix(chain, plus), forward_matrix(chain, minus)
        J[3:, j] = (Tp[:3, 3] - Tm[:3, 3]) / (2 * step)
        dR = (Tp[:3, :3] - Tm[:3, :3]) / (2 * step)
        W = dR @ T0[:3, :3].T
        J[:3, j] = 0.5 * np.array([W[2, 1] - W[1, 2], W[0, 2] - W[2, 0], W[1, 0] - W[0, 1]])
    return J


def test_jacobian_matches_finite_differences(chain):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(100):
        q = rng.uniform(chain.lower, chain.upper)
        J = jacobian(chain, q)
        Jfd = _finite_difference_jacobian(chain, q)
        scale = max(1.0, float(np.abs(J).max()))
        worst = max(worst, float(np.abs(J - Jfd).max()) / scale)
    assert worst < 1e-5


def test_solve_at_start_converges_immediately(chain):
    guess = 0.5 * (chain.lower + chain.upper)
    target = forward(chain, guess)
    solution = solve_ik(chain, IkGoal(target=target, weights=np.ones(6)))
    assert solution.status == "Converged"
    assert solution.residual < 1e-9
    assert solution.iterations <= 1


def test_fk_round_trip_reaches_millimetre_accuracy(chain):
    rng = np.random.default_rng(3)
    weights = np.array([0.1, 0.1, 0.1, 1.0, 1.0, 1.0])
    converged = 0
    for i in range(30):
        target = forward(chain, rng.uniform(chain.lower, chain.upper))
        solution = solve_ik(chain, IkGoal(target=target, weights=weights, seed=i))
        if solution.status != "Converged":
            continue
        error = np.linalg.norm(forward(chain, solution.q).position - target.position)
        assert error <= 1e-3
        converged += 1
    assert converged >= 29  # >= 95%


def test_far_target_is_unreachable(chain):
    goal = IkGoal(target=Pose(np.array([10.0, 0.0, 0.0]), np.array([1.0, 0, 0, 0])))
    assert solve_ik(chain, goal).status == "Unreachable"


def test_solutions_respect_joint_limits(chain):
    rng = np.random.default_rng(5)
    for i in range(20):
        target = forward(chain, rng.uniform(chain.lower, chain.upper))
        solution = solve_ik(chain, IkGoal(target=target, seed=i))
        q = solution.q.values
        assert np.all(q >= chain.lower - 1e-9)
        assert np.all(q <= chain.upper + 1e-9)


def test_identical_inputs_give_identical_solutions(chain):
    target = forward(chain, np.array([0.4, -0.9, 0.3, 0.8, 0.1]))
    goal = IkGoal(target=target, weights=np.array([0.1, 0.1, 0.1, 1, 1, 1]), seed=7)
    options = IkOptions()
    first = solve_ik(chain, goal, options)
    second = solve_ik(chain, goal, options)
    assert first == second


def test_zeroing_an_orientation_weight_never_raises_positional_error(chain):
    rng = np.random.default_rng(17)
    for i in range(15):
        target = forward(chain, rng.uniform(chain.lower, chain.upper))
        full = solve_ik(chain, IkGoal(target=target, weights=np.array([0.1, 0.1, 0.1, 1, 1, 1]), seed=i))
        zeroed = solve_ik(chain, IkGoal(target=target, weights=np.array([0.0, 0.1, 0.1, 1, 1, 1]), seed=i))
        err_full = np.linalg.norm(forward(chain, full.q).position - target.position)
        err_zeroed = np.linalg.norm(forward(chain, zeroed.q).position - target.position)
        # allow the solver's numerical noise floor
        assert err_zeroed <= max(err_full, 1e-9)


def test_invalid_options_rejected(chain):
    with pytest.raises(InvalidOptions):
        IkOptions(tol_pos=0.0)
    with pytest.raises(InvalidOptions):
        IkGoal(target=Pose.identity(), weights=np.zeros(6))
    with pytest.raises(InvalidOptions):
        IkGoal(target=Pose.identity(), weights=-np.ones(6))


def test_mirror_zeros_is_fixed_point(chain, mirror_map):
    q = JointVector(np.zeros(chain.n), chain.joint_names)
    mirrored = mirror(q, mirror_map)
    assert np.array_equal(mirrored.values, np.zeros(chain.n))
    assert mirrored.names[0] == "LShoulderPitch"


def test_mirror_flips_shoulder_roll_sign(chain, mirror_map):
    q = JointVector(np.array([0.0, -0.35, 0.0, 0.5, 0.0]), chain.joint_names)
    mirrored = mirror(q, mirror_map)
    assert mirrored.as_dict()["LShoulderRoll"] == pytest.approx(0.35)


def test_mirror_missing_joint_errors(chain):
    partial = MirrorMap.from_entries([("RShoulderPitch", "LShoulderPitch", 1)])
    q = JointVector(np.zeros(chain.n), chain.joint_names)
    with pytest.raises(UnmappedJoint):
        mirror(q, partial)


def test_mirror_map_validation(chain, mirror_map):
    mirror_map.validate_for(chain)
    with pytest.raises(InvalidOptions):
        MirrorMap.from_entries([("RShoulderPitch", "LShoulderPitch", 1)]).validate_for(chain)


def test_mirrored_pose_reflects_across_sagittal_plane(right_chain_two_arm, left_chain, mirror_map):
    rng = np.random.default_rng(23)
    for _ in range(100):
        q = rng.uniform(right_chain_two_arm.lower, right_chain_two_arm.upper)
        right_pose = forward(right_chain_two_arm, q)
        mirrored = mirror(JointVector(q, right_chain_two_arm.joint_names), mirror_map)
        left_pose = forward(left_chain, mirrored.values)
        expected = right_pose.position * np.array([1.0, -1.0, 1.0])
        assert np.max(np.abs(left_pose.position - expected)) <= 1e-9
