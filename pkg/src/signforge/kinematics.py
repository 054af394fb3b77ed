"""Forward kinematics, geometric Jacobian, weighted damped-least-squares IK
and right/left mirroring for a serial revolute chain.

Conventions
-----------
* Quaternions are scalar-first (w, x, y, z) and unit-normalized.
* Pose error is a 6-vector [orientation; position]: the orientation part is
  the angle-axis vector of R_target @ R(q)^T, the position part is
  p_target - p(q), both in the base frame.
* Weights follow the same layout: (w_ox, w_oy, w_oz, w_px, w_py, w_pz).
* The Jacobian maps joint rates to [angular; linear] base-frame velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, InvalidOptions, UnmappedJoint
from .robot_model import KinematicChain

_QUAT_UNIT_TOL = 1e-9

HAND_STATES = ("open", "closed", "neutral")


def _freeze(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


def axis_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    c, s = math.cos(angle), math.sin(angle)
    x, y, z = axis
    cc = 1.0 - c
    return np.array(
        [
            [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s],
            [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s],
            [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc],
        ]
    )


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_from_matrix(R: np.ndarray) -> np.ndarray:
    """Unit quaternion (w, x, y, z) of a rotation matrix, w >= 0 canonical."""
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
        )
    elif R[0, 0] >= R[1, 1] and R[0, 0] >= R[2, 2]:
        s = math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2]) * 2.0
        q = np.array(
            [(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s]
        )
    elif R[1, 1] >= R[2, 2]:
        s = math.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2]) * 2.0
        q = np.array(
            [(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s]
        )
    else:
        s = math.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1]) * 2.0
        q = np.array(
            [(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s]
        )
    q = q / np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return q


def rotation_log(R: np.ndarray) -> np.ndarray:
    """Angle-axis 3-vector of a rotation matrix (norm == rotation angle)."""
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    cos_theta = min(1.0, max(-1.0, (tr - 1.0) * 0.5))
    theta = math.acos(cos_theta)
    skew = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    if theta < 1e-10:
        return 0.5 * skew
    if theta > math.pi - 1e-6:
        # sin(theta) ~ 0: recover the axis from the symmetric part.
        d = np.array(
            [
                math.sqrt(max(0.0, (R[0, 0] + 1.0) * 0.5)),
                math.sqrt(max(0.0, (R[1, 1] + 1.0) * 0.5)),
                math.sqrt(max(0.0, (R[2, 2] + 1.0) * 0.5)),
            ]
        )
        k = int(np.argmax(d))
        axis = d.copy()
        if k == 0:
            axis[1] = math.copysign(d[1], R[0, 1] + R[1, 0])
            axis[2] = math.copysign(d[2], R[0, 2] + R[2, 0])
        elif k == 1:
            axis[0] = math.copysign(d[0], R[0, 1] + R[1, 0])
            axis[2] = math.copysign(d[2], R[1, 2] + R[2, 1])
        else:
            axis[0] = math.copysign(d[0], R[0, 2] + R[2, 0])
            axis[1] = math.copysign(d[1], R[1, 2] + R[2, 1])
        n = np.linalg.norm(axis)
        if n == 0.0:
            return np.zeros(3)
        axis = axis / n
        if float(skew @ axis) < 0.0:
            axis = -axis
        return theta * axis
    return (theta / (2.0 * math.sin(theta))) * skew


@dataclass(frozen=True, eq=False)
class Pose:
    """Task-space target: position [m] + unit quaternion, base frame."""

    position: np.ndarray
    orientation: np.ndarray  # (w, x, y, z)

    def __eq__(self, other):
        if not isinstance(other, Pose):
            return NotImplemented
        return np.array_equal(self.position, other.position) and np.array_equal(
            self.orientation, other.orientation
        )

    def __post_init__(self):
        object.__setattr__(self, "position", _freeze(self.position))
        q = np.array(self.orientation, dtype=float)
        if self.position.shape != (3,):
            raise DimensionMismatch("position must be a 3-vector")
        if q.shape != (4,):
            raise DimensionMismatch("orientation must be a quaternion (w, x, y, z)")
        if abs(np.linalg.norm(q) - 1.0) >= _QUAT_UNIT_TOL:
            raise InvalidOptions("orientation quaternion is not unit length")
        object.__setattr__(self, "orientation", _freeze(q))

    @staticmethod
    def identity() -> "Pose":
        return Pose(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))

    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.orientation)


@dataclass(frozen=True, eq=False)
class JointVector:
    """Joint-space configuration with the chain's joint names for labeling."""

    values: np.ndarray
    names: tuple[str, ...]
    clamped: bool = False

    def __eq__(self, other):
        if not isinstance(other, JointVector):
            return NotImplemented
        return (
            self.names == other.names
            and self.clamped == other.clamped
            and np.array_equal(self.values, other.values)
        )

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.values.shape != (len(self.names),):
            raise DimensionMismatch(
                f"{self.values.shape[0]} angles for {len(self.names)} joint names"
            )

    def __len__(self) -> int:
        return len(self.names)

    def as_dict(self) -> dict[str, float]:
        return {n: float(v) for n, v in zip(self.names, self.values)}


@dataclass(frozen=True)
class IkGoal:
    target: Pose
    weights: np.ndarray = field(default_factory=lambda: np.ones(6))
    hand_state: str = "neutral"
    mirror: bool = False
    seed: int = 0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (6,):
            raise InvalidOptions("weights must be a 6-vector (w_ox..w_pz)")
        if np.any(w < 0.0):
            raise InvalidOptions("weights must be nonnegative")
        if not np.any(w > 0.0):
            raise InvalidOptions("at least one weight must be positive")
        object.__setattr__(self, "weights", _freeze(w))
        if self.hand_state not in HAND_STATES:
            raise InvalidOptions(f"hand_state must be one of {HAND_STATES}")
        if self.seed < 0:
            raise InvalidOptions("seed must be nonnegative")


@dataclass(frozen=True)
class IkOptions:
    tol_pos: float = 1e-3  # m
    tol_ori: float = 1e-2  # rad
    max_iterations: int = 300
    max_restarts: int = 16
    initial_lambda: float = 1e-3
    unreachable_factor: float = 100.0
    initial_guess: np.ndarray | None = None  # default: mid-range of limits

    def __post_init__(self):
        if self.tol_pos <= 0.0 or self.tol_ori <= 0.0:
            raise InvalidOptions("tolerances must be positive")
        if self.max_iterations < 1 or self.max_restarts < 0:
            raise InvalidOptions("iteration/restart counts out of range")
        if self.initial_lambda <= 0.0:
            raise InvalidOptions("initial_lambda must be positive")


@dataclass(frozen=True)
class IkSolution:
    q: JointVector
    residual: float  # ||W e||, mixed rad/m units weighted per component
    status: str  # Converged | BestEffort | Unreachable
    iterations: int
    restarts_used: int


@dataclass(frozen=True)
class MirrorMap:
    """Joint-name relabeling with per-joint sign flips."""

    entries: tuple[tuple[str, str, int], ...]  # (source, target, sign)

    def __post_init__(self):
        for src, dst, sign in self.entries:
            if sign not in (1, -1):
                raise InvalidOptions(f"mirror sign for {src!r} must be +1 or -1")

    def source_names(self) -> tuple[str, ...]:
        return tuple(e[0] for e in self.entries)

    def validate_for(self, chain: KinematicChain) -> None:
        sources = self.source_names()
        if sorted(sources) != sorted(set(sources)):
            raise InvalidOptions("mirror map repeats a source joint")
        if set(sources) != set(chain.joint_names):
            raise InvalidOptions("mirror map does not cover the chain's joints exactly")

    @staticmethod
    def from_entries(entries) -> "MirrorMap":
        return MirrorMap(tuple((str(s), str(t), int(g)) for s, t, g in entries))


def _angles(chain: KinematicChain, q) -> np.ndarray:
    values = q.values if isinstance(q, JointVector) else np.asarray(q, dtype=float)
    if values.shape != (chain.n,):
        raise DimensionMismatch(
            f"chain has {chain.n} joints, got {values.shape} angles"
        )
    return values


def forward_matrix(chain: KinematicChain, q) -> np.ndarray:
    """Base->tip homogeneous transform."""
    values = _angles(chain, q)
    T = np.eye(4)
    for joint, angle in zip(chain.joints, values):
        T = T @ joint.pre_transform
        T[:3, :3] = T[:3, :3] @ axis_rotation(joint.axis, angle)
    return T @ chain.tip_transform


def forward(chain: KinematicChain, q) -> Pose:
    T = forward_matrix(chain, q)
    return Pose(T[:3, 3].copy(), quat_from_matrix(T[:3, :3]))


def _sweep(chain: KinematicChain, values: np.ndarray):
    """One pass returning (tip transform, per-joint world origin and axis)."""
    T = np.eye(4)
    origins = np.empty((chain.n, 3))
    axes = np.empty((chain.n, 3))
    for i, (joint, angle) in enumerate(zip(chain.joints, values)):
        T = T @ joint.pre_transform
        origins[i] = T[:3, 3]
        axes[i] = T[:3, :3] @ joint.axis
        T[:3, :3] = T[:3, :3] @ axis_rotation(joint.axis, angle)
    T = T @ chain.tip_transform
    return T, origins, axes


def jacobian(chain: KinematicChain, q) -> np.ndarray:
    """6 x n geometric Jacobian: rows 0-2 angular, rows 3-5 linear."""
    values = _angles(chain, q)
    T, origins, axes = _sweep(chain, values)
    tip = T[:3, 3]
    J = np.empty((6, chain.n))
    J[:3] = axes.T
    J[3:] = np.cross(axes, tip - origins).T
    return J


def _pose_error(target_p: np.ndarray, target_R: np.ndarray, T: np.ndarray) -> np.ndarray:
    e = np.empty(6)
    e[:3] = rotation_log(target_R @ T[:3, :3].T)
    e[3:] = target_p - T[:3, 3]
    return e


def _within_tolerance(e: np.ndarray, w: np.ndarray, options: IkOptions) -> bool:
    ori_ok = np.all(np.abs(e[:3])[w[:3] > 0.0] <= options.tol_ori)
    pos_ok = np.all(np.abs(e[3:])[w[3:] > 0.0] <= options.tol_pos)
    return bool(ori_ok and pos_ok)


def _norm_converged(e: np.ndarray, w: np.ndarray, options: IkOptions) -> bool:
    # Stricter than the component-wise status rule; used only to decide when
    # further restarts cannot be worth their cost.
    ori = np.linalg.norm(e[:3][w[:3] > 0.0])
    pos = np.linalg.norm(e[3:][w[3:] > 0.0])
    return bool(ori <= options.tol_ori and pos <= options.tol_pos)


def _lm_descend(chain, target_p, target_R, w2, q0, lower, upper, options):
    """Levenberg-Marquardt descent from one start; returns (q, e, cost, iters).

    Runs until the weighted cost stops improving (or hits the iteration cap)
    rather than stopping at the tolerance, so the returned point is the local
    floor, not the first tolerable iterate.
    """
    q = np.clip(q0, lower, upper)
    T, _, _ = _sweep(chain, q)
    e = _pose_error(target_p, target_R, T)
    cost = float(e @ (w2 * e))
    lam = options.initial_lambda
    eye = np.eye(chain.n)
    rejects = 0
    iterations = 0
    # Stall means lambda has climbed its whole range without one improvement.
    for _ in range(options.max_iterations):
        if cost == 0.0 or rejects >= 60:
            break
        iterations += 1
        J = jacobian(chain, q)
        Jw = J * w2[:, None]
        H = Jw.T @ J  # J^T W^2 J
        g = Jw.T @ e
        try:
            dq = np.linalg.solve(H + lam * eye, g)
        except np.linalg.LinAlgError:
            lam = min(lam * 2.0, 1e12)
            rejects += 1
            continue
        q_new = np.clip(q + dq, lower, upper)
        T, _, _ = _sweep(chain, q_new)
        e_new = _pose_error(target_p, target_R, T)
        cost_new = float(e_new @ (w2 * e_new))
        if cost_new < cost:
            q, e, cost = q_new, e_new, cost_new
            lam = max(lam * 0.5, 1e-9)
            rejects = 0
        else:
            lam = min(lam * 2.0, 1e12)
            rejects += 1
    return q, e, cost, iterations


def solve_ik(chain: KinematicChain, goal: IkGoal, options: IkOptions | None = None) -> IkSolution:
    """Weighted damped-least-squares IK with joint limits and multistart.

    Restart 0 starts from ``options.initial_guess`` (mid-range of the limits
    by default); later restarts draw uniform in-limit configurations from a
    generator seeded by ``goal.seed``, so identical inputs give identical
    solutions. The best restart wins; restarts stop early once one converges.
    """
    options = options or IkOptions()
    lower, upper = chain.lower, chain.upper
    w = goal.weights
    w2 = w * w
    target_p = goal.target.position
    target_R = goal.target.rotation()

    if options.initial_guess is not None:
        guess = np.asarray(options.initial_guess, dtype=float)
        if guess.shape != (chain.n,):
            raise DimensionMismatch("initial_guess length does not match chain")
    else:
        guess = 0.5 * (lower + upper)

    rng = np.random.default_rng(goal.seed)
    best = None
    restarts_used = 0
    for restart in range(options.max_restarts + 1):
        restarts_used = restart
        start = guess if restart == 0 else rng.uniform(lower, upper)
        q, e, cost, iterations = _lm_descend(
            chain, target_p, target_R, w2, start, lower, upper, options
        )
        if best is None or cost < best[2]:
            best = (q, e, cost, iterations)
        if _norm_converged(best[1], w, options):
            break

    q, e, cost, iterations = best
    if _within_tolerance(e, w, options):
        status = "Converged"
    else:
        pos_mask = w[3:] > 0.0
        pos_err = float(np.linalg.norm(e[3:][pos_mask])) if np.any(pos_mask) else 0.0
        if pos_err > options.unreachable_factor * options.tol_pos:
            status = "Unreachable"
        else:
            status = "BestEffort"

    solution_q = JointVector(q, chain.joint_names, clamped=True)
    return IkSolution(
        q=solution_q,
        residual=float(np.linalg.norm(w * e)),
        status=status,
        iterations=iterations,
        restarts_used=restarts_used,
    )


def mirror(q: JointVector, mirror_map: MirrorMap) -> JointVector:
    """Relabel a joint vector onto the opposite arm with per-joint sign flips."""
    by_source = {src: (dst, sign) for src, dst, sign in mirror_map.entries}
    names = []
    values = []
    for name, value in zip(q.names, q.values):
        if name not in by_source:
            raise UnmappedJoint(name)
        dst, sign = by_source[name]
        names.append(dst)
        values.append(sign * value)
    return JointVector(np.array(values), tuple(names), clamped=q.clamped)


DEFAULT_MIRROR_MAP = MirrorMap(
    (
        ("RShoulderPitch", "LShoulderPitch", 1),
        ("RShoulderRoll", "LShoulderRoll", -1),
        ("RElbowYaw", "LElbowYaw", -1),
        ("RElbowRoll", "LElbowRoll", -1),
        ("RWristYaw", "LWristYaw", -1),
    )
)


def mid_range(chain: KinematicChain) -> np.ndarray:
    return 0.5 * (chain.lower + chain.upper)


def random_in_limit(chain: KinematicChain, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(chain.lower, chain.upper)


def replace_options(options: IkOptions, **kwargs) -> IkOptions:
    return replace(options, **kwargs)
