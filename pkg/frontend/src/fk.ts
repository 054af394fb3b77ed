/** Client-side forward kinematics over the /model chain description.
 *
 * Used only to keep drag previews smooth between service round trips; any
 * value that leaves the editor (export, save) comes from the service.
 */

import type { ChainDescription, Mat4, Vec3 } from "./types.js";

export function identity(): Mat4 {
  return [
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
  ];
}

export function matMul(a: Mat4, b: Mat4): Mat4 {
  const out: Mat4 = [[], [], [], []] as unknown as Mat4;
  for (let i = 0; i < 4; i++) {
    const row: number[] = [];
    for (let j = 0; j < 4; j++) {
      let sum = 0;
      for (let k = 0; k < 4; k++) {
        sum += (a[i]![k] ?? 0) * (b[k]![j] ?? 0);
      }
      row.push(sum);
    }
    out[i] = row;
  }
  return out;
}

/** Rotation about a unit axis, embedded in a homogeneous matrix. */
export function axisRotation(axis: Vec3, angle: number): Mat4 {
  const [x, y, z] = axis;
  const c = Math.cos(angle);
  const s = Math.sin(angle);
  const cc = 1 - c;
  return [
    [c + x * x * cc, x * y * cc - z * s, x * z * cc + y * s, 0],
    [y * x * cc + z * s, c + y * y * cc, y * z * cc - x * s, 0],
    [z * x * cc - y * s, z * y * cc + x * s, c + z * z * cc, 0],
    [0, 0, 0, 1],
  ];
}

export function translationOf(m: Mat4): Vec3 {
  return [m[0]![3]!, m[1]![3]!, m[2]![3]!];
}

export interface ArmPose {
  /** World position of each joint origin, base to tip order. */
  joints: Vec3[];
  tip: Vec3;
}

/** Compose the chain's transforms for the given joint angles (radians). */
export function forwardArm(chain: ChainDescription, angles: number[]): ArmPose {
  if (angles.length !== chain.joints.length) {
    throw new Error(
      `expected ${chain.joints.length} angles for ${chain.base}->${chain.tip}, got ${angles.length}`,
    );
  }
  let t = identity();
  const joints: Vec3[] = [];
  chain.joints.forEach((joint, index) => {
    t = matMul(t, joint.pre_transform);
    joints.push(translationOf(t));
    t = matMul(t, axisRotation(joint.axis, angles[index]!));
  });
  t = matMul(t, chain.tip_transform);
  return { joints, tip: translationOf(t) };
}

export function degreesToRadians(value: number): number {
  return (value * Math.PI) / 180;
}

/** Arm pose from sampled per-actuator degree values (as /sample reports them). */
export function armFromSample(chain: ChainDescription, values: Record<string, number>): ArmPose | null {
  const angles: number[] = [];
  for (const joint of chain.joints) {
    const value = values[joint.name];
    if (value === undefined) {
      return null;
    }
    angles.push(degreesToRadians(value));
  }
  return forwardArm(chain, angles);
}
