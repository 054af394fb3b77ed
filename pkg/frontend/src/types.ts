/** DTOs mirroring the authoring service's JSON payloads. */

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number]; // w, x, y, z
export type Mat4 = number[][];

export interface JointDescription {
  name: string;
  axis: Vec3;
  pre_transform: Mat4;
  lower: number;
  upper: number;
}

export interface ChainDescription {
  base: string;
  tip: string;
  joints: JointDescription[];
  tip_transform: Mat4;
}

export interface MirrorEntry {
  source: string;
  target: string;
  sign: 1 | -1;
}

export interface ModelDescription {
  arms: { right: ChainDescription; left: ChainDescription | null };
  mirror: MirrorEntry[];
  keepout: { min: Vec3; max: Vec3 };
  hand: { right_actuator: string; left_actuator: string };
  fps: number;
}

export type HandState = "open" | "closed" | "neutral";

export interface WaypointDoc {
  time: number;
  position: Vec3;
  orientation: Quat;
  weights: [number, number, number, number, number, number];
  hand_state: HandState;
}

export interface SignDoc {
  gloss: string;
  category: string;
  two_handed: boolean;
  mirrored: boolean;
  repetitions: number;
  manual_only: boolean;
  waypoints: WaypointDoc[];
}

export interface IkResult {
  joints: { names: string[]; values: number[] };
  residual: number;
  status: "Converged" | "BestEffort" | "Unreachable";
  iterations: number;
  restarts_used: number;
  mirrored_joints?: { names: string[]; values: number[] };
}

export interface TangentPayload {
  abscissa: number;
  ordinate: number;
}

export interface KeyPayload {
  frame: number;
  value: number;
  left: TangentPayload | null;
  right: TangentPayload | null;
}

export interface CurvePayload {
  actuator: string;
  unit: string;
  mute: boolean;
  keys: KeyPayload[];
}

export interface AnimationPayload {
  fps: number;
  curves: CurvePayload[];
}

export interface CompileReportPayload {
  gloss: string;
  status: "Automated" | "Failed" | "Skipped";
  waypoint_status: string[];
  failure_reasons: string[];
  warnings: string[];
}

export interface CompileResponse {
  animation: AnimationPayload;
  report: CompileReportPayload;
  diagnostics: { kind: string; waypoint: number; message: string }[];
}

export interface PosePayload {
  position: Vec3;
  orientation: Quat;
}

export interface SampleFrame {
  frame: number;
  values: Record<string, number>;
  tips: { right?: PosePayload; left?: PosePayload };
}

export interface SampleResponse {
  fps: number;
  frames: SampleFrame[];
}

export interface ServiceError {
  code: string;
  message: string;
  report?: CompileReportPayload;
}
