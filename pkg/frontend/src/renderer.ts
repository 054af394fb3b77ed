/** Canvas stick-figure rendering: arms as segment chains, the keep-out box,
 * waypoints with status highlights, and the sampled tip trail. The camera is
 * a fixed 2.5D projection: screen x tracks the robot's lateral axis, screen
 * y its vertical axis, with forward depth shown as a slight diagonal shift.
 */

import type { ArmPose } from "./fk.js";
import type { ModelDescription, Vec3 } from "./types.js";

export interface Palette {
  rightArm: string;
  leftArm: string;
  keepout: string;
  waypoint: string;
  waypointSelected: string;
  waypointUnreachable: string;
  waypointBestEffort: string;
  trail: string;
}

export const DEFAULT_PALETTE: Palette = {
  rightArm: "#2a7fb8",
  leftArm: "#3fae6a",
  keepout: "#c2571a",
  waypoint: "#555566",
  waypointSelected: "#111122",
  waypointUnreachable: "#d02020",
  waypointBestEffort: "#d0a020",
  trail: "#9999bb",
};

/** Pick the highlight colour for a waypoint from its solver status. */
export function waypointColor(
  status: "Converged" | "BestEffort" | "Unreachable" | undefined,
  selected: boolean,
  palette: Palette = DEFAULT_PALETTE,
): string {
  if (status === "Unreachable") {
    return palette.waypointUnreachable;
  }
  if (status === "BestEffort") {
    return palette.waypointBestEffort;
  }
  return selected ? palette.waypointSelected : palette.waypoint;
}

export interface Camera {
  cx: number;
  cy: number;
  scale: number; // px per metre
  depthShear: number; // fraction of x (forward) mixed into both axes
}

export function defaultCamera(width: number, height: number): Camera {
  return { cx: width * 0.5, cy: height * 0.62, scale: Math.min(width, height) * 0.9, depthShear: 0.35 };
}

export function project(camera: Camera, p: Vec3): [number, number] {
  const [x, y, z] = p; // x forward, y left, z up (base frame)
  const sx = camera.cx - camera.scale * y + camera.scale * camera.depthShear * x * 0.5;
  const sy = camera.cy - camera.scale * z + camera.scale * camera.depthShear * x * 0.25;
  return [sx, sy];
}

/** Screen-to-world inverse for dragging on the lateral/vertical plane,
 * keeping the waypoint's current forward (x) coordinate. */
export function unproject(camera: Camera, sx: number, sy: number, keepX: number): Vec3 {
  const y = (camera.cx + camera.scale * camera.depthShear * keepX * 0.5 - sx) / camera.scale;
  const z = (camera.cy + camera.scale * camera.depthShear * keepX * 0.25 - sy) / camera.scale;
  return [keepX, y, z];
}

function drawChain(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  pose: ArmPose,
  color: string,
): void {
  const points = [...pose.joints, pose.tip].map((p) => project(camera, p));
  ctx.strokeStyle = color;
  ctx.lineWidth = 5;
  ctx.lineCap = "round";
  ctx.beginPath();
  points.forEach(([x, y], i) => {
    if (i === 0) {
      ctx.moveTo(x, y);
    } else {
      ctx.lineTo(x, y);
    }
  });
  ctx.stroke();
  ctx.fillStyle = color;
  for (const [x, y] of points) {
    ctx.beginPath();
    ctx.arc(x, y, 4, 0, Math.PI * 2);
    ctx.fill();
  }
}

function drawKeepout(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  box: { min: Vec3; max: Vec3 },
  color: string,
): void {
  const corners: Vec3[] = [];
  for (const x of [box.min[0], box.max[0]]) {
    for (const y of [box.min[1], box.max[1]]) {
      for (const z of [box.min[2], box.max[2]]) {
        corners.push([x, y, z]);
      }
    }
  }
  const edges: [number, number][] = [
    [0, 1], [0, 2], [0, 4], [3, 1], [3, 2], [3, 7],
    [5, 1], [5, 4], [5, 7], [6, 2], [6, 4], [6, 7],
  ];
  ctx.strokeStyle = color;
  ctx.lineWidth = 1;
  ctx.setLineDash([4, 3]);
  ctx.beginPath();
  for (const [a, b] of edges) {
    const [ax, ay] = project(camera, corners[a]!);
    const [bx, by] = project(camera, corners[b]!);
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
  }
  ctx.stroke();
  ctx.setLineDash([]);
}

export interface SceneWaypoint {
  position: Vec3;
  status: "Converged" | "BestEffort" | "Unreachable" | undefined;
  selected: boolean;
}

export interface Scene {
  model: ModelDescription;
  rightPose: ArmPose | null;
  leftPose: ArmPose | null;
  waypoints: SceneWaypoint[];
  trail: Vec3[];
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  camera: Camera,
  scene: Scene,
  palette: Palette = DEFAULT_PALETTE,
): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  drawKeepout(ctx, camera, scene.model.keepout, palette.keepout);

  if (scene.trail.length > 1) {
    ctx.strokeStyle = palette.trail;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    scene.trail.forEach((p, i) => {
      const [x, y] = project(camera, p);
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
  }

  if (scene.rightPose) {
    drawChain(ctx, camera, scene.rightPose, palette.rightArm);
  }
  if (scene.leftPose) {
    drawChain(ctx, camera, scene.leftPose, palette.leftArm);
  }

  scene.waypoints.forEach((waypoint) => {
    const [x, y] = project(camera, waypoint.position);
    ctx.fillStyle = waypointColor(waypoint.status, waypoint.selected, palette);
    ctx.beginPath();
    ctx.arc(x, y, waypoint.selected ? 8 : 6, 0, Math.PI * 2);
    ctx.fill();
    if (waypoint.status === "Unreachable") {
      ctx.strokeStyle = palette.waypointUnreachable;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(x, y, 12, 0, Math.PI * 2);
      ctx.stroke();
    }
  });
}
