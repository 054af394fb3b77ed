/** Editor wiring: DOM controls, canvas interaction, service calls. */

import { ApiClient } from "./api.js";
import { armFromSample, degreesToRadians, forwardArm } from "./fk.js";
import type { ArmPose } from "./fk.js";
import { Editor, emptySign } from "./state.js";
import {
  defaultCamera,
  project,
  renderScene,
  unproject,
  type Scene,
} from "./renderer.js";
import { Playback, lastFrame } from "./timeline.js";
import type { ModelDescription, SampleFrame, SignDoc, Vec3 } from "./types.js";

const api = new ApiClient("");
let editor = new Editor(api);
let model: ModelDescription | null = null;
let playback: Playback | null = null;
let currentSample: SampleFrame | null = null;
let trail: Vec3[] = [];

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const camera = defaultCamera(canvas.width, canvas.height);

const $ = <T extends HTMLElement>(id: string): T => document.getElementById(id) as T;

function restAngles(count: number): number[] {
  return new Array<number>(count).fill(0);
}

function armPoses(): { right: ArmPose | null; left: ArmPose | null } {
  if (!model) {
    return { right: null, left: null };
  }
  const state = editor.snapshot();
  let right: ArmPose | null = null;
  let left: ArmPose | null = null;

  if (currentSample) {
    right = armFromSample(model.arms.right, currentSample.values);
    left = model.arms.left ? armFromSample(model.arms.left, currentSample.values) : null;
  }
  if (!right) {
    const ik = state.ikResults[state.selected];
    if (ik) {
      right = forwardArm(model.arms.right, ik.joints.values);
      if (state.sign.mirrored && model.arms.left && ik.mirrored_joints) {
        left = forwardArm(model.arms.left, ik.mirrored_joints.values);
      }
    } else {
      right = forwardArm(model.arms.right, restAngles(model.arms.right.joints.length));
    }
  }
  if (!left && model.arms.left && state.sign.two_handed && !state.sign.mirrored) {
    left = forwardArm(model.arms.left, restAngles(model.arms.left.joints.length));
  }
  return { right, left };
}

function redraw(): void {
  if (!model) {
    return;
  }
  const state = editor.snapshot();
  const poses = armPoses();
  const scene: Scene = {
    model,
    rightPose: poses.right,
    leftPose: poses.left,
    waypoints: state.sign.waypoints.map((waypoint, index) => ({
      position: waypoint.position,
      status: state.ikResults[index]?.status,
      selected: index === state.selected,
    })),
    trail,
  };
  renderScene(ctx, camera, scene);
  renderStatus();
  renderWaypointList();
}

function renderStatus(): void {
  const state = editor.snapshot();
  const ik = state.ikResults[state.selected];
  const status = $("status");
  if (state.lastError) {
    status.textContent = `error: ${state.lastError}`;
    status.className = "status error";
    return;
  }
  if (ik) {
    // displayed strings mirror the solver response verbatim
    status.textContent =
      `${ik.status} residual=${ik.residual} ` +
      `iterations=${ik.iterations} restarts=${ik.restarts_used}`;
    status.className = `status ${ik.status.toLowerCase()}`;
  } else {
    status.textContent = "no solve yet";
    status.className = "status";
  }
  $("dirty").textContent = state.dirty ? "unsaved changes" : "";
  if (state.report) {
    $("report").textContent =
      `${state.report.gloss}: ${state.report.status}` +
      (state.report.failure_reasons.length ? ` (${state.report.failure_reasons.join("; ")})` : "");
  } else {
    $("report").textContent = "";
  }
}

function renderWaypointList(): void {
  const state = editor.snapshot();
  const list = $("waypoints");
  list.innerHTML = "";
  state.sign.waypoints.forEach((waypoint, index) => {
    const item = document.createElement("li");
    const ik = state.ikResults[index];
    item.textContent =
      `t=${waypoint.time.toFixed(2)}s  (${waypoint.position.map((v) => v.toFixed(3)).join(", ")})` +
      `  ${waypoint.hand_state}  ${ik ? ik.status : "..."}`;
    item.className = index === state.selected ? "selected" : "";
    if (ik?.status === "Unreachable") {
      item.classList.add("unreachable");
    }
    item.onclick = () => {
      editor.select(index);
      syncForm();
    };
    list.appendChild(item);
  });
}

function syncForm(): void {
  const state = editor.snapshot();
  const waypoint = state.sign.waypoints[state.selected];
  ($("gloss") as HTMLInputElement).value = state.sign.gloss;
  ($("two-handed") as HTMLInputElement).checked = state.sign.two_handed;
  ($("mirrored") as HTMLInputElement).checked = state.sign.mirrored;
  ($("repetitions") as HTMLInputElement).value = String(state.sign.repetitions);
  if (waypoint) {
    ($("time") as HTMLInputElement).value = String(waypoint.time);
    ($("hand-state") as HTMLSelectElement).value = waypoint.hand_state;
  }
  redraw();
}

// --- canvas dragging ---------------------------------------------------

let dragging = false;

canvas.addEventListener("pointerdown", (event) => {
  const state = editor.snapshot();
  const rect = canvas.getBoundingClientRect();
  const sx = event.clientX - rect.left;
  const sy = event.clientY - rect.top;
  let best = -1;
  let bestDistance = 18; // px hit radius
  state.sign.waypoints.forEach((waypoint, index) => {
    const [wx, wy] = project(camera, waypoint.position);
    const distance = Math.hypot(wx - sx, wy - sy);
    if (distance < bestDistance) {
      best = index;
      bestDistance = distance;
    }
  });
  if (best >= 0) {
    editor.select(best);
    dragging = true;
    canvas.setPointerCapture(event.pointerId);
    syncForm();
  }
});

canvas.addEventListener("pointermove", (event) => {
  if (!dragging) {
    return;
  }
  const state = editor.snapshot();
  const waypoint = state.sign.waypoints[state.selected];
  if (!waypoint) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const position = unproject(
    camera,
    event.clientX - rect.left,
    event.clientY - rect.top,
    waypoint.position[0],
  );
  editor.moveWaypoint(state.selected, position); // debounced /ik inside
  redraw();
});

canvas.addEventListener("pointerup", () => {
  if (dragging) {
    dragging = false;
    // reconcile the drag preview against the service immediately
    void editor.settleIk(editor.snapshot().selected).then(redraw);
  }
});

// --- control handlers ----------------------------------------------------

function bindControls(): void {
  $("gloss").oninput = () => editor.setGloss(($("gloss") as HTMLInputElement).value);
  $("two-handed").onchange = () =>
    editor.setFlags({ two_handed: ($("two-handed") as HTMLInputElement).checked });
  $("mirrored").onchange = () =>
    editor.setFlags({ mirrored: ($("mirrored") as HTMLInputElement).checked });
  $("repetitions").onchange = () =>
    editor.setFlags({ repetitions: Number(($("repetitions") as HTMLInputElement).value) || 1 });
  $("time").onchange = () =>
    editor.retimeWaypoint(editor.snapshot().selected, Number(($("time") as HTMLInputElement).value));
  $("hand-state").onchange = () =>
    editor.setHandState(
      editor.snapshot().selected,
      ($("hand-state") as HTMLSelectElement).value as "open" | "closed" | "neutral",
    );
  $("add-waypoint").onclick = () => {
    editor.addWaypoint();
    syncForm();
  };
  $("remove-waypoint").onclick = () => {
    editor.removeWaypoint(editor.snapshot().selected);
    syncForm();
  };

  $("compile").onclick = async () => {
    await editor.compile();
    currentSample = null;
    trail = [];
    redraw();
  };

  $("play").onclick = async () => {
    const state = editor.snapshot();
    if (!state.animation) {
      const ok = await editor.compile();
      if (!ok) {
        redraw();
        return;
      }
    }
    const animation = editor.snapshot().animation!;
    const sampled = await api.sample(animation);
    playback?.stop();
    trail = [];
    playback = new Playback(sampled.frames, animation.fps, {
      onFrame: (frame) => {
        currentSample = frame;
        editor.setPlayCursor(frame.frame);
        if (frame.tips.right) {
          trail.push(frame.tips.right.position);
        }
        $("cursor").textContent =
          `frame ${frame.frame.toFixed(0)} / ${lastFrame(animation)}`;
        redraw();
      },
      onDone: () => {
        $("cursor").textContent = "done";
      },
    });
    playback.start();
  };

  $("save").onclick = async () => {
    await editor.save();
    await refreshGlossList();
    redraw();
  };

  $("export").onclick = async () => {
    try {
      const text = await editor.exportQanim();
      const blob = new Blob([text], { type: "application/xml" });
      const url = URL.createObjectURL(blob);
      const anchor = document.createElement("a");
      anchor.href = url;
      anchor.download = `${editor.snapshot().sign.gloss}.qanim`;
      anchor.click();
      URL.revokeObjectURL(url);
    } catch {
      redraw(); // error already surfaced in state.lastError
    }
  };

  $("new-sign").onclick = () => {
    playback?.stop();
    currentSample = null;
    trail = [];
    editor = new Editor(api, emptySign(($("gloss") as HTMLInputElement).value || "NEW"));
    editor.subscribe(() => redraw());
    void editor.fireIk(0).then(syncForm);
    syncForm();
  };

  $("load-sign").onclick = async () => {
    const select = $("lexicon") as HTMLSelectElement;
    if (!select.value) {
      return;
    }
    const sign: SignDoc = await api.loadSign(select.value);
    playback?.stop();
    currentSample = null;
    trail = [];
    editor = new Editor(api, sign);
    editor.subscribe(() => redraw());
    sign.waypoints.forEach((_, index) => editor.requestIk(index));
    syncForm();
  };
}

async function refreshGlossList(): Promise<void> {
  const select = $("lexicon") as HTMLSelectElement;
  const glosses = await api.listGlosses();
  select.innerHTML = "";
  for (const gloss of glosses) {
    const option = document.createElement("option");
    option.value = gloss;
    option.textContent = gloss;
    select.appendChild(option);
  }
}

async function boot(): Promise<void> {
  model = await api.model();
  editor.subscribe(() => redraw());
  bindControls();
  await refreshGlossList();
  void editor.fireIk(0).then(syncForm);
  syncForm();
}

void boot();

export { degreesToRadians }; // keeps the module shape stable for tests
