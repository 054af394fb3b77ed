/** Editor state and the edit loop.
 *
 * Waypoint edits trigger a debounced IK request; in-flight requests for a
 * waypoint are aborted when a newer edit supersedes them (latest wins).
 * Compiled animations are stored verbatim: export and save paths send the
 * service's own payloads back, never locally recomputed data.
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  AnimationPayload,
  CompileReportPayload,
  HandState,
  IkResult,
  SignDoc,
  Vec3,
  WaypointDoc,
} from "./types.js";

export const DEFAULT_WEIGHTS: WaypointDoc["weights"] = [0.1, 0.1, 0.1, 1, 1, 1];
export const IDENTITY_QUAT: WaypointDoc["orientation"] = [1, 0, 0, 0];

export function emptySign(gloss: string): SignDoc {
  return {
    gloss,
    category: "",
    two_handed: false,
    mirrored: false,
    repetitions: 1,
    manual_only: false,
    waypoints: [
      {
        time: 0,
        position: [0.25, -0.18, 0.05],
        orientation: [...IDENTITY_QUAT] as WaypointDoc["orientation"],
        weights: [...DEFAULT_WEIGHTS] as WaypointDoc["weights"],
        hand_state: "neutral",
      },
    ],
  };
}

export interface EditorState {
  sign: SignDoc;
  selected: number;
  /** last IK result per waypoint index; undefined until the service answers */
  ikResults: (IkResult | undefined)[];
  animation: AnimationPayload | null;
  report: CompileReportPayload | null;
  playCursor: number;
  dirty: boolean;
  lastError: string | null;
}

export type Listener = (state: EditorState) => void;

interface PendingIk {
  sequence: number;
  controller: AbortController;
}

export class Editor {
  private state: EditorState;
  private listeners: Listener[] = [];
  private pending = new Map<number, PendingIk>();
  private sequence = 0;
  private debounceTimers = new Map<number, ReturnType<typeof setTimeout>>();

  constructor(
    private readonly api: ApiClient,
    sign: SignDoc = emptySign("NEW"),
    readonly debounceMs = 120,
  ) {
    this.state = {
      sign,
      selected: 0,
      ikResults: sign.waypoints.map(() => undefined),
      animation: null,
      report: null,
      playCursor: 0,
      dirty: false,
      lastError: null,
    };
  }

  snapshot(): EditorState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<EditorState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private patchSign(sign: SignDoc): void {
    this.update({ sign, dirty: true, animation: null, report: null });
  }

  // --- waypoint edits -------------------------------------------------

  select(index: number): void {
    if (index < 0 || index >= this.state.sign.waypoints.length) {
      return;
    }
    this.update({ selected: index });
  }

  addWaypoint(): number {
    const waypoints = this.state.sign.waypoints;
    const last = waypoints[waypoints.length - 1]!;
    const added: WaypointDoc = {
      ...last,
      time: Number((last.time + 0.6).toFixed(3)),
      position: [...last.position] as Vec3,
      orientation: [...last.orientation] as WaypointDoc["orientation"],
      weights: [...last.weights] as WaypointDoc["weights"],
    };
    const sign = { ...this.state.sign, waypoints: [...waypoints, added] };
    this.patchSign(sign);
    this.update({
      selected: sign.waypoints.length - 1,
      ikResults: [...this.state.ikResults, undefined],
    });
    this.requestIk(sign.waypoints.length - 1);
    return sign.waypoints.length - 1;
  }

  removeWaypoint(index: number): void {
    const waypoints = this.state.sign.waypoints;
    if (waypoints.length <= 1 || index < 0 || index >= waypoints.length) {
      return;
    }
    const sign = {
      ...this.state.sign,
      waypoints: waypoints.filter((_, i) => i !== index),
    };
    const ikResults = this.state.ikResults.filter((_, i) => i !== index);
    this.patchSign(sign);
    this.update({ selected: Math.min(this.state.selected, sign.waypoints.length - 1), ikResults });
  }

  moveWaypoint(index: number, position: Vec3): void {
    const waypoints = [...this.state.sign.waypoints];
    const waypoint = waypoints[index];
    if (!waypoint) {
      return;
    }
    waypoints[index] = { ...waypoint, position: [...position] as Vec3 };
    this.patchSign({ ...this.state.sign, waypoints });
    this.requestIk(index);
  }

  retimeWaypoint(index: number, time: number): void {
    const waypoints = [...this.state.sign.waypoints];
    const waypoint = waypoints[index];
    if (!waypoint) {
      return;
    }
    waypoints[index] = { ...waypoint, time };
    this.patchSign({ ...this.state.sign, waypoints });
  }

  reweightWaypoint(index: number, weights: WaypointDoc["weights"]): void {
    const waypoints = [...this.state.sign.waypoints];
    const waypoint = waypoints[index];
    if (!waypoint) {
      return;
    }
    waypoints[index] = { ...waypoint, weights: [...weights] as WaypointDoc["weights"] };
    this.patchSign({ ...this.state.sign, waypoints });
    this.requestIk(index);
  }

  setHandState(index: number, handState: HandState): void {
    const waypoints = [...this.state.sign.waypoints];
    const waypoint = waypoints[index];
    if (!waypoint) {
      return;
    }
    waypoints[index] = { ...waypoint, hand_state: handState };
    this.patchSign({ ...this.state.sign, waypoints });
  }

  setFlags(flags: { two_handed?: boolean; mirrored?: boolean; repetitions?: number }): void {
    const sign = { ...this.state.sign, ...flags };
    if (sign.mirrored) {
      sign.two_handed = true; // schema: mirrored implies two-handed
    }
    this.patchSign(sign);
  }

  setGloss(gloss: string): void {
    this.patchSign({ ...this.state.sign, gloss: gloss.toUpperCase() });
  }

  // --- service calls ---------------------------------------------------

  /** Debounced, latest-wins IK for one waypoint. */
  requestIk(index: number): void {
    const existing = this.debounceTimers.get(index);
    if (existing !== undefined) {
      clearTimeout(existing);
    }
    const timer = setTimeout(() => {
      this.debounceTimers.delete(index);
      void this.fireIk(index);
    }, this.debounceMs);
    this.debounceTimers.set(index, timer);
  }

  /** Issue the IK call immediately (used on drag release and by tests). */
  async fireIk(index: number): Promise<void> {
    const waypoint = this.state.sign.waypoints[index];
    if (!waypoint) {
      return;
    }
    const stale = this.pending.get(index);
    if (stale) {
      stale.controller.abort();
    }
    const sequence = ++this.sequence;
    const controller = new AbortController();
    this.pending.set(index, { sequence, controller });
    try {
      const result = await this.api.ik(
        {
          target: { position: waypoint.position, orientation: waypoint.orientation },
          weights: waypoint.weights,
          hand_state: waypoint.hand_state,
          mirror: this.state.sign.mirrored,
          seed: index,
        },
        controller.signal,
      );
      const current = this.pending.get(index);
      if (!current || current.sequence !== sequence) {
        return; // superseded while in flight
      }
      this.pending.delete(index);
      const ikResults = [...this.state.ikResults];
      ikResults[index] = result;
      this.update({ ikResults, lastError: null });
    } catch (error) {
      if (error instanceof DOMException && error.name === "AbortError") {
        return;
      }
      const current = this.pending.get(index);
      if (current && current.sequence === sequence) {
        this.pending.delete(index);
      }
      this.update({ lastError: error instanceof Error ? error.message : String(error) });
    }
  }

  /** Cancel any pending debounce for the waypoint and solve it now. */
  async settleIk(index: number): Promise<void> {
    const timer = this.debounceTimers.get(index);
    if (timer !== undefined) {
      clearTimeout(timer);
      this.debounceTimers.delete(index);
    }
    await this.fireIk(index);
  }

  async flushIk(): Promise<void> {
    const indices = [...this.debounceTimers.keys()];
    await Promise.all(indices.map((index) => this.settleIk(index)));
  }

  async compile(): Promise<boolean> {
    try {
      const response = await this.api.compile(this.state.sign);
      this.update({
        animation: response.animation,
        report: response.report,
        playCursor: 0,
        lastError: null,
      });
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.detail.report) {
        this.update({
          animation: null,
          report: error.detail.report,
          lastError: error.detail.message,
        });
      } else {
        this.update({ lastError: error instanceof Error ? error.message : String(error) });
      }
      return false;
    }
  }

  async save(): Promise<boolean> {
    try {
      const stored = await this.api.saveSign(this.state.sign);
      this.update({ sign: stored, dirty: false, lastError: null });
      return true;
    } catch (error) {
      // surfaced inline; the document stays as edited
      this.update({ lastError: error instanceof Error ? error.message : String(error) });
      return false;
    }
  }

  /** Exported bytes always originate from the service-compiled animation. */
  async exportQanim(): Promise<string> {
    let animation = this.state.animation;
    if (!animation) {
      const ok = await this.compile();
      if (!ok || !this.state.animation) {
        throw new Error(this.state.lastError ?? "compile failed");
      }
      animation = this.state.animation;
    }
    return this.api.exportQanim(animation);
  }

  setPlayCursor(frame: number): void {
    const animation = this.state.animation;
    const last = animation
      ? Math.max(0, ...animation.curves.map((c) => c.keys[c.keys.length - 1]?.frame ?? 0))
      : 0;
    this.update({ playCursor: Math.min(Math.max(0, frame), last) });
  }

  /** True when any waypoint's last IK answer was Unreachable. */
  unreachableWaypoints(): number[] {
    const out: number[] = [];
    this.state.ikResults.forEach((result, index) => {
      if (result && result.status === "Unreachable") {
        out.push(index);
      }
    });
    return out;
  }
}
