/** Playback over service-sampled frames at the display rate. */

import type { AnimationPayload, SampleFrame } from "./types.js";

export function lastFrame(animation: AnimationPayload): number {
  let last = 0;
  for (const curve of animation.curves) {
    const key = curve.keys[curve.keys.length - 1];
    if (key && key.frame > last) {
      last = key.frame;
    }
  }
  return last;
}

export function durationSeconds(animation: AnimationPayload): number {
  return lastFrame(animation) / animation.fps;
}

export interface PlaybackHooks {
  onFrame: (frame: SampleFrame, index: number) => void;
  onDone: () => void;
  /** injectable clock for tests; defaults to requestAnimationFrame timing */
  now?: () => number;
  schedule?: (tick: () => void) => number;
  cancel?: (handle: number) => void;
}

export class Playback {
  private handle: number | null = null;
  private startedAt = 0;
  private readonly now: () => number;
  private readonly schedule: (tick: () => void) => number;
  private readonly cancel: (handle: number) => void;

  constructor(
    private readonly frames: SampleFrame[],
    private readonly fps: number,
    private readonly hooks: PlaybackHooks,
  ) {
    this.now = hooks.now ?? (() => performance.now());
    this.schedule =
      hooks.schedule ?? ((tick) => requestAnimationFrame(() => tick()) as unknown as number);
    this.cancel = hooks.cancel ?? ((h) => cancelAnimationFrame(h));
  }

  start(): void {
    this.stop();
    this.startedAt = this.now();
    const tick = () => {
      const elapsed = (this.now() - this.startedAt) / 1000;
      const index = Math.floor(elapsed * this.fps);
      if (index >= this.frames.length) {
        const final = this.frames[this.frames.length - 1];
        if (final) {
          this.hooks.onFrame(final, this.frames.length - 1);
        }
        this.handle = null;
        this.hooks.onDone();
        return;
      }
      const frame = this.frames[index];
      if (frame) {
        this.hooks.onFrame(frame, index);
      }
      this.handle = this.schedule(tick);
    };
    this.handle = this.schedule(tick);
  }

  stop(): void {
    if (this.handle !== null) {
      this.cancel(this.handle);
      this.handle = null;
    }
  }

  get running(): boolean {
    return this.handle !== null;
  }
}
