/** Integration tests against the real authoring service.
 *
 * Spawns `python -m signforge.cli serve` on an ephemeral port, drives the
 * editor through the public API, and checks the cross-interface contracts:
 * exported bytes equal CLI compilation of the saved document, and dragging
 * a waypoint updates the solver status shown in the editor.
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { Transport } from "../src/api.js";
import { forwardArm } from "../src/fk.js";
import { Editor } from "../src/state.js";
import type { AnimationPayload, ModelDescription, SignDoc, Vec3 } from "../src/types.js";

const execFileAsync = promisify(execFile);

const HERE = fileURLToPath(new URL(".", import.meta.url));
const REPO_ROOT = resolve(HERE, "..", "..");
const DEMO_SIGN = join(REPO_ROOT, "src", "signforge", "data", "demo_lexicon", "AMARE.sign.json");
const PYTHON = process.env.PYTHON ?? "python3";

let service: ChildProcess;
let base = "";
let lexiconDir = "";

function startService(): Promise<string> {
  return new Promise((resolvePort, reject) => {
    lexiconDir = mkdtempSync(join(tmpdir(), "signforge-ui-test-"));
    service = spawn(
      PYTHON,
      ["-u", "-m", "signforge.cli", "serve", "--port", "0", "--lexicon", lexiconDir],
      { cwd: REPO_ROOT, stdio: ["ignore", "pipe", "pipe"] },
    );
    let buffered = "";
    const onData = (chunk: Buffer) => {
      buffered += chunk.toString();
      const match = buffered.match(/http:\/\/127\.0\.0\.1:(\d+)/);
      if (match) {
        service.stdout?.off("data", onData);
        resolvePort(`http://127.0.0.1:${match[1]}`);
      }
    };
    service.stdout?.on("data", onData);
    service.stderr?.on("data", () => undefined);
    service.on("exit", (code) => reject(new Error(`service exited early (${code})`)));
    setTimeout(() => reject(new Error("service did not start in time")), 30_000);
  });
}

beforeAll(async () => {
  base = await startService();
}, 40_000);

afterAll(() => {
  service?.kill();
  if (lexiconDir) {
    rmSync(lexiconDir, { recursive: true, force: true });
  }
});

describe("UI/CLI equivalence", () => {
  it(
    "export from the editor equals CLI compilation of the saved document",
    { timeout: 120_000 },
    async () => {
      const api = new ApiClient(base);
      const document = JSON.parse(readFileSync(DEMO_SIGN, "utf-8")) as SignDoc;

      // Save through the service exactly as the Save button does.
      const editor = new Editor(api, document, 0);
      expect(await editor.save()).toBe(true);
      expect(editor.snapshot().dirty).toBe(false);

      const uiBytes = await editor.exportQanim();

      const outPath = join(lexiconDir, "cli-out.qanim");
      await execFileAsync(
        PYTHON,
        ["-m", "signforge.cli", "compile", join(lexiconDir, "AMARE.sign.json"), "-o", outPath],
        { cwd: REPO_ROOT },
      );
      const cliBytes = readFileSync(outPath, "utf-8");

      expect(uiBytes).toBe(cliBytes);
      expect(uiBytes.startsWith('<?xml version="1.0" encoding="UTF-8"?>')).toBe(true);
    },
  );
});

describe("live preview loop", () => {
  it(
    "dragging a waypoint issues /ik and an unreachable drag flags the waypoint",
    { timeout: 120_000 },
    async () => {
      let ikCalls = 0;
      const counting: Transport = (path, init) => {
        if (path.endsWith("/ik")) {
          ikCalls += 1;
        }
        return fetch(path, init);
      };
      const api = new ApiClient(base, counting);
      const document = JSON.parse(readFileSync(DEMO_SIGN, "utf-8")) as SignDoc;
      const editor = new Editor(api, document, 0);

      // drag far outside the arm's reach: service reports Unreachable
      editor.moveWaypoint(0, [5, 0, 0]);
      await editor.settleIk(0);
      expect(ikCalls).toBeGreaterThan(0);
      expect(editor.snapshot().ikResults[0]?.status).toBe("Unreachable");
      expect(editor.unreachableWaypoints()).toEqual([0]);

      // drag back onto the original (reachable) target: highlight clears
      const original = document.waypoints[0]!.position as Vec3;
      editor.moveWaypoint(0, original);
      await editor.settleIk(0);
      expect(editor.snapshot().ikResults[0]?.status).toBe("Converged");
      expect(editor.unreachableWaypoints()).toEqual([]);
      expect(editor.snapshot().ikResults[0]!.residual).toBeLessThan(1e-3);
    },
  );
});

describe("client-side FK consistency", () => {
  it(
    "rest posture matches the service's sampled tip pose",
    { timeout: 60_000 },
    async () => {
      const api = new ApiClient(base);
      const model: ModelDescription = await api.model();
      const right = model.arms.right;

      const animation: AnimationPayload = {
        fps: 25,
        curves: right.joints.map((joint) => ({
          actuator: joint.name,
          unit: "degree",
          mute: false,
          keys: [{ frame: 0, value: 0, left: null, right: null }],
        })),
      };
      const sampled = await api.sample(animation);
      const tip = sampled.frames[0]!.tips.right!.position;

      const clientPose = forwardArm(right, right.joints.map(() => 0));
      for (let i = 0; i < 3; i++) {
        expect(clientPose.tip[i]).toBeCloseTo(tip[i]!, 9);
      }
    },
  );
});
