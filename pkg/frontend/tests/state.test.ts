import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import type { Transport } from "../src/api.js";
import { DEFAULT_PALETTE, waypointColor } from "../src/renderer.js";
import { Editor, emptySign } from "../src/state.js";
import type { IkResult } from "../src/types.js";

function ikResult(status: IkResult["status"], residual = 0.001): IkResult {
  return {
    joints: { names: ["A"], values: [0.1] },
    residual,
    status,
    iterations: 5,
    restarts_used: 0,
  };
}

function envelope(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify({ request_id: "t", payload }), { status });
}

interface RecordedCall {
  path: string;
  body: unknown;
  signal: AbortSignal | undefined;
}

/** Transport stub that records calls and lets tests resolve them manually. */
function manualTransport(autoRespond?: (call: RecordedCall) => Response) {
  const calls: RecordedCall[] = [];
  const waiters: { resolve: (r: Response) => void; signal: AbortSignal | undefined }[] = [];
  const transport: Transport = (path, init) => {
    const call: RecordedCall = {
      path,
      body: init?.body ? JSON.parse(init.body as string) : undefined,
      signal: init?.signal ?? undefined,
    };
    calls.push(call);
    if (autoRespond) {
      return Promise.resolve(autoRespond(call));
    }
    return new Promise<Response>((resolve, reject) => {
      waiters.push({ resolve, signal: call.signal });
      init?.signal?.addEventListener("abort", () =>
        reject(new DOMException("aborted", "AbortError")),
      );
    });
  };
  return {
    calls,
    transport,
    /** resolve the oldest request that has not been aborted */
    respondNext: (response: Response) => {
      const index = waiters.findIndex((w) => !w.signal?.aborted);
      if (index < 0) {
        throw new Error("no live pending request");
      }
      const [waiter] = waiters.splice(index, 1);
      waiter!.resolve(response);
    },
  };
}

describe("debounced IK", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it("coalesces rapid drags into one request carrying the last position", async () => {
    const recorder = manualTransport(() => envelope(ikResult("Converged")));
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("DRAG"), 50);

    editor.moveWaypoint(0, [0.1, -0.1, 0.0]);
    editor.moveWaypoint(0, [0.2, -0.2, 0.0]);
    editor.moveWaypoint(0, [0.3, -0.3, 0.1]);
    expect(recorder.calls.length).toBe(0); // still inside the debounce window

    await vi.advanceTimersByTimeAsync(60);
    expect(recorder.calls.length).toBe(1);
    const body = recorder.calls[0]!.body as { target: { position: number[] } };
    expect(body.target.position).toEqual([0.3, -0.3, 0.1]);
    expect(editor.snapshot().ikResults[0]?.status).toBe("Converged");
  });

  it("marks the state dirty on edit and clears it on save", async () => {
    const recorder = manualTransport((call) =>
      call.path.startsWith("/lexicon/")
        ? envelope(JSON.parse(JSON.stringify(emptySign("DRAG"))))
        : envelope(ikResult("Converged")),
    );
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("DRAG"), 50);
    expect(editor.snapshot().dirty).toBe(false);
    editor.moveWaypoint(0, [0.2, -0.2, 0.1]);
    expect(editor.snapshot().dirty).toBe(true);
    await editor.save();
    expect(editor.snapshot().dirty).toBe(false);
  });
});

describe("latest-wins IK", () => {
  it("aborts the superseded request and keeps the newest answer", async () => {
    const recorder = manualTransport();
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("RACE"), 0);

    const first = editor.fireIk(0);
    const second = editor.fireIk(0);

    expect(recorder.calls.length).toBe(2);
    expect(recorder.calls[0]!.signal?.aborted).toBe(true); // stale call cancelled
    expect(recorder.calls[1]!.signal?.aborted).toBe(false);

    recorder.respondNext(envelope(ikResult("Converged", 1e-9)));
    await Promise.all([first, second]);
    expect(editor.snapshot().ikResults[0]?.status).toBe("Converged");
    expect(editor.snapshot().ikResults[0]?.residual).toBe(1e-9);
  });
});

describe("unreachable highlighting", () => {
  it("lists waypoints whose last answer was Unreachable and colours them red", async () => {
    const recorder = manualTransport(() => envelope(ikResult("Unreachable", 9.5)));
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("FAR"), 0);
    await editor.fireIk(0);
    expect(editor.unreachableWaypoints()).toEqual([0]);
    const status = editor.snapshot().ikResults[0]!.status;
    expect(waypointColor(status, false)).toBe(DEFAULT_PALETTE.waypointUnreachable);
    expect(waypointColor("Converged", false)).toBe(DEFAULT_PALETTE.waypoint);
  });
});

describe("export path", () => {
  it("sends the compiled animation payload back verbatim", async () => {
    const animation = { fps: 25, curves: [{ actuator: "A", unit: "degree", mute: false, keys: [] }] };
    const recorder = manualTransport((call) => {
      if (call.path === "/compile") {
        return envelope({
          animation,
          report: { gloss: "X", status: "Automated", waypoint_status: [], failure_reasons: [], warnings: [] },
          diagnostics: [],
        });
      }
      if (call.path === "/export") {
        return envelope({ qanim: "<xml/>" });
      }
      return envelope(ikResult("Converged"));
    });
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("X"), 0);

    const text = await editor.exportQanim();
    expect(text).toBe("<xml/>");
    const exportCall = recorder.calls.find((c) => c.path === "/export");
    expect(exportCall).toBeDefined();
    expect((exportCall!.body as { animation: unknown }).animation).toEqual(animation);
  });

  it("surfaces compile failures instead of exporting", async () => {
    const recorder = manualTransport(() =>
      new Response(
        JSON.stringify({
          request_id: "t",
          error: {
            code: "compile_failed",
            message: "sign could not be compiled",
            report: { gloss: "X", status: "Failed", waypoint_status: [], failure_reasons: ["far"], warnings: [] },
          },
        }),
        { status: 422 },
      ),
    );
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("X"), 0);
    await expect(editor.exportQanim()).rejects.toThrow();
    expect(editor.snapshot().report?.status).toBe("Failed");
    expect(editor.snapshot().animation).toBeNull();
  });
});

describe("save failures", () => {
  it("surfaces a 400 inline and leaves the document unchanged", async () => {
    const recorder = manualTransport((call) =>
      call.path.startsWith("/lexicon/")
        ? new Response(
            JSON.stringify({
              request_id: "t",
              error: { code: "SchemaViolation", message: "gloss: bad" },
            }),
            { status: 400 },
          )
        : envelope(ikResult("Converged")),
    );
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("BAD"), 0);
    editor.retimeWaypoint(0, 0.4);
    const before = editor.snapshot().sign;
    expect(await editor.save()).toBe(false);
    expect(editor.snapshot().lastError).toContain("SchemaViolation");
    expect(editor.snapshot().sign).toEqual(before);
    expect(editor.snapshot().dirty).toBe(true);
  });
});

describe("sign flags", () => {
  it("mirrored implies two-handed", () => {
    const recorder = manualTransport(() => envelope(ikResult("Converged")));
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("X"), 0);
    editor.setFlags({ mirrored: true });
    expect(editor.snapshot().sign.two_handed).toBe(true);
    expect(editor.snapshot().sign.mirrored).toBe(true);
  });

  it("editing invalidates the compiled animation", async () => {
    const animation = { fps: 25, curves: [] };
    const recorder = manualTransport((call) =>
      call.path === "/compile"
        ? envelope({
            animation,
            report: { gloss: "X", status: "Automated", waypoint_status: [], failure_reasons: [], warnings: [] },
            diagnostics: [],
          })
        : envelope(ikResult("Converged")),
    );
    const editor = new Editor(new ApiClient("", recorder.transport), emptySign("X"), 0);
    await editor.compile();
    expect(editor.snapshot().animation).not.toBeNull();
    editor.retimeWaypoint(0, 0.5);
    expect(editor.snapshot().animation).toBeNull(); // stale compile dropped
  });
});
