/** Typed client for the authoring service.
 *
 * Every response arrives in an envelope carrying exactly one of `payload`
 * or `error`; this module unwraps it and raises ApiError on the latter so
 * callers never see a half-parsed body.
 */

import type {
  AnimationPayload,
  CompileResponse,
  IkResult,
  ModelDescription,
  Quat,
  SampleResponse,
  ServiceError,
  SignDoc,
  Vec3,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ServiceError,
  ) {
    super(`${detail.code}: ${detail.message}`);
  }
}

interface Envelope<T> {
  request_id: string;
  payload?: T;
  error?: ServiceError;
}

export type Transport = (path: string, init?: RequestInit) => Promise<Response>;

export interface IkQuery {
  target: { position: Vec3; orientation: Quat };
  weights?: number[];
  hand_state?: string;
  mirror?: boolean;
  seed?: number;
}

export interface SentenceQuery {
  glosses: string[];
  transition_frames?: number;
  lead_in_frames?: number;
  lead_out_frames?: number;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly transport: Transport = (path, init) => fetch(path, init),
  ) {}

  private async call<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    if (signal) {
      init.signal = signal;
    }
    const response = await this.transport(this.base + path, init);
    const envelope = (await response.json()) as Envelope<T>;
    if (envelope.error !== undefined) {
      throw new ApiError(response.status, envelope.error);
    }
    if (!response.ok || envelope.payload === undefined) {
      throw new ApiError(response.status, {
        code: "bad_envelope",
        message: `unexpected response for ${method} ${path}`,
      });
    }
    return envelope.payload;
  }

  model(): Promise<ModelDescription> {
    return this.call("GET", "/model");
  }

  ik(query: IkQuery, signal?: AbortSignal): Promise<IkResult> {
    return this.call("POST", "/ik", query, signal);
  }

  compile(sign: SignDoc): Promise<CompileResponse> {
    return this.call("POST", "/compile", sign);
  }

  sample(animation: AnimationPayload, fps?: number): Promise<SampleResponse> {
    return this.call("POST", "/sample", fps ? { animation, fps } : { animation });
  }

  /** Export the animation exactly as compiled; the service renders the bytes. */
  exportQanim(animation: AnimationPayload): Promise<string> {
    return this.call<{ qanim: string }>("POST", "/export", { animation }).then(
      (payload) => payload.qanim,
    );
  }

  listGlosses(): Promise<string[]> {
    return this.call<{ glosses: string[] }>("GET", "/lexicon").then((p) => p.glosses);
  }

  loadSign(gloss: string): Promise<SignDoc> {
    return this.call("GET", `/lexicon/${encodeURIComponent(gloss)}`);
  }

  saveSign(sign: SignDoc): Promise<SignDoc> {
    return this.call("PUT", `/lexicon/${encodeURIComponent(sign.gloss)}`, sign);
  }

  deleteSign(gloss: string): Promise<void> {
    return this.call("DELETE", `/lexicon/${encodeURIComponent(gloss)}`).then(() => undefined);
  }

  sentence(query: SentenceQuery): Promise<AnimationPayload> {
    return this.call<{ animation: AnimationPayload }>("POST", "/sentence", query).then(
      (p) => p.animation,
    );
  }
}
