/** Stubbed service fixtures shared by the view tests. */

import { vi } from "vitest";

export const N_ROWS = 22;

export function designBuild() {
  return {
    clearance: Array(N_ROWS).fill(1.0),
    roughness: Array(N_ROWS).fill(1.6),
  };
}

export function overall(deltas = { mdot_pct: 0, pr_pct: 0, eta_p_pts: 0 }) {
  return { mdot: 60.3, pr: 11.0, eta_p: 0.8796, deltas };
}

export function stages(etaShift = 0) {
  return Array.from({ length: 10 }, (_, i) => ({
    stage: i + 1,
    pr: 1.5 - 0.02 * i,
    eta_p: 0.885 - 0.001 * i + etaShift,
    delta_pr_pct: 0,
    delta_eta_p_pts: etaShift * 100,
  }));
}

export function baselineResponse() {
  return {
    model_id: "stub-model",
    build: designBuild(),
    overall: overall(),
    stages: stages(),
  };
}

export function predictResponse(extra: Record<string, unknown> = {}) {
  return {
    model_id: "stub-model",
    latency_ms: 12.5,
    overall: overall(),
    stages: stages(),
    ...extra,
  };
}

export function encodeContour(values: number[]): string {
  const arr = new Float32Array(values);
  const bytes = new Uint8Array(arr.buffer);
  let raw = "";
  for (const b of bytes) raw += String.fromCharCode(b);
  return btoa(raw);
}

type Handler = (url: string, body: unknown) => { status: number; json: unknown };

/** Install a fetch stub; returns the list of recorded calls. */
export function stubFetch(handler: Handler) {
  const calls: { url: string; body: unknown }[] = [];
  globalThis.fetch = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    calls.push({ url, body });
    const result = handler(url, body);
    return {
      ok: result.status >= 200 && result.status < 300,
      status: result.status,
      statusText: String(result.status),
      json: async () => result.json,
    } as Response;
  }) as typeof fetch;
  return calls;
}
