// Thin fetch client for the lifecycle endpoints. Errors carry the server's
// `detail` string so the UI can surface rejections inline.

import {
  ModelInfo,
  PlotData,
  SessionInfo,
  parseModelList,
  parsePlotData,
  parseSessionInfo,
} from "./wire";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export interface CreateBody {
  model: string;
  overrides?: Record<string, unknown>;
  seed?: number;
  frames?: number;
  step_delay_ms?: number;
}

async function call(url: string, init?: RequestInit): Promise<unknown> {
  const res = await fetch(url, init);
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = (await res.json()) as { detail?: unknown };
      if (body && body.detail !== undefined) detail = String(body.detail);
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return res.json();
}

function post(url: string, body?: unknown): Promise<unknown> {
  return call(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: body === undefined ? "{}" : JSON.stringify(body),
  });
}

export class Client {
  /** base "" means same-origin relative requests (the served bundle). */
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async models(): Promise<ModelInfo[]> {
    return parseModelList(await call(this.url("/api/models")));
  }

  async createSession(body: CreateBody): Promise<SessionInfo> {
    return parseSessionInfo(await post(this.url("/api/sessions"), body));
  }

  async sessionInfo(sid: string): Promise<SessionInfo> {
    return parseSessionInfo(await call(this.url(`/api/sessions/${sid}`)));
  }

  async setParams(
    sid: string,
    params: Record<string, number>,
  ): Promise<{ accepted: Record<string, number>; staged: Record<string, number> }> {
    const out = await post(this.url(`/api/sessions/${sid}/params`), { params });
    return out as { accepted: Record<string, number>; staged: Record<string, number> };
  }

  run(sid: string, frames?: number): Promise<unknown> {
    return post(this.url(`/api/sessions/${sid}/run`), frames === undefined ? {} : { frames });
  }

  pause(sid: string): Promise<unknown> {
    return post(this.url(`/api/sessions/${sid}/pause`));
  }

  async reset(sid: string): Promise<SessionInfo> {
    return parseSessionInfo(await post(this.url(`/api/sessions/${sid}/reset`)));
  }

  async plotData(sid: string): Promise<PlotData> {
    return parsePlotData(await call(this.url(`/api/sessions/${sid}/plotdata`)));
  }

  /** ws:// URL of a session's push channel, derived from the API base. */
  streamUrl(sid: string): string {
    const path = `/api/sessions/${sid}/stream`;
    const root = this.base !== "" ? this.base : window.location.origin;
    return root.replace(/^http/, "ws") + path;
  }
}
