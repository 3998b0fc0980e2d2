// Typed fetch client for the lifegrid service. All calls go through request()
// so API errors surface uniformly with their machine-readable code.

import {
  ApiErrorBody,
  DayMeta,
  DaySummary,
  FramePayload,
  Health,
  MapsInfo,
  Metric,
  NeighborsResponse,
  QueryResponse,
  SubmitResponse,
  TaskHints,
  Tile,
} from "./types.js";
import { WireQuery } from "./querymodel.js";
import { CanvasCells } from "./sketchmodel.js";

export class ApiError extends Error {
  constructor(readonly status: number, readonly body: ApiErrorBody) {
    super(`${body.code}: ${body.message}`);
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const data = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, data as ApiErrorBody);
    }
    return data as T;
  }

  health(): Promise<Health> {
    return this.request("GET", "/api/health");
  }

  maps(): Promise<MapsInfo> {
    return this.request("GET", "/api/maps");
  }

  tile(criterion: string, method: string, level: number,
       row0: number, col0: number, rows: number, cols: number): Promise<Tile> {
    const q = `row0=${row0}&col0=${col0}&rows=${rows}&cols=${cols}`;
    return this.request("GET",
      `/api/maps/${encodeURIComponent(criterion)}/${method}/levels/${level}?${q}`);
  }

  days(): Promise<string[]> {
    return this.request("GET", "/api/days");
  }

  daySummary(dayId: string, method?: string): Promise<DaySummary> {
    const q = method ? `?method=${method}` : "";
    return this.request("GET", `/api/days/${encodeURIComponent(dayId)}/summary${q}`);
  }

  dayMeta(dayId: string): Promise<DayMeta> {
    return this.request("GET", `/api/days/${encodeURIComponent(dayId)}/meta`);
  }

  frame(dayId: string, index: number): Promise<FramePayload> {
    return this.request("GET", `/api/days/${encodeURIComponent(dayId)}/frames/${index}`);
  }

  queryDsl(dsl: string, method?: string): Promise<QueryResponse> {
    return this.request("POST", "/api/query", method ? { dsl, method } : { dsl });
  }

  queryStructured(structured: WireQuery): Promise<QueryResponse> {
    return this.request("POST", "/api/query", { structured });
  }

  sketch(cells: CanvasCells, k: number, method?: string): Promise<NeighborsResponse> {
    const body: Record<string, unknown> = { cells, k };
    if (method) body.method = method;
    return this.request("POST", "/api/sketch", body);
  }

  similar(segmentId: number, metric: Metric, k: number): Promise<NeighborsResponse> {
    return this.request("GET", `/api/similar/${segmentId}?metric=${metric}&k=${k}`);
  }

  taskStart(taskId: string): Promise<{ task_id: string; duration_s: number }> {
    return this.request("POST", `/api/tasks/${encodeURIComponent(taskId)}/start`);
  }

  taskHints(taskId: string): Promise<TaskHints> {
    return this.request("GET", `/api/tasks/${encodeURIComponent(taskId)}/hints`);
  }

  taskSubmit(taskId: string, dayId: string, frameIndex: number): Promise<SubmitResponse> {
    return this.request("POST", `/api/tasks/${encodeURIComponent(taskId)}/submit`,
      { day_id: dayId, frame_index: frameIndex });
  }
}
