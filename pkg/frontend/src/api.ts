import type { MapPayload, SeriesPoint, SummaryPayload, TopicPayload } from "./types";

export type FetchLike = (url: string) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

declare global {
  interface Window {
    OATLAS_API_BASE?: string;
  }
}

/** Base URL resolution: runtime global first, then build-time env, then same origin. */
export function resolveApiBase(): string {
  if (typeof window !== "undefined" && window.OATLAS_API_BASE) {
    return window.OATLAS_API_BASE.replace(/\/$/, "");
  }
  const env = (import.meta as { env?: Record<string, string> }).env;
  if (env?.VITE_API_BASE) {
    return env.VITE_API_BASE.replace(/\/$/, "");
  }
  return "";
}

/** Typed client for the four read-only endpoints; the fetch is injectable so
 * every test runs against a recorded mock with no engine anywhere. */
export class ApiClient {
  constructor(
    private fetchFn: FetchLike,
    private base: string = "",
  ) {}

  readonly requested: string[] = [];

  private async get<T>(path: string, params: Record<string, string | undefined>): Promise<T> {
    const query = Object.entries(params)
      .filter(([, v]) => v !== undefined && v !== "")
      .map(([k, v]) => `${k}=${encodeURIComponent(v as string)}`)
      .join("&");
    const url = `${this.base}${path}${query ? `?${query}` : ""}`;
    this.requested.push(url);
    const resp = await this.fetchFn(url);
    const body = (await resp.json()) as T & { error?: string };
    if (!resp.ok) {
      throw new ApiError(resp.status, body?.error ?? `request failed (${resp.status})`);
    }
    return body;
  }

  summary(): Promise<SummaryPayload> {
    return this.get("/api/summary", {});
  }

  map(date: string): Promise<MapPayload> {
    return this.get("/api/map", { date });
  }

  topics(filters: {
    date?: string;
    sentiment?: string;
    country?: string;
    keyword?: string;
  }): Promise<TopicPayload[]> {
    return this.get("/api/topics", filters);
  }

  timeseries(filters: { country?: string; sentiment?: string }): Promise<SeriesPoint[]> {
    return this.get("/api/timeseries", filters);
  }
}
