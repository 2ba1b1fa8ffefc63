/** Thin typed client for the engine's HTTP API.  The fetch implementation is
 * injectable so tests can run against a scripted backend.
 */
import type { FieldError, JobState, ResultBundle, ScenarioDraft, TlTile } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown
  ) {
    super(`API error ${status}`);
  }

  fieldErrors(): FieldError[] {
    if (Array.isArray(this.detail)) {
      return this.detail.map((d) => ({
        loc: String((d as FieldError).loc ?? ""),
        msg: String((d as FieldError).msg ?? d),
      }));
    }
    return [];
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (u, i) => fetch(u, i)
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await res.json().catch(() => ({}));
    if (!res.ok) {
      throw new ApiError(res.status, (payload as { detail?: unknown }).detail ?? payload);
    }
    return payload as T;
  }

  async createScenario(draft: ScenarioDraft): Promise<string> {
    const out = await this.request<{ id: string }>("POST", "/scenarios", draft);
    return out.id;
  }

  async startOptimize(scenarioId: string): Promise<string> {
    const out = await this.request<{ job_id: string }>(
      "POST",
      `/scenarios/${scenarioId}/optimize`
    );
    return out.job_id;
  }

  jobState(jobId: string): Promise<JobState> {
    return this.request<JobState>("GET", `/jobs/${jobId}`);
  }

  result(scenarioId: string): Promise<ResultBundle> {
    return this.request<ResultBundle>("GET", `/scenarios/${scenarioId}/result`);
  }

  tlTile(scenarioId: string, srcLat: number, srcLon: number): Promise<TlTile> {
    return this.request<TlTile>(
      "GET",
      `/scenarios/${scenarioId}/tiles/tl?src_lat=${srcLat}&src_lon=${srcLon}`
    );
  }
}
