import type {
  BallEditPayload, CurvePayload, GridPayload, JobPayload, ModelSummary,
  ParamsDoc, TorquePayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

/** Thin JSON client for the retargeting service. */
export class ApiClient {
  constructor(private base: string,
              private fetchFn: FetchLike = (u, i) => fetch(u, i)) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.base}${path}`, init);
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      throw new ApiError(res.status,
        (body as { error?: string }).error ?? `HTTP ${res.status}`);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  getSummary(): Promise<ModelSummary> {
    return this.request<ModelSummary>("/model/summary");
  }

  putParams(params: ParamsDoc, baseHash?: string): Promise<{ hash: string }> {
    return this.request<{ hash: string }>("/model/params", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ params, base_hash: baseHash ?? null }),
    });
  }

  postEdit(joint: string, edit: BallEditPayload):
      Promise<{ edited_joints: string[]; hash: string }> {
    return this.post(`/rom/${joint}/edit`, edit);
  }

  postRetarget(body: { synthetic?: number; seed?: number;
                       report_joints?: string[]; base_hash?: string }):
      Promise<{ job_id: string; status: string }> {
    return this.post("/jobs/retarget", body);
  }

  getJob(jobId: string): Promise<JobPayload> {
    return this.request<JobPayload>(`/jobs/${jobId}`);
  }

  getGrid(joint: string, opts: { twist?: number; azimuth?: number;
          polar?: number; edited?: boolean } = {}): Promise<GridPayload> {
    const q = new URLSearchParams();
    if (opts.twist) q.set("twist", String(opts.twist));
    if (opts.azimuth) q.set("azimuth", String(opts.azimuth));
    if (opts.polar) q.set("polar", String(opts.polar));
    if (opts.edited) q.set("edited", "true");
    const qs = q.toString();
    return this.request<GridPayload>(
      `/rom/${joint}/grid${qs ? `?${qs}` : ""}`);
  }

  getLengthAngle(muscle: string, motion: string): Promise<CurvePayload> {
    return this.request<CurvePayload>(
      `/muscles/${muscle}/length-angle?motion=${encodeURIComponent(motion)}`);
  }

  getTorqueAngle(joint: string, motion: string): Promise<TorquePayload> {
    return this.request<TorquePayload>(
      `/joints/${joint}/torque-angle?motion=${encodeURIComponent(motion)}`);
  }
}
