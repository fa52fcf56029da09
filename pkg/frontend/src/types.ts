/** JSON payload shapes of the retargeting service. */

export interface ModelSummary {
  hash: string;
  bones: string[];
  muscles: string[];
  motions: string[];
  dof_count: number;
}

export interface GridPayload {
  joint: string;
  resolution: number[];
  frame: number[];
  first: boolean;
  runs: number[];
  true_count: number;
  model_hash: string;
}

export interface BallEditPayload {
  base_hash?: string;
  twist_scale?: number;
  twist_shift?: number;
  twist_center?: number;
  cone_scale: number;
  cone_reaim: [number, number, number, number];
  cone_center?: [number, number, number];
}

export interface CurvePayload {
  muscle: string;
  motion: string;
  model_hash: string;
  thetas: number[];
  lengths: number[];
  reference_lengths: number[];
  characteristics: {
    theta_max: number;
    theta_min: number;
    delta: number;
    classification: string;
  };
}

export interface TorquePayload {
  joint: string;
  motion: string;
  model_hash: string;
  thetas: number[];
  torques: number[];
  peak_theta: number;
  flat: boolean;
}

export interface JobPayload {
  id: string;
  kind: string;
  status: "queued" | "running" | "done" | "failed";
  progress: number;
  message: string;
  result: { model_hash: string; report: Record<string, unknown> } | null;
  error: string | null;
}

export type ParamsDoc = Record<string, Record<string, number | boolean>>;
