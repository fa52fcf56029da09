import type { ApiClient } from "./api.js";
import type { JobPayload } from "./types.js";

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

/**
 * Poll a job until it reaches a terminal state. Resolves with the done
 * record, rejects on failure or when the deadline passes. Progress is
 * reported through the optional callback.
 */
export async function pollJob(
    api: Pick<ApiClient, "getJob">, jobId: string,
    opts: { intervalMs?: number; timeoutMs?: number;
            onProgress?: (job: JobPayload) => void } = {}):
    Promise<JobPayload> {
  const interval = opts.intervalMs ?? 500;
  const deadline = Date.now() + (opts.timeoutMs ?? 300_000);
  let last = -1;
  while (Date.now() < deadline) {
    const job = await api.getJob(jobId);
    if (job.progress < last) {
      throw new Error(`job ${jobId} progress went backwards`);
    }
    last = job.progress;
    opts.onProgress?.(job);
    if (job.status === "done") return job;
    if (job.status === "failed") {
      throw new Error(job.error ?? `job ${jobId} failed`);
    }
    await sleep(interval);
  }
  throw new Error(`job ${jobId} did not finish before the deadline`);
}
