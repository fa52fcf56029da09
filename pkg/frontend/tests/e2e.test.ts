/**
 * End-to-end flow against the real Python service: slider change -> PUT
 * params -> retarget job -> progress reaches done -> cone and curve views
 * refresh to the new model hash; the edit gesture commits the exact
 * transformation payload.
 */
import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { forwardTiltGesture } from "../src/edits.js";
import { pollJob } from "../src/jobs.js";
import { buildConePatches } from "../src/romView.js";
import { initialState, onModelHash, paramsFromSliders,
         setSlider } from "../src/state.js";

const PORT = 8765 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;
let server: ChildProcess | null = null;

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

async function waitForServer(api: ApiClient, timeoutMs = 60_000) {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      return await api.getSummary();
    } catch (err) {
      lastError = err;
      await sleep(250);
    }
  }
  throw new Error(`service did not come up: ${lastError}`);
}

beforeAll(async () => {
  server = spawn("python3", [
    "-m", "myoretarget.service.cli", "serve",
    "--model", "../src/myoretarget/data/toy_reference.msk.json",
    "--synthetic-dataset", "250", "--seed", "42",
    "--host", "127.0.0.1", "--port", String(PORT),
  ], { cwd: new URL("..", import.meta.url).pathname, stdio: "ignore" });
  await waitForServer(new ApiClient(BASE));
}, 90_000);

afterAll(() => {
  server?.kill();
});

describe("editor end-to-end", () => {
  it("drives the full slider -> params -> retarget -> refresh loop",
     async () => {
    const api = new ApiClient(BASE);
    let state = initialState();
    const summary = await api.getSummary();
    state = onModelHash(state, summary.hash);
    expect(summary.muscles.length).toBeGreaterThan(20);

    // identity params keep the hash (idempotent loop)
    const identity = await api.putParams(paramsFromSliders(state.sliders),
                                         state.modelHash!);
    expect(identity.hash).toBe(summary.hash);

    // slider change -> PUT params -> hash moves
    state = setSlider(state, "bone.femur.elongate", 1.2);
    const changed = await api.putParams(paramsFromSliders(state.sliders),
                                        state.modelHash!);
    expect(changed.hash).not.toBe(summary.hash);
    state = onModelHash(state, changed.hash);

    // commit the standard cone edit gesture; the payload carries the
    // transformation exactly (reciprocal scale, conjugate re-aim)
    const editPayload = forwardTiltGesture(30, 0.63, state.modelHash!);
    expect(editPayload.cone_scale).toBeCloseTo(1 / 0.63, 12);
    const half = (-30 * Math.PI) / 180 / 2;
    expect(editPayload.cone_reaim[0]).toBeCloseTo(Math.cos(half), 12);
    expect(editPayload.cone_reaim[1]).toBeCloseTo(0, 12);
    expect(editPayload.cone_reaim[2]).toBeCloseTo(-Math.sin(half), 12);
    expect(editPayload.cone_reaim[3]).toBeCloseTo(0, 12);
    const edit = await api.postEdit("femur_l", editPayload);
    expect(edit.edited_joints).toContain("femur_l");

    // launch the retarget job and poll to completion
    const job = await api.postRetarget({ synthetic: 250, seed: 42 });
    const progressSeen: number[] = [];
    const done = await pollJob(api, job.job_id, {
      intervalMs: 400,
      timeoutMs: 240_000,
      onProgress: (j) => progressSeen.push(j.progress),
    });
    expect(done.status).toBe("done");
    expect(done.progress).toBe(1);
    expect(progressSeen.every((p, i, a) => i === 0 || p >= a[i - 1]))
      .toBe(true);

    // views refresh to the new model hash
    const after = await api.getSummary();
    expect(after.hash).toBe(done.result!.model_hash);
    state = onModelHash(state, after.hash);
    expect(state.pendingEdit).toBeNull();

    const grid = await api.getGrid("femur_l",
                                   { twist: 6, azimuth: 8, polar: 8 });
    expect(grid.model_hash).toBe(after.hash);
    expect(buildConePatches(grid).length).toBeGreaterThan(0);

    const curve = await api.getLengthAngle("hamstring_l", "knee_flexion_l");
    expect(curve.model_hash).toBe(after.hash);
    expect(curve.lengths).toHaveLength(21);

    // the committed edit shows up in the report's grid errors
    const report = done.result!.report as {
      grid_errors: Record<string, number>;
    };
    expect(Object.keys(report.grid_errors)).toContain("femur_l");
  }, 300_000);
});
