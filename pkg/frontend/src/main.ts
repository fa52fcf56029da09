/** Browser entry point: wires sliders, the ROM cone view, curve plots,
 * edits, and the retarget job launcher to the service. */
import { ApiClient } from "./api.js";
import { buildPlot, curveCsv } from "./curves.js";
import { forwardTiltGesture } from "./edits.js";
import { pollJob } from "./jobs.js";
import { buildConePatches, projectPatch } from "./romView.js";
import {
  SLIDER_DEFS, ViewState, initialState, onModelHash, paramsFromSliders,
  setSlider,
} from "./state.js";

const api = new ApiClient("");
let state: ViewState = initialState();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function setStatus(text: string): void {
  $("status").textContent = text;
}

async function refreshModel(): Promise<void> {
  const summary = await api.getSummary();
  state = onModelHash(state, summary.hash);
  $("model-hash").textContent = summary.hash;
  const muscleSel = $("muscle-select") as HTMLSelectElement;
  if (muscleSel.options.length === 0) {
    for (const m of summary.muscles) {
      muscleSel.add(new Option(m, m));
    }
    for (const mo of summary.motions) {
      ($("motion-select") as HTMLSelectElement).add(new Option(mo, mo));
    }
  }
  await Promise.all([drawCone(), drawCurves()]);
}

async function drawCone(): Promise<void> {
  const canvas = $("cone-canvas") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const grid = await api.getGrid(state.selectedJoint,
                                 { twist: 18, azimuth: 36, polar: 36 });
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const r = Math.min(canvas.width, canvas.height) / 2 - 4;
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.stroke();
  const cell = (2 * Math.PI * r) / 72;
  for (const patch of buildConePatches(grid)) {
    const p = projectPatch(patch);
    ctx.fillStyle = patch.color;
    ctx.fillRect(cx + p.x * r - cell / 2, cy + p.y * r - cell / 2, cell, cell);
  }
  $("cone-meta").textContent =
    `${grid.joint}: ${grid.true_count} valid cells (model ${grid.model_hash})`;
}

async function drawCurves(): Promise<void> {
  const muscle = (($("muscle-select") as HTMLSelectElement).value
                  || state.selectedMuscle);
  const motion = (($("motion-select") as HTMLSelectElement).value
                  || state.selectedMotion);
  if (!muscle || !motion) return;
  let payload;
  try {
    payload = await api.getLengthAngle(muscle, motion);
  } catch {
    return; // motion not registered on this muscle
  }
  const plot = buildPlot([
    { label: "reference", thetas: payload.thetas,
      values: payload.reference_lengths },
    { label: "current", thetas: payload.thetas, values: payload.lengths },
  ]);
  const canvas = $("curve-canvas") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const colors = ["#4477aa", "#cc3311"];
  plot.series.forEach((s, si) => {
    ctx.strokeStyle = colors[si % colors.length];
    ctx.beginPath();
    s.points.forEach((pt, i) => {
      const x = 8 + pt.x * (canvas.width - 16);
      const y = canvas.height - 8 - pt.y * (canvas.height - 16);
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
  });
  $("curve-meta").textContent =
    `${muscle} / ${motion}: ${payload.characteristics.classification}`;
  const csv = curveCsv([
    { label: "reference", thetas: payload.thetas,
      values: payload.reference_lengths },
    { label: "current", thetas: payload.thetas, values: payload.lengths },
  ]);
  ($("csv-link") as HTMLAnchorElement).href =
    `data:text/csv;charset=utf-8,${encodeURIComponent(csv)}`;
}

async function applyParams(): Promise<void> {
  setStatus("applying parameters...");
  const res = await api.putParams(paramsFromSliders(state.sliders),
                                  state.modelHash ?? undefined);
  state = onModelHash(state, res.hash);
  setStatus(`parameters applied (${res.hash})`);
  await refreshModel();
}

async function commitEdit(): Promise<void> {
  const tilt = Number(($("edit-tilt") as HTMLInputElement).value);
  const scale = Number(($("edit-scale") as HTMLInputElement).value);
  const payload = forwardTiltGesture(tilt, scale,
                                     state.modelHash ?? undefined);
  state = { ...state,
            pendingEdit: { joint: state.selectedJoint, payload } };
  await api.postEdit(state.selectedJoint, payload);
  setStatus(`edit committed on ${state.selectedJoint}`);
}

async function runRetarget(): Promise<void> {
  setStatus("starting retarget job...");
  const res = await api.postRetarget({ synthetic: 1500, seed: 42 });
  const bar = $("progress") as HTMLProgressElement;
  const job = await pollJob(api, res.job_id, {
    onProgress: (j) => {
      bar.value = j.progress;
      setStatus(`retarget ${j.status}: ${j.message}`);
    },
  });
  setStatus(`retarget done -> model ${job.result?.model_hash}`);
  await refreshModel();
}

function buildSliders(): void {
  const host = $("sliders");
  for (const def of SLIDER_DEFS) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const span = document.createElement("span");
    span.textContent = def.label;
    const input = document.createElement("input");
    input.type = "range";
    input.min = String(def.min);
    input.max = String(def.max);
    input.step = "0.01";
    input.value = String(def.initial);
    input.addEventListener("input", () => {
      state = setSlider(state, def.id, Number(input.value));
      value.textContent = Number(input.value).toFixed(2);
    });
    const value = document.createElement("code");
    value.textContent = def.initial.toFixed(2);
    row.append(span, input, value);
    host.append(row);
  }
}

export function start(): void {
  buildSliders();
  $("apply-params").addEventListener("click", () => void applyParams());
  $("commit-edit").addEventListener("click", () => void commitEdit());
  $("run-retarget").addEventListener("click", () => void runRetarget());
  $("muscle-select").addEventListener("change", () => void drawCurves());
  $("motion-select").addEventListener("change", () => void drawCurves());
  void refreshModel();
}

if (typeof document !== "undefined" && document.getElementById("sliders")) {
  start();
}
