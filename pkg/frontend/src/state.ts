import type { BallEditPayload, ParamsDoc } from "./types.js";

export interface SliderDef {
  id: string;          // e.g. "bone.femur.elongate"
  label: string;
  min: number;
  max: number;
  initial: number;
}

export const SLIDER_DEFS: SliderDef[] = [
  ...["femur", "tibia", "humerus", "ulna"].flatMap((bone) => [
    { id: `bone.${bone}.elongate`, label: `${bone} elongate`,
      min: 0.5, max: 2.5, initial: 1.0 },
    { id: `bone.${bone}.torsion_deg`, label: `${bone} torsion (deg)`,
      min: -30, max: 30, initial: 0.0 },
    { id: `bone.${bone}.mass`, label: `${bone} mass`,
      min: 0.5, max: 2.5, initial: 1.0 },
  ]),
  { id: "trunk.elongate", label: "trunk elongate", min: 0.5, max: 2.5,
    initial: 1.0 },
  { id: "trunk.expand", label: "trunk expand", min: 0.5, max: 2.5,
    initial: 1.0 },
  { id: "trunk.mass", label: "trunk mass", min: 0.5, max: 2.5, initial: 1.0 },
  { id: "global.scale", label: "global scale L", min: 0.5, max: 2.0,
    initial: 1.0 },
];

export interface ViewState {
  modelHash: string | null;
  selectedJoint: string;
  selectedMuscle: string | null;
  selectedMotion: string | null;
  sliders: Record<string, number>;
  pendingEdit: { joint: string; payload: BallEditPayload } | null;
  jobProgress: number | null;
}

export function initialState(): ViewState {
  const sliders: Record<string, number> = {};
  for (const def of SLIDER_DEFS) sliders[def.id] = def.initial;
  return {
    modelHash: null,
    selectedJoint: "femur_l",
    selectedMuscle: null,
    selectedMotion: null,
    sliders,
    pendingEdit: null,
    jobProgress: null,
  };
}

/** Clamp a slider value into its configured bounds. */
export function setSlider(state: ViewState, id: string,
                          value: number): ViewState {
  const def = SLIDER_DEFS.find((d) => d.id === id);
  if (!def) throw new Error(`unknown slider ${id}`);
  const clamped = Math.min(def.max, Math.max(def.min, value));
  return { ...state, sliders: { ...state.sliders, [id]: clamped } };
}

/**
 * Record a new server model hash. A pending (uncommitted) edit is
 * discarded whenever the hash changes under it.
 */
export function onModelHash(state: ViewState, hash: string): ViewState {
  const pendingEdit = state.modelHash === hash ? state.pendingEdit : null;
  return { ...state, modelHash: hash, pendingEdit };
}

/**
 * Build the params document for PUT /model/params from slider values;
 * entries at their defaults are omitted so the identity stays identity.
 */
export function paramsFromSliders(
    sliders: Record<string, number>): ParamsDoc {
  const doc: ParamsDoc = {};
  for (const def of SLIDER_DEFS) {
    const value = sliders[def.id] ?? def.initial;
    if (value === def.initial) continue;
    const parts = def.id.split(".");
    const key = parts[parts.length - 1];
    const section = parts.slice(0, -1).join(".");
    (doc[section] ??= {})[key] = value;
  }
  return doc;
}
