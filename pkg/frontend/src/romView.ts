import type { GridPayload } from "./types.js";

/** Decode the run-length-encoded cells into a flat boolean array. */
export function decodeCells(payload: GridPayload): boolean[] {
  const total = payload.resolution.reduce((a, b) => a * b, 1);
  const cells = new Array<boolean>(total);
  let value = payload.first;
  let at = 0;
  for (const run of payload.runs) {
    for (let i = 0; i < run; i++) cells[at++] = value;
    value = !value;
  }
  if (at !== total) {
    throw new Error(`run lengths cover ${at} cells, expected ${total}`);
  }
  return cells;
}

export interface ConePatch {
  azimuth: number;        // radians, cell center
  polar: number;          // radians, cell center
  twistFraction: number;  // fraction of twist bins valid at this direction
  color: string;
}

/**
 * Yellow-to-red color over the twist-range fraction: yellow marks narrow
 * twist ranges, red wide ones.
 */
export function twistColor(fraction: number): string {
  const f = Math.min(1, Math.max(0, fraction));
  const green = Math.round(220 * (1 - f) + 30 * f);
  return `rgb(235, ${green}, 20)`;
}

/**
 * Collapse the (twist x azimuth x polar) grid into sphere-surface patches:
 * one patch per direction cell with at least one valid twist bin, colored
 * by the width of its valid twist range.
 */
export function buildConePatches(payload: GridPayload): ConePatch[] {
  if (payload.resolution.length !== 3) {
    throw new Error("cone view needs a ball-joint grid");
  }
  const [nt, naz, npol] = payload.resolution;
  const cells = decodeCells(payload);
  const patches: ConePatch[] = [];
  for (let j = 0; j < naz; j++) {
    for (let k = 0; k < npol; k++) {
      let count = 0;
      for (let i = 0; i < nt; i++) {
        if (cells[(i * naz + j) * npol + k]) count++;
      }
      if (count === 0) continue;
      const fraction = count / nt;
      patches.push({
        azimuth: ((j + 0.5) * 2 * Math.PI) / naz,
        polar: ((k + 0.5) * Math.PI) / npol,
        twistFraction: fraction,
        color: twistColor(fraction),
      });
    }
  }
  return patches;
}

/** Azimuthal equidistant projection of a patch onto the unit disk. */
export function projectPatch(p: ConePatch): { x: number; y: number } {
  const r = p.polar / Math.PI;
  return { x: r * Math.cos(p.azimuth), y: r * Math.sin(p.azimuth) };
}
