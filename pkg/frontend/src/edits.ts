import type { BallEditPayload } from "./types.js";

export type Quat = [number, number, number, number]; // [w, x, y, z]

export function quatFromAxisAngle(axis: [number, number, number],
                                  angle: number): Quat {
  const n = Math.hypot(axis[0], axis[1], axis[2]);
  const h = angle / 2;
  const s = Math.sin(h) / n;
  return [Math.cos(h), axis[0] * s, axis[1] * s, axis[2] * s];
}

export function quatConj(q: Quat): Quat {
  return [q[0], -q[1], -q[2], -q[3]];
}

/**
 * Convert a cone edit gesture into the service's transformation payload.
 *
 * The user intent is "rotate the valid cone by `tilt` and scale its width
 * by `widthScale`"; the pose-space transformation acts inversely, so the
 * payload carries the reciprocal scale and the conjugate re-aim rotation.
 */
export function coneEditPayload(tilt: Quat, widthScale: number,
                                baseHash?: string): BallEditPayload {
  if (widthScale <= 0) throw new Error("width scale must be positive");
  const payload: BallEditPayload = {
    cone_scale: 1.0 / widthScale,
    cone_reaim: quatConj(tilt),
  };
  if (baseHash) payload.base_hash = baseHash;
  return payload;
}

/** Identity gesture: no tilt, unit width scale. */
export function identityEditPayload(): BallEditPayload {
  return coneEditPayload([1, 0, 0, 0], 1.0);
}

/**
 * The standard forward-tilt gesture: drag the cone `tiltDeg` degrees
 * toward +x (about the +y axis; a negative rotation tips the down-shaft
 * forward) and pinch its width by `widthScale`.
 */
export function forwardTiltGesture(tiltDeg: number, widthScale: number,
                                   baseHash?: string): BallEditPayload {
  const tilt = quatFromAxisAngle([0, 1, 0], -tiltDeg * Math.PI / 180);
  return coneEditPayload(tilt, widthScale, baseHash);
}
