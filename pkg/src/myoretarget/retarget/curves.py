"""Length-angle curves, their characteristic parameters, and functional
disorder rates between models."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..anatomy import (BodyModel, JointMotion, ModelError, Pose, PoseBatch,
                       muscle_lengths_batch)
from ..dynamics.jacobians import motion_pose, parabolic_peak


class CurveClass(enum.Enum):
    AGONIST = "agonist"            # monotone decreasing length-angle curve
    ANTAGONIST = "antagonist"      # monotone increasing
    NON_MONOTONIC = "non_monotonic"


@dataclass(frozen=True)
class CurveCharacteristics:
    theta_max: float              # normalized angle of the curve maximum
    theta_min: float
    delta: float                  # length span max - min (m)
    classification: CurveClass


@dataclass
class LengthAngleCurve:
    muscle_id: str
    motion: JointMotion
    thetas: np.ndarray
    lengths: np.ndarray

    @property
    def characteristics(self) -> CurveCharacteristics:
        return characterize(self.thetas, self.lengths)


def characterize(thetas: np.ndarray, lengths: np.ndarray,
                 flat_tol: float = 1e-9) -> CurveCharacteristics:
    lengths = np.asarray(lengths, dtype=float)
    delta = float(lengths.max() - lengths.min())
    tol = flat_tol * max(1.0, float(np.abs(lengths).max()))
    diffs = np.diff(lengths)
    if delta <= tol:
        cls = CurveClass.NON_MONOTONIC  # functionally insignificant
    elif np.all(diffs <= tol):
        cls = CurveClass.AGONIST
    elif np.all(diffs >= -tol):
        cls = CurveClass.ANTAGONIST
    else:
        cls = CurveClass.NON_MONOTONIC
    theta_max = parabolic_peak(thetas, lengths)
    theta_min = parabolic_peak(thetas, -lengths)
    return CurveCharacteristics(theta_max, theta_min, delta, cls)


def motion_pose_batch(model: BodyModel, motion: JointMotion, thetas: np.ndarray,
                      conditioning_pose: Pose | None = None) -> PoseBatch:
    poses = [motion_pose(model, motion, float(t), conditioning_pose)
             for t in thetas]
    return PoseBatch.from_poses(model.skeleton, poses)


def length_angle_curve(model: BodyModel, muscle_id: str, motion: JointMotion,
                       samples: int = 21,
                       conditioning_pose: Pose | None = None) -> LengthAngleCurve:
    """Musculotendon length over the motion's normalized angle range, all
    other joints held at the conditioning pose."""
    m = model.muscle(muscle_id)
    if not any(jm.name == motion.name for jm in m.joint_motions):
        raise ModelError(
            f"motion {motion.name!r} is not registered on muscle {muscle_id!r}")
    thetas = np.linspace(0.0, 1.0, samples)
    batch = motion_pose_batch(model, motion, thetas, conditioning_pose)
    lengths = muscle_lengths_batch(model, batch, [m])[:, 0]
    return LengthAngleCurve(muscle_id, motion, thetas, lengths)


def functional_disorder_rate(reference: BodyModel, target: BodyModel,
                             motions: list[JointMotion] | None = None,
                             samples: int = 21,
                             slope_tol: float = 1e-7) -> float:
    """Percentage of (muscle, motion, theta-interval) samples whose
    length-angle slope sign flips between the two models."""
    if motions is None:
        motions = reference.all_motions()
    thetas = np.linspace(0.0, 1.0, samples)
    flips = 0
    total = 0
    for motion in motions:
        ref_batch = motion_pose_batch(reference, motion, thetas)
        tgt_batch = motion_pose_batch(target, motion, thetas)
        muscles = [m for m in reference.muscles
                   if any(jm.name == motion.name for jm in m.joint_motions)
                   and m.id in target.muscle_index]
        if not muscles:
            continue
        tgt_muscles = [target.muscle(m.id) for m in muscles]
        ref_len = muscle_lengths_batch(reference, ref_batch, muscles)
        tgt_len = muscle_lengths_batch(target, tgt_batch, tgt_muscles)
        ref_slope = np.diff(ref_len, axis=0)
        tgt_slope = np.diff(tgt_len, axis=0)
        significant = (np.abs(ref_slope) > slope_tol) | (np.abs(tgt_slope) > slope_tol)
        flips += int(np.sum((ref_slope * tgt_slope < 0) & significant))
        total += int(significant.size)
    return 100.0 * flips / total if total else 0.0
