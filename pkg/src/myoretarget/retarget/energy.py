"""Waypoint-routing energies: force-direction preservation and
length-angle curve preservation.

The direction term integrates the squared cross product between the
normalized segment directions of the reference and retargeted polylines
over each registered joint motion; the length term compares the curve
characteristics (angle of max, angle of min, span). Bone transforms do
not depend on waypoint coordinates, so the evaluator caches them per
motion sample and energy evaluations reduce to small LBS blends.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..anatomy import BodyModel, MusculotendonUnit, Pose
from .curves import (CurveCharacteristics, characterize, motion_pose_batch)
from ..anatomy.kinematics import bone_world_transforms_batch

DEFAULT_W_LENGTH = 10.0
DEFAULT_W_DELTA = 50.0
DEFAULT_THETA_SAMPLES = 21


def segment_directions(points: np.ndarray) -> np.ndarray:
    """(B, n_wp, 3) waypoint tracks -> (B, n_seg, 3) unit directions;
    zero-length segments yield zero vectors (skipped by the energy)."""
    seg = np.diff(points, axis=1)
    norm = np.linalg.norm(seg, axis=2, keepdims=True)
    return np.divide(seg, norm, out=np.zeros_like(seg), where=norm > 1e-12)


_trapz = getattr(np, "trapezoid", np.trapz)


def _trapezoid(values: np.ndarray, thetas: np.ndarray) -> float:
    return float(_trapz(values, thetas))


@dataclass
class _MotionCache:
    thetas: np.ndarray
    transforms: dict[str, np.ndarray]        # per-bone (B, 4, 4)
    ref_dirs: np.ndarray                     # (B, n_seg, 3)
    ref_chars: CurveCharacteristics


class MuscleEnergyEvaluator:
    """Evaluates E_direction + w_l * E_length for one muscle against the
    reference model, as a function of the flattened local coordinates of
    its skinning entries."""

    def __init__(self, reference: BodyModel, target: BodyModel, muscle_id: str,
                 w_length: float = DEFAULT_W_LENGTH,
                 w_delta: float = DEFAULT_W_DELTA,
                 samples: int = DEFAULT_THETA_SAMPLES,
                 conditioning_pose: Pose | None = None):
        self.reference = reference
        self.target = target
        self.ref_muscle = reference.muscle(muscle_id)
        self.tgt_muscle = target.muscle(muscle_id)
        self.w_length = w_length
        self.w_delta = w_delta
        self._entry_layout = [
            (wi, ei) for wi, wp in enumerate(self.tgt_muscle.waypoints)
            for ei in range(len(wp.skinning))]
        thetas = np.linspace(0.0, 1.0, samples)
        self.motions: list[_MotionCache] = []
        for motion in self.ref_muscle.joint_motions:
            ref_batch = motion_pose_batch(reference, motion, thetas, conditioning_pose)
            tgt_batch = motion_pose_batch(target, motion, thetas, conditioning_pose)
            ref_tf = bone_world_transforms_batch(reference.skeleton, ref_batch)
            tgt_tf = bone_world_transforms_batch(target.skeleton, tgt_batch)
            ref_pts = _muscle_points(self.ref_muscle, ref_tf, samples)
            ref_lengths = np.linalg.norm(np.diff(ref_pts, axis=1), axis=2).sum(axis=1)
            self.motions.append(_MotionCache(
                thetas=thetas,
                transforms=tgt_tf,
                ref_dirs=segment_directions(ref_pts),
                ref_chars=characterize(thetas, ref_lengths)))

    # -- coordinate vector packing ----------------------------------------

    def pack(self, muscle: MusculotendonUnit) -> np.ndarray:
        return np.concatenate([
            muscle.waypoints[wi].skinning[ei].local_coords
            for wi, ei in self._entry_layout])

    def unpack(self, x: np.ndarray) -> MusculotendonUnit:
        from ..anatomy import SkinEntry, Waypoint
        coords = x.reshape(-1, 3)
        wps = []
        k = 0
        for wp in self.tgt_muscle.waypoints:
            entries = []
            for e in wp.skinning:
                entries.append(SkinEntry(e.bone_id, e.weight, coords[k]))
                k += 1
            wps.append(Waypoint(tuple(entries)))
        return self.tgt_muscle.with_waypoints(wps)

    # -- energies ----------------------------------------------------------

    def _points(self, muscle: MusculotendonUnit, cache: _MotionCache) -> np.ndarray:
        return _muscle_points(muscle, cache.transforms, cache.thetas.size)

    def energies(self, muscle: MusculotendonUnit) -> tuple[float, float]:
        e_dir = 0.0
        e_len = 0.0
        for cache in self.motions:
            pts = self._points(muscle, cache)
            dirs = segment_directions(pts)
            cross = np.cross(cache.ref_dirs, dirs)
            e_dir += _trapezoid(np.sum(cross ** 2, axis=(1, 2)), cache.thetas)
            lengths = np.linalg.norm(np.diff(pts, axis=1), axis=2).sum(axis=1)
            chars = characterize(cache.thetas, lengths)
            ref = cache.ref_chars
            e_len += ((ref.theta_max - chars.theta_max) ** 2
                      + (ref.theta_min - chars.theta_min) ** 2
                      + self.w_delta * (ref.delta - chars.delta) ** 2)
        return e_dir, e_len

    def total(self, x: np.ndarray) -> float:
        e_dir, e_len = self.energies(self.unpack(x))
        return e_dir + self.w_length * e_len


def _muscle_points(muscle: MusculotendonUnit, transforms: dict[str, np.ndarray],
                   batch_size: int) -> np.ndarray:
    pts = np.zeros((batch_size, len(muscle.waypoints), 3))
    for wi, wp in enumerate(muscle.waypoints):
        for e in wp.skinning:
            t = transforms[e.bone_id]
            pts[:, wi, :] += e.weight * (
                np.einsum("bij,j->bi", t[:, :3, :3], e.local_coords) + t[:, :3, 3])
    return pts


def direction_energy(muscle_id: str, reference: BodyModel, target: BodyModel,
                     samples: int = DEFAULT_THETA_SAMPLES) -> float:
    """Integrated squared cross product of reference vs target segment
    force directions over the muscle's registered motions."""
    ev = MuscleEnergyEvaluator(reference, target, muscle_id, samples=samples)
    e_dir, _ = ev.energies(target.muscle(muscle_id))
    return e_dir


def length_energy(reference_chars: list[CurveCharacteristics],
                  target_chars: list[CurveCharacteristics],
                  w_delta: float = DEFAULT_W_DELTA) -> float:
    """Characteristic mismatch summed over motions."""
    total = 0.0
    for ref, tgt in zip(reference_chars, target_chars):
        total += ((ref.theta_max - tgt.theta_max) ** 2
                  + (ref.theta_min - tgt.theta_min) ** 2
                  + w_delta * (ref.delta - tgt.delta) ** 2)
    return total
