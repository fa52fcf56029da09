"""Fiber-tendon ratio optimization (retargeting stage three).

Adjusts each muscle's tendon-to-fiber ratio, within a relative bound of
its original value, so that every joint motion's angle of peak net torque
matches the reference model. The passive stretch limit set in stage two
is held fixed per muscle: changing the ratio only re-splits the rest
lengths, so the validity function is untouched.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..anatomy import (BodyModel, JointMotion, Pose, bone_world_transforms,
                       muscle_crosses_joint, muscle_stretch_limit,
                       musculotendon_length)
from ..anatomy.equilibrium import fiber_equilibrium_params_batch, split_for_limit
from ..dynamics.jacobians import dof_axes, muscle_jacobian, parabolic_peak
from .descent import DescentConfig, gradient_descent
from .curves import motion_pose_batch

DEFAULT_RATIO_BOUND = 0.30


@dataclass
class RatioOptConfig:
    bound: float = DEFAULT_RATIO_BOUND
    samples: int = 21
    max_iters: int = 40
    fd_step: float = 1e-3
    flat_tol: float = 1e-9


@dataclass
class RatioOptResult:
    trace: list[float] = field(default_factory=list)
    converged: bool = True
    peaks_before: dict[str, float] = field(default_factory=dict)
    peaks_after: dict[str, float] = field(default_factory=dict)
    reference_peaks: dict[str, float] = field(default_factory=dict)
    flat_motions: list[str] = field(default_factory=list)


class _MotionTorque:
    """Cached torque-angle evaluation for one motion: waypoint geometry
    (lengths and moment contributions) is activation- and ratio-free, so
    only the scalar tension solves rerun per energy evaluation."""

    def __init__(self, model: BodyModel, motion: JointMotion, samples: int,
                 conditioning_pose: Pose | None):
        self.motion = motion
        self.thetas = np.linspace(0.0, 1.0, samples)
        skeleton = model.skeleton
        self.muscle_ids = [m.id for m in model.muscles
                           if muscle_crosses_joint(m, skeleton, motion.joint_id)]
        self.activation = {
            mid: 1.0 if any(jm.name == motion.name
                            for jm in model.muscle(mid).joint_motions) else 0.0
            for mid in self.muscle_ids}
        batch = motion_pose_batch(model, motion, self.thetas, conditioning_pose)
        n = len(self.thetas)
        self.lengths = np.zeros((len(self.muscle_ids), n))
        self.moments = np.zeros((len(self.muscle_ids), n))
        bone = skeleton.bone(motion.joint_id)
        axis = motion.axis / np.linalg.norm(motion.axis)
        sl = skeleton.dof_slices[motion.joint_id]
        for ti in range(n):
            pose = batch.pose(ti)
            transforms = bone_world_transforms(skeleton, pose)
            axes = dof_axes(skeleton, pose, transforms)
            for mi, mid in enumerate(self.muscle_ids):
                m = model.muscle(mid)
                self.lengths[mi, ti] = musculotendon_length(m, skeleton, pose,
                                                            transforms)
                jac = muscle_jacobian(model, mid, pose, transforms, axes)
                if bone.joint_type == "revolute":
                    jaxis = bone.joint_axis / np.linalg.norm(bone.joint_axis)
                    self.moments[mi, ti] = jac[sl][0] * float(np.dot(axis, jaxis))
                else:
                    self.moments[mi, ti] = float(jac[sl] @ axis)

    def torque(self, model: BodyModel) -> np.ndarray:
        # tension rows are cached by (l_m0, l_t0); ratio-perturbation FD
        # then re-solves only the muscle that changed
        n = len(self.muscle_ids)
        if not hasattr(self, "_tension_cache"):
            self._tension_cache = {}
        tensions = np.zeros((n, self.thetas.size))
        stale = []
        for mi, mid in enumerate(self.muscle_ids):
            m = model.muscle(mid)
            key = (m.l_m0, m.l_t0, m.f_max)
            hit = self._tension_cache.get(mid)
            if hit is not None and hit[0] == key:
                tensions[mi] = hit[1]
            else:
                stale.append((mi, m, key))
        if stale:
            l_mt = np.stack([self.lengths[mi] for mi, _, _ in stale])
            res = fiber_equilibrium_params_batch(
                model.curves, l_mt,
                a=np.array([[self.activation[m.id]] for _, m, _ in stale]),
                l_m0=np.array([[m.l_m0] for _, m, _ in stale]),
                l_t0=np.array([[m.l_t0] for _, m, _ in stale]),
                pennation=np.array([[m.pennation] for _, m, _ in stale]),
                f_max=np.array([[m.f_max] for _, m, _ in stale]))
            for row, (mi, m, key) in enumerate(stale):
                tensions[mi] = res[row, :, 2]
                self._tension_cache[m.id] = (key, tensions[mi])
        return np.einsum("mt,mt->t", self.moments, tensions)

    def peak(self, model: BodyModel, flat_tol: float) -> tuple[float, bool]:
        tau = self.torque(model)
        spread = float(tau.max() - tau.min())
        if spread < flat_tol * max(1.0, float(np.abs(tau).max())):
            return float(self.thetas[0]), True
        return parabolic_peak(self.thetas, tau), False


def torque_peaks(model: BodyModel, motions: list[JointMotion] | None = None,
                 samples: int = 21, conditioning_pose: Pose | None = None,
                 flat_tol: float = 1e-9) -> tuple[dict[str, float], list[str]]:
    """Angle of peak net torque per motion, with flat-curve flags."""
    motions = motions if motions is not None else model.all_motions()
    peaks = {}
    flats = []
    for motion in motions:
        cache = _MotionTorque(model, motion, samples, conditioning_pose)
        peak, flat = cache.peak(model, flat_tol)
        peaks[motion.name] = peak
        if flat:
            flats.append(motion.name)
    return peaks, flats


def optimize_fiber_tendon_ratio(model: BodyModel, reference: BodyModel,
                                bound: float = DEFAULT_RATIO_BOUND,
                                config: RatioOptConfig | None = None,
                                conditioning_pose: Pose | None = None
                                ) -> tuple[BodyModel, RatioOptResult]:
    cfg = config or RatioOptConfig(bound=bound)
    if config is None:
        cfg.bound = bound
    result = RatioOptResult()
    motions = model.all_motions()
    ref_peaks, ref_flats = torque_peaks(reference, reference.all_motions(),
                                        cfg.samples, conditioning_pose,
                                        cfg.flat_tol)
    result.reference_peaks = ref_peaks
    result.flat_motions = list(ref_flats)

    caches = [_MotionTorque(model, motion, cfg.samples, conditioning_pose)
              for motion in motions]
    limits = {m.id: muscle_stretch_limit(m, model.curves) for m in model.muscles}
    rho0 = np.array([m.ratio for m in model.muscles])
    lo = (1.0 - cfg.bound) * rho0
    hi = (1.0 + cfg.bound) * rho0
    affected = [
        [ci for ci, c in enumerate(caches) if m.id in c.muscle_ids]
        for m in model.muscles]

    def with_ratios(rho: np.ndarray) -> BodyModel:
        muscles = []
        for m, r in zip(model.muscles, rho):
            if abs(r - m.ratio) < 1e-15:
                muscles.append(m)
            else:
                muscles.append(m.with_lengths(
                    *split_for_limit(m, model.curves, limits[m.id], float(r))))
        return model.with_muscles(muscles)

    def motion_error(cache: _MotionTorque, candidate: BodyModel) -> float:
        name = cache.motion.name
        if name not in ref_peaks or name in ref_flats:
            return 0.0
        peak, flat = cache.peak(candidate, cfg.flat_tol)
        return (ref_peaks[name] - peak) ** 2

    def energy(rho: np.ndarray) -> float:
        candidate = with_ratios(rho)
        return sum(motion_error(c, candidate) for c in caches)

    def grad(rho: np.ndarray, f0: float) -> np.ndarray:
        base = with_ratios(rho)
        base_err = [motion_error(c, base) for c in caches]
        g = np.zeros_like(rho)
        for i in range(rho.size):
            if not affected[i] or hi[i] <= lo[i]:
                continue
            rp = rho.copy()
            rp[i] += cfg.fd_step
            cand = with_ratios(rp)
            delta = sum(motion_error(caches[ci], cand) - base_err[ci]
                        for ci in affected[i])
            g[i] = delta / cfg.fd_step
        return g

    def project(rho: np.ndarray) -> np.ndarray:
        return np.clip(rho, lo, hi)

    peaks0, _ = torque_peaks(model, motions, cfg.samples, conditioning_pose,
                             cfg.flat_tol)
    result.peaks_before = peaks0

    res = gradient_descent(energy, rho0,
                           DescentConfig(fd_step=cfg.fd_step,
                                         max_iters=cfg.max_iters),
                           grad=grad, project=project)
    result.trace = res.trace
    result.converged = res.converged
    final = with_ratios(res.x)
    peaks1, _ = torque_peaks(final, motions, cfg.samples, conditioning_pose,
                             cfg.flat_tol)
    result.peaks_after = peaks1
    return final, result
