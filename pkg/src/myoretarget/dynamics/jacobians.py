"""Muscle Jacobians, joint torques, torque-angle curves, and moment arms.

The generalized-coordinate convention matches anatomy.kinematics: root
rotation dofs about body axes then root translation, ball joints about
child-frame axes, revolute joints their scalar angle. A muscle Jacobian
column is -d(l_mt)/dq, so tendon tension F maps to generalized torque
J_m * F.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..anatomy import (BodyModel, JointMotion, ModelError, Pose,
                       bone_world_transforms, fiber_equilibrium,
                       musculotendon_length)


@dataclass(frozen=True)
class DofAxis:
    kind: str            # "rotation" | "translation"
    axis: np.ndarray     # world direction
    pivot: np.ndarray    # world point (rotations only)
    bone_id: str


def dof_axes(model_or_skeleton, pose: Pose,
             transforms: dict[str, np.ndarray] | None = None) -> list[DofAxis]:
    skeleton = getattr(model_or_skeleton, "skeleton", model_or_skeleton)
    if transforms is None:
        transforms = bone_world_transforms(skeleton, pose)
    axes: list[DofAxis] = []
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        t = transforms[bid]
        rot, pos = t[:3, :3], t[:3, 3]
        if bone.joint_type == "free_root":
            for k in range(3):
                axes.append(DofAxis("rotation", rot[:, k], pos, bid))
            for k in range(3):
                e = np.zeros(3)
                e[k] = 1.0
                axes.append(DofAxis("translation", e, pos, bid))
        elif bone.joint_type == "revolute":
            n = bone.joint_axis / np.linalg.norm(bone.joint_axis)
            axes.append(DofAxis("rotation", rot @ n, pos, bid))
        else:
            for k in range(3):
                axes.append(DofAxis("rotation", rot[:, k], pos, bid))
    return axes


def muscle_jacobian(model: BodyModel, muscle_id: str, pose: Pose,
                    transforms: dict[str, np.ndarray] | None = None,
                    axes: list[DofAxis] | None = None) -> np.ndarray:
    """(N,) column mapping tendon tension to generalized torques."""
    skeleton = model.skeleton
    m = model.muscle(muscle_id)
    if transforms is None:
        transforms = bone_world_transforms(skeleton, pose)
    if axes is None:
        axes = dof_axes(skeleton, pose, transforms)
    n_dof = skeleton.dof_count

    # per-waypoint world points and their per-dof derivatives
    points = np.zeros((len(m.waypoints), 3))
    dpoints = np.zeros((len(m.waypoints), n_dof, 3))
    for wi, wp in enumerate(m.waypoints):
        for e in wp.skinning:
            t = transforms[e.bone_id]
            world = t[:3, :3] @ e.local_coords + t[:3, 3]
            points[wi] += e.weight * world
            for d, ax in enumerate(axes):
                if not skeleton.is_ancestor(ax.bone_id, e.bone_id):
                    continue
                if ax.kind == "translation":
                    dpoints[wi, d] += e.weight * ax.axis
                else:
                    dpoints[wi, d] += e.weight * np.cross(ax.axis, world - ax.pivot)
    seg = np.diff(points, axis=0)
    seg_len = np.linalg.norm(seg, axis=1)
    grad = np.zeros(n_dof)
    for k, ln in enumerate(seg_len):
        if ln < 1e-12:
            continue
        u = seg[k] / ln
        grad += (dpoints[k + 1] - dpoints[k]) @ u
    return -grad


def joint_torques(model: BodyModel, pose: Pose, activations: np.ndarray) -> np.ndarray:
    """Generalized torques from all muscle tensions at the given activations."""
    activations = np.asarray(activations, dtype=float)
    if activations.shape != (len(model.muscles),):
        raise ModelError("activation vector length must match muscle count")
    if np.any(activations < 0) or np.any(activations > 1):
        raise ModelError("activations must lie in [0, 1]")
    transforms = bone_world_transforms(model.skeleton, pose)
    axes = dof_axes(model.skeleton, pose, transforms)
    tau = np.zeros(model.skeleton.dof_count)
    for m, a in zip(model.muscles, activations):
        l_mt = musculotendon_length(m, model.skeleton, pose, transforms)
        eq = fiber_equilibrium(m, model.curves, l_mt, float(a))
        if eq.tension == 0.0:
            continue
        tau += muscle_jacobian(model, m.id, pose, transforms, axes) * eq.tension
    return tau


def motion_pose(model: BodyModel, motion: JointMotion, theta: float,
                conditioning_pose: Pose | None = None) -> Pose:
    """Conditioning pose with the motion's joint driven to normalized
    angle theta."""
    from ..geometry import quat_from_axis_angle
    pose = conditioning_pose.copy() if conditioning_pose is not None else Pose()
    bone = model.skeleton.bone(motion.joint_id)
    angle = motion.angle(theta)
    if bone.joint_type == "revolute":
        n = bone.joint_axis / np.linalg.norm(bone.joint_axis)
        sign = float(np.dot(motion.axis / np.linalg.norm(motion.axis), n))
        pose.joint_coords[motion.joint_id] = sign * angle
    else:
        pose.joint_coords[motion.joint_id] = quat_from_axis_angle(motion.axis, angle)
    return pose


def motion_axis_torque(model: BodyModel, motion: JointMotion, pose: Pose,
                       activations: np.ndarray) -> float:
    """Net torque about the motion axis at the motion's joint."""
    tau = joint_torques(model, pose, activations)
    sl = model.skeleton.dof_slices[motion.joint_id]
    bone = model.skeleton.bone(motion.joint_id)
    n = motion.axis / np.linalg.norm(motion.axis)
    if bone.joint_type == "revolute":
        axis = bone.joint_axis / np.linalg.norm(bone.joint_axis)
        return float(tau[sl][0] * np.dot(n, axis))
    return float(tau[sl] @ n)


@dataclass
class TorqueAngleCurve:
    motion: JointMotion
    thetas: np.ndarray
    torques: np.ndarray
    peak_theta: float
    flat: bool


def agonist_activations(model: BodyModel, motion_name: str) -> np.ndarray:
    """Full activation of the muscles registered on the motion, zero
    elsewhere (the default policy for net torque curves)."""
    a = np.zeros(len(model.muscles))
    for i, m in enumerate(model.muscles):
        if any(jm.name == motion_name for jm in m.joint_motions):
            a[i] = 1.0
    return a


def parabolic_peak(thetas: np.ndarray, values: np.ndarray) -> float:
    """Argmax over samples with 3-point parabolic refinement."""
    i = int(np.argmax(values))
    if 0 < i < len(values) - 1:
        y0, y1, y2 = values[i - 1], values[i], values[i + 1]
        denom = y0 - 2.0 * y1 + y2
        if abs(denom) > 1e-15:
            shift = 0.5 * (y0 - y2) / denom
            shift = float(np.clip(shift, -0.5, 0.5))
            step = thetas[1] - thetas[0]
            return float(thetas[i] + shift * step)
    return float(thetas[i])


def torque_angle_curve(model: BodyModel, motion: JointMotion,
                       activations: np.ndarray | None = None,
                       samples: int = 21,
                       conditioning_pose: Pose | None = None) -> TorqueAngleCurve:
    if activations is None:
        activations = agonist_activations(model, motion.name)
    thetas = np.linspace(0.0, 1.0, samples)
    torques = np.array([
        motion_axis_torque(model, motion,
                           motion_pose(model, motion, t, conditioning_pose),
                           activations)
        for t in thetas])
    flat = bool(float(torques.max() - torques.min())
                < 1e-9 * max(1.0, float(np.abs(torques).max())))
    peak = 0.0 if flat else parabolic_peak(thetas, torques)
    return TorqueAngleCurve(motion, thetas, torques, peak, flat)


class ZeroTensionError(ValueError):
    pass


def moment_arm(model: BodyModel, muscle_id: str, joint_id: str, axis: np.ndarray,
               pose: Pose, activation: float = 1.0) -> float:
    """Effective torque about the joint axis per unit tendon tension (m)."""
    skeleton = model.skeleton
    m = model.muscle(muscle_id)
    transforms = bone_world_transforms(skeleton, pose)
    l_mt = musculotendon_length(m, skeleton, pose, transforms)
    eq = fiber_equilibrium(m, model.curves, l_mt, activation)
    if eq.tension <= 0.0:
        raise ZeroTensionError(
            f"muscle {muscle_id} carries no tension at activation {activation}")
    jac = muscle_jacobian(model, muscle_id, pose, transforms)
    tau = jac * eq.tension
    sl = skeleton.dof_slices[joint_id]
    bone = skeleton.bone(joint_id)
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    if bone.joint_type == "revolute":
        jaxis = bone.joint_axis / np.linalg.norm(bone.joint_axis)
        torque = tau[sl][0] * float(np.dot(n, jaxis))
    elif bone.joint_type == "ball_and_socket":
        torque = float(tau[sl] @ n)
    else:
        torque = float(tau[sl][:3] @ n)
    return torque / eq.tension
