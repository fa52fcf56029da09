"""Articulated rigid-body quantities: mass matrix and bias forces.

Both are assembled from per-body point Jacobians (angular velocity and
center-of-mass velocity), which keeps the quasi-velocity conventions of
the pose parameterization exact. Velocity-product accelerations use a
finite difference of the body Jacobians along the configuration flow.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..anatomy import (BodyModel, Pose, Skeleton, bone_world_transforms,
                       integrate_pose)
from .jacobians import dof_axes

GRAVITY = np.array([0.0, 0.0, -9.81])


@dataclass
class DynamicsState:
    pose: Pose
    velocity: np.ndarray
    tau_ext: np.ndarray | None = None

    def external(self, n_dof: int) -> np.ndarray:
        if self.tau_ext is None:
            return np.zeros(n_dof)
        return np.asarray(self.tau_ext, dtype=float)


@dataclass
class ActivationVector:
    a: np.ndarray

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        if np.any(self.a < 0.0) or np.any(self.a > 1.0):
            raise ValueError("activations must lie in [0, 1]")


def body_jacobians(skeleton: Skeleton, pose: Pose,
                   transforms: dict[str, np.ndarray] | None = None
                   ) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per bone: (J_omega, J_vcom), each 3 x N in world coordinates."""
    if transforms is None:
        transforms = bone_world_transforms(skeleton, pose)
    axes = dof_axes(skeleton, pose, transforms)
    n = skeleton.dof_count
    out: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        t = transforms[bid]
        p_com = t[:3, :3] @ bone.com + t[:3, 3]
        jw = np.zeros((3, n))
        jv = np.zeros((3, n))
        for d, ax in enumerate(axes):
            if not skeleton.is_ancestor(ax.bone_id, bid):
                continue
            if ax.kind == "translation":
                jv[:, d] = ax.axis
            else:
                jw[:, d] = ax.axis
                jv[:, d] = np.cross(ax.axis, p_com - ax.pivot)
        out[bid] = (jw, jv)
    return out


def mass_matrix(model: BodyModel, pose: Pose) -> np.ndarray:
    """Symmetric positive-definite generalized mass matrix M(q)."""
    skeleton = model.skeleton
    transforms = bone_world_transforms(skeleton, pose)
    jacs = body_jacobians(skeleton, pose, transforms)
    n = skeleton.dof_count
    m_mat = np.zeros((n, n))
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        jw, jv = jacs[bid]
        rot = transforms[bid][:3, :3]
        inertia_w = rot @ bone.inertia @ rot.T
        m_mat += bone.mass * (jv.T @ jv) + jw.T @ (inertia_w @ jw)
    return 0.5 * (m_mat + m_mat.T)


def bias_forces(model: BodyModel, state: DynamicsState,
                gravity: np.ndarray = GRAVITY, fd_step: float = 1e-6) -> np.ndarray:
    """c(q, qdot): Coriolis/centrifugal terms plus the gravity torque the
    actuation must overcome. At zero velocity this is exactly the gradient
    of gravitational potential energy."""
    skeleton = model.skeleton
    pose = state.pose
    u = np.asarray(state.velocity, dtype=float)
    transforms = bone_world_transforms(skeleton, pose)
    jacs = body_jacobians(skeleton, pose, transforms)
    n = skeleton.dof_count
    c = np.zeros(n)

    moving = float(np.linalg.norm(u)) > 0.0
    if moving:
        jacs_fwd = body_jacobians(skeleton, integrate_pose(skeleton, pose, u, fd_step))
        jacs_bwd = body_jacobians(skeleton, integrate_pose(skeleton, pose, u, -fd_step))

    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        jw, jv = jacs[bid]
        rot = transforms[bid][:3, :3]
        inertia_w = rot @ bone.inertia @ rot.T
        force = -bone.mass * gravity
        torque = np.zeros(3)
        if moving:
            jw_dot = (jacs_fwd[bid][0] - jacs_bwd[bid][0]) / (2.0 * fd_step)
            jv_dot = (jacs_fwd[bid][1] - jacs_bwd[bid][1]) / (2.0 * fd_step)
            omega = jw @ u
            force = force + bone.mass * (jv_dot @ u)
            torque = inertia_w @ (jw_dot @ u) + np.cross(omega, inertia_w @ omega)
        c += jv.T @ force + jw.T @ torque
    return c


def gravity_torque(model: BodyModel, pose: Pose,
                   gravity: np.ndarray = GRAVITY) -> np.ndarray:
    return bias_forces(model, DynamicsState(pose, np.zeros(model.skeleton.dof_count)),
                       gravity=gravity)
