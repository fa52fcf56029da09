"""Joint-limit constraint forces via a linear complementarity problem.

Limit rows come from musculotendon units sitting within a millimeter of
their passive stretch limit; impulses are solved at the velocity level by
projected Gauss-Seidel so that no constrained muscle keeps extending.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..anatomy import BodyModel, bone_world_transforms, musculotendon_length
from .jacobians import dof_axes, muscle_jacobian
from .rigid import DynamicsState, mass_matrix

LIMIT_PROXIMITY = 1e-3  # meters of fiber-space margin counting as "at limit"


@dataclass
class LcpResult:
    z: np.ndarray
    w: np.ndarray
    residual: float
    iterations: int
    converged: bool


def solve_lcp_pgs(a: np.ndarray, b: np.ndarray, max_sweeps: int = 200,
                  tol: float = 1e-10) -> LcpResult:
    """Solve w = A z + b, z >= 0, w >= 0, z^T w = 0 by projected
    Gauss-Seidel sweeps."""
    n = b.shape[0]
    z = np.zeros(n)
    if n == 0:
        return LcpResult(z, b.copy(), 0.0, 0, True)
    for sweep in range(1, max_sweeps + 1):
        delta = 0.0
        for i in range(n):
            if a[i, i] <= 0.0:
                continue
            zi = z[i] - (b[i] + a[i] @ z) / a[i, i]
            zi = max(zi, 0.0)
            delta = max(delta, abs(zi - z[i]))
            z[i] = zi
        if delta < tol:
            break
    w = a @ z + b
    residual = complementarity_residual(z, w)
    return LcpResult(z, w, residual, sweep, residual <= 1e-6)


def complementarity_residual(z: np.ndarray, w: np.ndarray) -> float:
    if z.size == 0:
        return 0.0
    return float(max(np.max(-z, initial=0.0), np.max(-w, initial=0.0),
                     np.max(np.abs(z * w), initial=0.0)))


@dataclass
class ConstraintSet:
    muscle_ids: list[str] = field(default_factory=list)
    jacobian: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    forces: np.ndarray = field(default_factory=lambda: np.zeros(0))      # f_c >= 0
    velocities: np.ndarray = field(default_factory=lambda: np.zeros(0))  # v_c >= 0
    residual: float = 0.0
    converged: bool = True

    @property
    def generalized_force(self) -> np.ndarray:
        if self.jacobian.size == 0:
            return np.zeros(self.jacobian.shape[1] if self.jacobian.ndim == 2 else 0)
        return self.jacobian.T @ self.forces


def active_limit_rows(model: BodyModel, pose,
                      proximity: float = LIMIT_PROXIMITY) -> list[str]:
    from ..rom.validity import passive_constraint  # deferred: avoids cycle
    out = []
    for m in model.muscles:
        if abs(passive_constraint(model, m.id, pose)) < proximity:
            out.append(m.id)
    return out


def solve_joint_limit_lcp(model: BodyModel, state: DynamicsState,
                          candidate_forces: np.ndarray | None = None,
                          dt: float = 1e-2,
                          proximity: float = LIMIT_PROXIMITY) -> ConstraintSet:
    """Compute limit impulses so that every near-limit muscle's
    post-impulse lengthening rate is non-negative-complementary.

    `candidate_forces` are generalized forces (muscle + external) acting
    over the step dt that may push joints into their limits.
    """
    skeleton = model.skeleton
    ids = active_limit_rows(model, state.pose, proximity)
    n = skeleton.dof_count
    if not ids:
        return ConstraintSet(jacobian=np.zeros((0, n)))
    transforms = bone_world_transforms(skeleton, state.pose)
    axes = dof_axes(skeleton, state.pose, transforms)
    j_c = np.stack([muscle_jacobian(model, mid, state.pose, transforms, axes)
                    for mid in ids])              # rows: d(limit margin)/dt per tension
    m_inv = np.linalg.inv(mass_matrix(model, state.pose))
    u = np.asarray(state.velocity, dtype=float)
    if candidate_forces is not None:
        u = u + dt * (m_inv @ np.asarray(candidate_forces, dtype=float))
    a = j_c @ m_inv @ j_c.T
    b = j_c @ u
    res = solve_lcp_pgs(a, b)
    return ConstraintSet(
        muscle_ids=ids,
        jacobian=j_c,
        forces=res.z,
        velocities=res.w,
        residual=res.residual,
        converged=res.converged,
    )
