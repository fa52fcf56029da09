"""Box-constrained QP muscle coordination.

The scalar tendon tensions are linearized in activation about the
zero-activation equilibrium (tension ~ passive + a * active-at-length),
which makes the achieved acceleration affine in the activation vector and
the tracking problem a convex box-constrained QP.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..anatomy import (BodyModel, bone_world_transforms, fiber_equilibrium,
                       musculotendon_length)
from .jacobians import dof_axes, muscle_jacobian
from .rigid import GRAVITY, ActivationVector, DynamicsState, bias_forces, mass_matrix


@dataclass
class BoxQpResult:
    x: np.ndarray
    kkt_residual: float
    iterations: int
    converged: bool


def solve_box_qp(h: np.ndarray, g: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 max_iters: int = 100, tol: float = 1e-9) -> BoxQpResult:
    """Minimize 0.5 x^T H x + g^T x subject to lo <= x <= hi.

    Projected Newton: clamp variables whose gradient pushes outward at a
    bound, take a Newton step on the free block, and backtrack along the
    projected step. Stationarity is measured on the scale-normalized
    problem so the tolerance is meaningful for any unit system.
    """
    n = h.shape[0]
    scale = max(1.0, float(np.abs(h).max()), float(np.abs(g).max()))
    x = np.clip(np.zeros(n), lo, hi)
    f_x = 0.5 * x @ h @ x + g @ x
    for it in range(1, max_iters + 1):
        grad = h @ x + g
        clamped = (((x <= lo + 1e-14) & (grad > 0.0))
                   | ((x >= hi - 1e-14) & (grad < 0.0)))
        free = ~clamped
        res = kkt_residual(h, g, lo, hi, x, scale)
        if res <= tol:
            return BoxQpResult(x, res, it - 1, True)
        if not np.any(free):
            return BoxQpResult(x, res, it - 1, True)
        idx = np.flatnonzero(free)
        hff = h[np.ix_(idx, idx)]
        rhs = grad[idx]
        try:
            newton = np.linalg.solve(hff, rhs)
        except np.linalg.LinAlgError:
            newton = np.linalg.lstsq(hff, rhs, rcond=None)[0]
        dx = np.zeros(n)
        dx[idx] = -newton
        # backtracking with projection
        alpha = 1.0
        improved = False
        for _ in range(40):
            cand = np.clip(x + alpha * dx, lo, hi)
            f_cand = 0.5 * cand @ h @ cand + g @ cand
            if f_cand <= f_x - 1e-12 * abs(f_x) or (
                    f_cand < f_x and alpha == 1.0):
                improved = True
                break
            if f_cand <= f_x and np.linalg.norm(cand - x) > 0:
                improved = True
                break
            alpha *= 0.5
        if not improved:
            return BoxQpResult(x, res, it, res <= tol)
        x, f_x = cand, f_cand
    return BoxQpResult(x, kkt_residual(h, g, lo, hi, x, scale), max_iters,
                       kkt_residual(h, g, lo, hi, x, scale) <= tol)


def kkt_residual(h: np.ndarray, g: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                 x: np.ndarray, scale: float | None = None) -> float:
    """Infinity norm of the projected-gradient stationarity violation,
    normalized by the problem scale."""
    if scale is None:
        scale = max(1.0, float(np.abs(h).max()), float(np.abs(g).max()))
    grad = h @ x + g
    res = np.abs(grad)
    res = np.where((x <= lo + 1e-12) & (grad > 0), 0.0, res)
    res = np.where((x >= hi - 1e-12) & (grad < 0), 0.0, res)
    return float(res.max() / scale) if res.size else 0.0


@dataclass
class MuscleQpResult:
    activations: ActivationVector
    achieved_qdd: np.ndarray
    objective: float
    kkt_residual: float
    tracking_error: float
    converged: bool


def _tension_linearization(model: BodyModel, pose) -> tuple[np.ndarray, np.ndarray]:
    """(passive tension, active tension slope) per muscle at the pose."""
    transforms = bone_world_transforms(model.skeleton, pose)
    f0 = np.zeros(len(model.muscles))
    f1 = np.zeros(len(model.muscles))
    for i, m in enumerate(model.muscles):
        l_mt = musculotendon_length(m, model.skeleton, pose, transforms)
        eq = fiber_equilibrium(m, model.curves, l_mt, 0.0)
        f0[i] = eq.tension
        if eq.slack and eq.l_m <= 0.0:
            continue
        l_norm = eq.l_m / m.l_m0 if eq.l_m > 0 else (l_mt - m.l_t0) / m.l_m0
        f1[i] = (m.f_max * float(np.asarray(model.curves.active_fl(max(l_norm, 0.0))))
                 * float(np.cos(m.pennation)))
    return f0, f1


def solve_muscle_qp(model: BodyModel, state: DynamicsState, qdd_desired: np.ndarray,
                    w_reg: float = 0.01, constraint_force: np.ndarray | None = None,
                    gravity: np.ndarray = GRAVITY) -> MuscleQpResult:
    """Find activations in [0,1] whose (linearized) dynamics best track the
    desired generalized acceleration, with quadratic activation
    regularization."""
    skeleton = model.skeleton
    n = skeleton.dof_count
    qdd_desired = np.asarray(qdd_desired, dtype=float)
    m_mat = mass_matrix(model, state.pose)
    c = bias_forces(model, state, gravity=gravity)
    transforms = bone_world_transforms(skeleton, state.pose)
    axes = dof_axes(skeleton, state.pose, transforms)
    jac = np.stack([
        muscle_jacobian(model, m.id, state.pose, transforms, axes)
        for m in model.muscles], axis=1)           # N x M
    f0, f1 = _tension_linearization(model, state.pose)

    rhs0 = jac @ f0 + state.external(n) - c
    if constraint_force is not None:
        rhs0 = rhs0 + np.asarray(constraint_force, dtype=float)
    m_inv = np.linalg.inv(m_mat)
    qdd0 = m_inv @ rhs0
    gain = m_inv @ (jac * f1[None, :])             # N x M, d(qdd)/da

    r = qdd_desired - qdd0
    h = 2.0 * (gain.T @ gain + w_reg * np.eye(len(model.muscles)))
    g = -2.0 * (gain.T @ r)
    lo = np.zeros(len(model.muscles))
    hi = np.ones(len(model.muscles))
    res = solve_box_qp(h, g, lo, hi, tol=1e-10)
    a = res.x
    achieved = qdd0 + gain @ a
    objective = float(np.sum((qdd_desired - achieved) ** 2) + w_reg * np.sum(a * a))
    return MuscleQpResult(
        activations=ActivationVector(a),
        achieved_qdd=achieved,
        objective=objective,
        kkt_residual=res.kkt_residual,
        tracking_error=float(np.linalg.norm(qdd_desired - achieved)),
        converged=res.converged,
    )
