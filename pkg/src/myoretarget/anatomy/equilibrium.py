"""Quasi-static fiber/tendon equilibrium for musculotendon units.

The tension balance (fiber active + passive, projected by the pennation
angle, against the series tendon) is solved for the fiber length by
bracketed bisection on the normalized force residual.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveSet
from .model import MusculotendonUnit

MAX_ITERS = 200
_REL_TOL = 1e-12  # interval tolerance relative to l_m0


@dataclass(frozen=True)
class EquilibriumResult:
    l_m: float
    l_t: float
    tension: float        # tendon tension in N
    residual: float       # |force balance| normalized by f_max
    converged: bool
    slack: bool = False   # True when the unit cannot carry tension


def max_musculotendon_length(m: MusculotendonUnit) -> float:
    """Maximal musculotendon length k_m*l_m0 + k_t*l_t0."""
    return m.k_m * m.l_m0 + m.k_t * m.l_t0


def muscle_stretch_limit(m: MusculotendonUnit, curves: CurveSet) -> float:
    """Musculotendon length at which the passive fiber reaches its
    extension limit l_m = k_m*l_m0 under passive equilibrium.

    Equals max_musculotendon_length exactly for zero pennation with the
    default curves; the equilibrium-consistent form keeps the validity
    threshold exact for any pennation or curve substitution.
    """
    cos_p = float(np.cos(m.pennation))
    limit_force = float(np.asarray(curves.passive_fl(m.k_m))) * cos_p
    if m.l_t0 == 0.0 or curves.rigid_tendon:
        return m.k_m * m.l_m0 * cos_p + m.l_t0
    l_t = m.l_t0 * float(np.asarray(curves.tendon_fl_inv(limit_force)))
    return m.k_m * m.l_m0 * cos_p + l_t


def split_for_limit(m: MusculotendonUnit, curves: CurveSet, limit: float,
                    rho: float) -> tuple[float, float]:
    """Fiber/tendon rest lengths with ratio rho whose passive stretch
    limit equals `limit` (inverts muscle_stretch_limit)."""
    cos_p = float(np.cos(m.pennation))
    if rho == 0.0 or curves.rigid_tendon:
        denom = m.k_m * cos_p + rho
    else:
        limit_force = float(np.asarray(curves.passive_fl(m.k_m))) * cos_p
        denom = m.k_m * cos_p + rho * float(
            np.asarray(curves.tendon_fl_inv(limit_force)))
    l_m0 = limit / denom
    return l_m0, rho * l_m0


def _fiber_force(curves: CurveSet, l_norm, a):
    return a * np.asarray(curves.active_fl(l_norm)) + np.asarray(curves.passive_fl(l_norm))


def fiber_equilibrium(m: MusculotendonUnit, curves: CurveSet, l_mt: float,
                      a: float) -> EquilibriumResult:
    """Solve the fiber/tendon force balance at total length l_mt and
    activation a; returns fiber length, tendon length, and tension."""
    if l_mt <= 0:
        raise ValueError("l_mt must be positive")
    if not (0.0 <= a <= 1.0):
        raise ValueError("activation must lie in [0, 1]")
    cos_p = float(np.cos(m.pennation))

    if curves.rigid_tendon or m.l_t0 == 0.0:
        l_t = m.l_t0
        l_m = max((l_mt - l_t) / cos_p, 0.0)
        if l_m <= 0.0:
            return EquilibriumResult(0.0, min(l_mt, l_t), 0.0, 0.0, True, slack=True)
        force = float(_fiber_force(curves, l_m / m.l_m0, a)) * cos_p
        return EquilibriumResult(l_m, l_t, force * m.f_max, 0.0, True)

    def residual(l_m):
        l_t_norm = (l_mt - l_m * cos_p) / m.l_t0
        return (_fiber_force(curves, l_m / m.l_m0, a) * cos_p
                - np.asarray(curves.tendon_fl(l_t_norm)))

    if a == 0.0 and l_mt <= m.l_m0 * cos_p + m.l_t0:
        # both elements slack: canonical split at the slack tendon length
        l_m = max((l_mt - m.l_t0) / cos_p, 0.0)
        return EquilibriumResult(l_m, l_mt - l_m * cos_p, 0.0, 0.0, True, slack=True)
    lo = 1e-9 * m.l_m0
    hi = l_mt / cos_p
    if float(residual(lo)) >= 0.0:
        # fiber force meets or exceeds the slack tendon even at minimal
        # fiber length: the unit cannot carry tension (buckled/slack)
        l_m = max((l_mt - m.l_t0) / cos_p, 0.0)
        return EquilibriumResult(l_m, l_mt - l_m * cos_p, 0.0, 0.0, True, slack=True)

    tol = _REL_TOL * m.l_m0
    converged = False
    for _ in range(MAX_ITERS):
        mid = 0.5 * (lo + hi)
        if float(residual(mid)) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            converged = True
            break
    l_m = 0.5 * (lo + hi)
    l_t = l_mt - l_m * cos_p
    res = abs(float(residual(l_m)))
    tension = float(np.asarray(curves.tendon_fl(l_t / m.l_t0))) * m.f_max
    return EquilibriumResult(l_m, l_t, tension, res, converged or res <= 1e-8)


def fiber_equilibrium_batch(m: MusculotendonUnit, curves: CurveSet,
                            l_mt: np.ndarray, a: np.ndarray | float) -> np.ndarray:
    """Vectorized equilibrium over arrays of (l_mt, a).

    Returns an array of shape (..., 3): fiber length, tendon length,
    tension (N).
    """
    l_mt = np.asarray(l_mt, dtype=float)
    return fiber_equilibrium_params_batch(
        curves, l_mt, a, l_m0=m.l_m0, l_t0=m.l_t0, pennation=m.pennation,
        f_max=m.f_max)


def fiber_equilibrium_params_batch(curves: CurveSet, l_mt: np.ndarray,
                                   a, l_m0, l_t0, pennation, f_max) -> np.ndarray:
    """Equilibrium with per-element muscle parameters, broadcast against
    l_mt. Returns (..., 3): fiber length, tendon length, tension."""
    l_mt = np.asarray(l_mt, dtype=float)
    shape = l_mt.shape
    a = np.broadcast_to(np.asarray(a, dtype=float), shape)
    l_m0 = np.broadcast_to(np.asarray(l_m0, dtype=float), shape)
    l_t0 = np.broadcast_to(np.asarray(l_t0, dtype=float), shape)
    cos_p = np.broadcast_to(np.cos(np.asarray(pennation, dtype=float)), shape)
    f_max = np.broadcast_to(np.asarray(f_max, dtype=float), shape)

    rigid = (l_t0 == 0.0) | curves.rigid_tendon
    if np.all(rigid):
        l_m = np.clip((l_mt - l_t0) / cos_p, 0.0, None)
        force = np.where(l_m > 0.0, _fiber_force(curves, l_m / l_m0, a) * cos_p, 0.0)
        return np.stack([l_m, l_mt - l_m * cos_p, force * f_max], axis=-1)

    safe_l_t0 = np.where(rigid, 1.0, l_t0)

    def residual(l_m):
        l_t_norm = (l_mt - l_m * cos_p) / safe_l_t0
        return (_fiber_force(curves, l_m / l_m0, a) * cos_p
                - np.asarray(curves.tendon_fl(l_t_norm)))

    lo = 1e-9 * l_m0
    hi = l_mt / cos_p
    slack = (residual(lo) >= 0.0) | ((a == 0.0) & (l_mt <= l_m0 * cos_p + l_t0))
    iters = max(60, int(np.ceil(np.log2(
        np.max(hi / (_REL_TOL * l_m0)) + 1))))
    for _ in range(min(iters, MAX_ITERS)):
        mid = 0.5 * (lo + hi)
        positive = residual(mid) > 0.0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    l_m = 0.5 * (lo + hi)
    l_m = np.where(slack, np.clip((l_mt - l_t0) / cos_p, 0.0, None), l_m)
    rigid_l_m = np.clip((l_mt - l_t0) / cos_p, 0.0, None)
    l_m = np.where(rigid, rigid_l_m, l_m)
    l_t = l_mt - l_m * cos_p
    tension = np.asarray(curves.tendon_fl(l_t / safe_l_t0)) * f_max
    tension = np.where(slack & ~rigid, 0.0, tension)
    rigid_force = np.where(rigid_l_m > 0.0,
                           _fiber_force(curves, rigid_l_m / l_m0, a) * cos_p, 0.0)
    tension = np.where(rigid, rigid_force * f_max, tension)
    return np.stack([l_m, l_t, tension], axis=-1)
