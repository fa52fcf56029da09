"""Normalized force-length curves for the three-element muscle model.

All three curves map normalized lengths to forces normalized by the
maximum isometric force. Defaults follow the usual exponential/toe-region
shapes; the parameters are chosen so that the passive fiber curve reaches
`passive_force_at_limit` at the fiber extension limit and the tendon curve
reaches 1.0 at its extension limit, which ties the curves to the maximal
musculotendon length rule k_m*l_m0 + k_t*l_t0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Curve = Callable[[np.ndarray | float], np.ndarray | float]


@dataclass(frozen=True)
class CurveParams:
    active_width: float = 0.45          # gaussian width of the active curve
    passive_exp_shape: float = 4.0      # exponential shape of the passive curve
    passive_strain_limit: float = 0.6   # fiber strain at the passive limit (k_m - 1)
    passive_force_at_limit: float = 1.0 # normalized passive force at the limit
    tendon_strain_at_fmax: float = 0.03 # tendon strain at normalized force 1 (k_t - 1)
    tendon_toe_force: float = 0.33
    tendon_toe_shape: float = 3.0


def _active_gaussian(width: float) -> Curve:
    def f(l):
        l = np.asarray(l, dtype=float)
        return np.exp(-((l - 1.0) ** 2) / width)
    return f


def _passive_exponential(shape: float, strain_limit: float, at_limit: float) -> Curve:
    denom = np.expm1(shape)

    def f(l):
        l = np.asarray(l, dtype=float)
        strain = np.clip(l - 1.0, 0.0, None)
        return at_limit * np.expm1(shape * strain / strain_limit) / denom
    return f


def _tendon_toe_linear(eps0: float, f_toe: float, k_toe: float):
    # exponential toe region up to eps_toe, then linear; continuous in value
    # and slope, and equal to 1.0 exactly at strain eps0
    eps_toe = 0.99 * eps0 * np.e ** 3 / (1.66 * np.e ** 3 - 0.67)
    k_lin = (1.0 - f_toe) / (eps0 - eps_toe)
    toe_denom = np.expm1(k_toe)

    def f(l):
        l = np.asarray(l, dtype=float)
        eps = l - 1.0
        toe = f_toe * np.expm1(k_toe * np.clip(eps, 0.0, eps_toe) / eps_toe) / toe_denom
        lin = k_lin * (eps - eps_toe) + f_toe
        return np.where(eps <= 0.0, 0.0, np.where(eps <= eps_toe, toe, lin))

    def f_inv(force):
        force = np.asarray(force, dtype=float)
        toe_l = 1.0 + eps_toe * np.log1p(force * toe_denom / f_toe) / k_toe
        lin_l = 1.0 + eps_toe + (force - f_toe) / k_lin
        return np.where(force <= 0.0, 1.0, np.where(force <= f_toe, toe_l, lin_l))

    return f, f_inv


def _numeric_inverse(curve: Curve, lo: float = 1.0, hi: float = 4.0) -> Curve:
    def inv(force):
        force = np.asarray(force, dtype=float)
        a = np.full(force.shape or (1,), lo)
        b = np.full(force.shape or (1,), hi)
        for _ in range(80):
            m = 0.5 * (a + b)
            high = np.asarray(curve(m)) > force
            b = np.where(high, m, b)
            a = np.where(high, a, m)
        out = 0.5 * (a + b)
        out = np.where(force <= 0.0, 1.0, out)
        return out if force.shape else float(out[0])
    return inv


@dataclass(frozen=True)
class CurveSet:
    """Three-element curve bundle; force_velocity intentionally absent
    (quasi-static)."""
    active_fl: Curve
    passive_fl: Curve
    tendon_fl: Curve
    tendon_fl_inv: Curve
    params: CurveParams | None = None
    rigid_tendon: bool = False

    @staticmethod
    def default(params: CurveParams | None = None) -> "CurveSet":
        p = params if params is not None else CurveParams()
        tendon, tendon_inv = _tendon_toe_linear(
            p.tendon_strain_at_fmax, p.tendon_toe_force, p.tendon_toe_shape)
        return CurveSet(
            active_fl=_active_gaussian(p.active_width),
            passive_fl=_passive_exponential(
                p.passive_exp_shape, p.passive_strain_limit, p.passive_force_at_limit),
            tendon_fl=tendon,
            tendon_fl_inv=tendon_inv,
            params=p,
        )

    @staticmethod
    def custom(active_fl: Curve, passive_fl: Curve, tendon_fl: Curve,
               tendon_fl_inv: Curve | None = None) -> "CurveSet":
        inv = tendon_fl_inv if tendon_fl_inv is not None else _numeric_inverse(tendon_fl)
        return CurveSet(active_fl, passive_fl, tendon_fl, inv)

    def as_rigid_tendon(self) -> "CurveSet":
        """Limiting case of an infinitely stiff tendon (l_t pinned to l_t0)."""
        return CurveSet(self.active_fl, self.passive_fl, self.tendon_fl,
                        self.tendon_fl_inv, self.params, rigid_tendon=True)
