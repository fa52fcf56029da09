"""Finite-difference gradient descent with backtracking line search.

Shared by the waypoint-routing and fiber-ratio optimizers. Gradients use
forward differences; steps are accepted only under the Armijo condition,
so the emitted energy trace is monotone non-increasing by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class DescentConfig:
    fd_step: float = 1e-4
    max_iters: int = 60
    armijo: float = 1e-4
    shrink: float = 0.5
    max_line_search: int = 30
    grad_tol: float = 1e-9
    energy_tol: float = 1e-14
    initial_step: float = 1.0
    max_displacement: float = np.inf  # per-iteration step-norm cap (trust region)


@dataclass
class DescentResult:
    x: np.ndarray
    trace: list[float]
    converged: bool
    iterations: int


def fd_gradient(f: Callable[[np.ndarray], float], x: np.ndarray,
                f0: float, step: float) -> np.ndarray:
    g = np.zeros_like(x)
    for i in range(x.size):
        xp = x.copy()
        xp[i] += step
        g[i] = (f(xp) - f0) / step
    return g


def gradient_descent(f: Callable[[np.ndarray], float], x0: np.ndarray,
                     config: DescentConfig | None = None,
                     grad: Callable[[np.ndarray, float], np.ndarray] | None = None,
                     project: Callable[[np.ndarray], np.ndarray] | None = None
                     ) -> DescentResult:
    """Minimize f from x0; `grad` may supply a cheaper gradient,
    `project` maps iterates back to a feasible set after each step."""
    cfg = config or DescentConfig()
    x = np.asarray(x0, dtype=float).copy()
    if project is not None:
        x = project(x)
    f_x = float(f(x))
    trace = [f_x]
    step = cfg.initial_step
    for it in range(1, cfg.max_iters + 1):
        g = grad(x, f_x) if grad is not None else fd_gradient(f, x, f_x, cfg.fd_step)
        gnorm2 = float(g @ g)
        if gnorm2 <= cfg.grad_tol ** 2:
            return DescentResult(x, trace, True, it - 1)
        step *= 2.0  # counter the previous backtracking
        if np.isfinite(cfg.max_displacement):
            step = min(step, cfg.max_displacement / np.sqrt(gnorm2))
        accepted = False
        for _ in range(cfg.max_line_search):
            cand = x - step * g
            if project is not None:
                cand = project(cand)
            f_cand = float(f(cand))
            # Armijo on the actual displacement (projection-aware)
            d = cand - x
            if f_cand <= f_x + cfg.armijo * float(g @ d):
                accepted = True
                break
            step *= cfg.shrink
        if not accepted:
            # line search failed: halve once more and stop
            step *= cfg.shrink
            return DescentResult(x, trace, False, it)
        if f_x - f_cand <= cfg.energy_tol * max(1.0, abs(f_x)):
            x, f_x = cand, f_cand
            trace.append(f_x)
            return DescentResult(x, trace, True, it)
        x, f_x = cand, f_cand
        trace.append(f_x)
    return DescentResult(x, trace, True, cfg.max_iters)


def project_simplex(w: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    w = np.asarray(w, dtype=float)
    u = np.sort(w)[::-1]
    css = np.cumsum(u)
    rho = np.flatnonzero(u + (1.0 - css) / np.arange(1, w.size + 1) > 0)[-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(w - theta, 0.0)
