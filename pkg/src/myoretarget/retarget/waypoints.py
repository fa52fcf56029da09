"""Waypoint routing optimization (retargeting stage one)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..anatomy import BodyModel, Pose
from .descent import DescentConfig, DescentResult, gradient_descent, project_simplex
from .energy import (DEFAULT_THETA_SAMPLES, DEFAULT_W_DELTA, DEFAULT_W_LENGTH,
                     MuscleEnergyEvaluator)


@dataclass
class WaypointOptConfig:
    w_length: float = DEFAULT_W_LENGTH
    w_delta: float = DEFAULT_W_DELTA
    fd_step: float = 1e-4
    max_iters: int = 200
    samples: int = DEFAULT_THETA_SAMPLES
    optimize_weights: bool = False
    energy_skip_tol: float = 1e-12   # skip muscles already at the optimum
    max_displacement: float = 0.01   # meters of coordinate motion per step


@dataclass
class WaypointOptResult:
    traces: dict[str, list[float]] = field(default_factory=dict)
    converged: dict[str, bool] = field(default_factory=dict)

    @property
    def all_converged(self) -> bool:
        return all(self.converged.values())

    @property
    def initial_energy(self) -> float:
        return sum(t[0] for t in self.traces.values())

    @property
    def final_energy(self) -> float:
        return sum(t[-1] for t in self.traces.values())


def optimize_waypoints(model: BodyModel, reference: BodyModel,
                       config: WaypointOptConfig | None = None,
                       conditioning_pose: Pose | None = None
                       ) -> tuple[BodyModel, WaypointOptResult]:
    """Adjust LBS waypoint coordinates muscle by muscle to minimize the
    direction + length energy against the reference model. The energy is
    separable per muscle, so each is descended independently."""
    cfg = config or WaypointOptConfig()
    result = WaypointOptResult()
    descent_cfg = DescentConfig(fd_step=cfg.fd_step, max_iters=cfg.max_iters,
                                max_displacement=cfg.max_displacement)
    for m in model.muscles:
        if not m.joint_motions:
            result.traces[m.id] = [0.0]
            result.converged[m.id] = True
            continue
        ev = MuscleEnergyEvaluator(reference, model, m.id,
                                   w_length=cfg.w_length, w_delta=cfg.w_delta,
                                   samples=cfg.samples,
                                   conditioning_pose=conditioning_pose)
        x0 = ev.pack(m)
        e0 = ev.total(x0)
        if e0 <= cfg.energy_skip_tol:
            result.traces[m.id] = [e0]
            result.converged[m.id] = True
            continue
        res: DescentResult = gradient_descent(ev.total, x0, descent_cfg)
        result.traces[m.id] = res.trace
        result.converged[m.id] = res.converged
        optimized = ev.unpack(res.x)
        if cfg.optimize_weights:
            optimized = _optimize_weights(ev, optimized, descent_cfg)
        model = model.replace_muscle(optimized)
    return model, result


def _optimize_weights(ev: MuscleEnergyEvaluator, muscle, descent_cfg):
    """Optional skinning-weight refinement; weights re-projected onto the
    simplex per waypoint after every step."""
    from ..anatomy import SkinEntry, Waypoint

    layout = [len(wp.skinning) for wp in muscle.waypoints]

    def unpack(wvec):
        wps = []
        k = 0
        for wp, n in zip(muscle.waypoints, layout):
            weights = wvec[k:k + n]
            k += n
            wps.append(Waypoint(tuple(
                SkinEntry(e.bone_id, float(w), e.local_coords)
                for e, w in zip(wp.skinning, weights))))
        return muscle.with_waypoints(wps)

    def project(wvec):
        out = wvec.copy()
        k = 0
        for n in layout:
            out[k:k + n] = project_simplex(out[k:k + n])
            k += n
        return out

    def f(wvec):
        e_dir, e_len = ev.energies(unpack(project(wvec)))
        return e_dir + ev.w_length * e_len

    w0 = np.concatenate([[e.weight for e in wp.skinning] for wp in muscle.waypoints])
    res = gradient_descent(f, w0, descent_cfg, project=project)
    return unpack(project(res.x))
