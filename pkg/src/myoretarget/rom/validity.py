"""Muscle-induced pose validity: passive-stretch constraints, maximal
length estimation from a pose dataset, and key-pose relaxation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..anatomy import (BodyModel, ModelError, Pose, PoseBatch, fiber_equilibrium,
                       muscle_crosses_joint, muscle_lengths_batch,
                       muscle_stretch_limit, musculotendon_length)
from ..anatomy.equilibrium import split_for_limit
from .dataset import PoseDataset

VALIDITY_TOL = 1e-9  # meters of slack at the constraint boundary


class EstimationError(ModelError):
    pass


class RelaxationError(RuntimeError):
    """Key-pose relaxation hit its iteration cap."""

    def __init__(self, offending: list[str], model: BodyModel):
        super().__init__(
            "passive torque still above threshold for muscles: "
            + ", ".join(offending))
        self.offending = offending
        self.model = model


def passive_constraint(model: BodyModel, muscle_id: str, pose: Pose) -> float:
    """k_m*l_m0 - l_m(pose) at zero activation; >= 0 means the muscle is
    within its passive stretch limit."""
    m = model.muscle(muscle_id)
    l_mt = musculotendon_length(m, model.skeleton, pose)
    eq = fiber_equilibrium(m, model.curves, l_mt, a=0.0)
    if not eq.converged:
        raise EstimationError(
            f"muscle {muscle_id}: equilibrium did not converge (residual {eq.residual:g})")
    return m.k_m * m.l_m0 - eq.l_m


def stretch_limits(model: BodyModel, muscles=None) -> np.ndarray:
    muscles = model.muscles if muscles is None else muscles
    return np.array([muscle_stretch_limit(m, model.curves) for m in muscles])


def is_valid(model: BodyModel, pose: Pose, tol: float = VALIDITY_TOL) -> bool:
    """True iff every passive-stretch constraint is satisfied.

    Evaluated as l_mt <= stretch limit per muscle, which is equivalent to
    the fiber-space constraint because equilibrium fiber length is
    monotone in total length.
    """
    batch = PoseBatch.from_poses(model.skeleton, [pose])
    lengths = muscle_lengths_batch(model, batch)[0]
    return bool(np.all(lengths <= stretch_limits(model) + tol))


def valid_mask(model: BodyModel, batch: PoseBatch,
               muscles=None, transforms=None, tol: float = VALIDITY_TOL) -> np.ndarray:
    """(B,) boolean validity over a pose batch; `muscles` may restrict the
    checked constraints (e.g. to those crossing a grid's joint)."""
    muscles = list(model.muscles) if muscles is None else muscles
    if not muscles:
        return np.ones(len(batch), dtype=bool)
    lengths = muscle_lengths_batch(model, batch, muscles, transforms)
    limits = stretch_limits(model, muscles)
    return np.all(lengths <= limits[None, :] + tol, axis=1)


def estimate_lengths(model: BodyModel, dataset: PoseDataset) -> BodyModel:
    """Set each muscle's optimal fiber and tendon slack lengths so that its
    maximal dataset length sits exactly at the passive stretch limit,
    keeping the tendon-to-fiber ratio fixed. Every dataset pose is valid
    afterwards by construction."""
    if len(dataset) == 0:
        raise EstimationError("empty pose dataset")
    lengths = muscle_lengths_batch(model, dataset.batch)
    maxima = lengths.max(axis=0)
    updated = []
    for m, l_mt_max in zip(model.muscles, maxima):
        if l_mt_max <= 0.0:
            raise EstimationError(f"muscle {m.id}: zero length across dataset")
        updated.append(m.with_lengths(
            *split_for_limit(m, model.curves, float(l_mt_max), m.ratio)))
    return model.with_muscles(updated)


@dataclass
class RelaxationReport:
    iterations: int
    grown: dict[str, float]          # muscle id -> total growth factor
    peak_torques: dict[str, float]   # joint id -> final torque norm (N m)


def passive_joint_torques(model: BodyModel, pose: Pose) -> dict[str, float]:
    """Norm of the zero-activation muscle torque on each joint."""
    from ..dynamics.jacobians import joint_torques  # deferred: avoids cycle
    tau = joint_torques(model, pose, np.zeros(len(model.muscles)))
    out = {}
    for bid in model.skeleton.topo_order:
        sl = model.skeleton.dof_slices[bid]
        out[bid] = float(np.linalg.norm(tau[sl]))
    return out


def relax_keyposes(model: BodyModel, keyposes: list[Pose],
                   torque_threshold: float = 50.0, step: float = 0.01,
                   max_iters: int = 500) -> tuple[BodyModel, RelaxationReport]:
    """Grow fiber and tendon lengths of passively loaded muscles until the
    net passive torque on every joint at every key-pose drops below the
    threshold. Lengths only ever increase."""
    grown: dict[str, float] = {}
    factor = 1.0 + step
    iterations = 0
    while True:
        offending: set[str] = set()
        torques: dict[str, float] = {}
        for pose in keyposes:
            for joint, mag in passive_joint_torques(model, pose).items():
                torques[joint] = max(torques.get(joint, 0.0), mag)
                if mag > torque_threshold:
                    for m in model.muscles:
                        if not muscle_crosses_joint(m, model.skeleton, joint):
                            continue
                        l_mt = musculotendon_length(m, model.skeleton, pose)
                        eq = fiber_equilibrium(m, model.curves, l_mt, a=0.0)
                        if eq.tension > 1e-9:
                            offending.add(m.id)
        if not offending:
            return model, RelaxationReport(iterations, grown, torques)
        if iterations >= max_iters:
            raise RelaxationError(sorted(offending), model)
        updated = []
        for m in model.muscles:
            if m.id in offending:
                grown[m.id] = grown.get(m.id, 1.0) * factor
                updated.append(m.with_lengths(m.l_m0 * factor, m.l_t0 * factor))
            else:
                updated.append(m)
        model = model.with_muscles(updated)
        iterations += 1
