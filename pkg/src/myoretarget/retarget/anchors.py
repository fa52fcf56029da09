"""Waypoint transfer onto a deformed skeleton.

Each LBS skinning entry is anchored to the nearest point on its bone's
shaft segment; under deformation the anchor keeps its normalized shaft
position while the offset from the anchor elongates, twists, and scales
with the local head scale. The anchored coordinates are the initial guess
for the routing optimization.
"""
from __future__ import annotations

from dataclasses import replace as dc_replace

import numpy as np

from ..anatomy import (BodyModel, MusculotendonUnit, Skeleton, SkinEntry,
                       Waypoint)
from .params import BoneParams, deform_point


def _relative_params(ref_shape, tgt_shape) -> BoneParams:
    return BoneParams(
        elongate=tgt_shape.elongation / ref_shape.elongation,
        torsion=tgt_shape.torsion_angle - ref_shape.torsion_angle,
        proximal_head_scale=(tgt_shape.proximal_head_scale
                             / ref_shape.proximal_head_scale),
        distal_head_scale=(tgt_shape.distal_head_scale
                           / ref_shape.distal_head_scale),
    )


def initial_waypoint_guess(reference_muscles, reference_skel: Skeleton,
                           target_skel: Skeleton) -> list[MusculotendonUnit]:
    """Re-express every waypoint's local coordinates through its bone
    anchor under the target deformation; skinning weights are preserved."""
    out = []
    for m in reference_muscles:
        wps = []
        for wp in m.waypoints:
            entries = []
            for e in wp.skinning:
                ref_bone = reference_skel.bone(e.bone_id)
                tgt_bone = target_skel.bone(e.bone_id)
                bp = _relative_params(ref_bone.shape_params, tgt_bone.shape_params)
                entries.append(SkinEntry(
                    e.bone_id, e.weight, deform_point(ref_bone, bp, e.local_coords)))
            wps.append(Waypoint(tuple(entries)))
        out.append(m.with_waypoints(wps))
    return out


def transplant_model(reference: BodyModel, target_skel: Skeleton) -> BodyModel:
    """Reference musculature dropped onto the deformed skeleton with local
    coordinates and lengths unchanged (the no-retargeting baseline)."""
    return BodyModel(target_skel, reference.muscles, reference.curves)


def anchored_model(reference: BodyModel, target_skel: Skeleton) -> BodyModel:
    """Deformed skeleton with anchor-carried waypoints, lengths unchanged."""
    muscles = initial_waypoint_guess(reference.muscles, reference.skeleton,
                                     target_skel)
    return BodyModel(target_skel, muscles, reference.curves)


def naive_linear_model(reference: BodyModel, target_skel: Skeleton) -> BodyModel:
    """Naive linear scaling baseline: anchor-carried waypoints plus fiber
    and tendon lengths scaled by the rest-pose length ratio per muscle."""
    from ..anatomy import Pose, musculotendon_length
    model = anchored_model(reference, target_skel)
    rest = Pose()
    muscles = []
    for ref_m, m in zip(reference.muscles, model.muscles):
        ref_len = musculotendon_length(ref_m, reference.skeleton, rest)
        new_len = musculotendon_length(m, target_skel, rest)
        s = new_len / ref_len if ref_len > 0 else 1.0
        muscles.append(dc_replace(m, l_m0=m.l_m0 * s, l_t0=m.l_t0 * s))
    return model.with_muscles(muscles)
