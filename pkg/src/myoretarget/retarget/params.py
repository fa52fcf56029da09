"""Parametric skeleton deformation and rule-based physics scaling.

Limb bones carry four shape parameters (proximal/distal head scale, shaft
elongation, torsion about the shaft); the trunk is treated as a lumped
body with elongate/expand/bend; hands and feet scale uniformly. The same
per-bone deformation map used for joint offsets also drives the waypoint
anchor transfer in `anchors.py`.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

import numpy as np

from ..anatomy import BodyModel, Bone, ModelError, ShapeParams, Skeleton
from ..geometry import quat_from_axis_angle, quat_mul


@dataclass(frozen=True)
class BoneParams:
    elongate: float = 1.0
    torsion: float = 0.0              # radians about the shaft axis
    proximal_head_scale: float = 1.0
    distal_head_scale: float = 1.0
    mass_scale: float = 1.0

    def __post_init__(self):
        if min(self.elongate, self.proximal_head_scale,
               self.distal_head_scale, self.mass_scale) <= 0:
            raise ModelError("bone scale parameters must be positive")


@dataclass(frozen=True)
class TrunkParams:
    elongate: float = 1.0
    expand: float = 1.0
    bend: float = 0.0                 # radians, distributed over trunk joints
    mass_scale: float = 1.0

    def __post_init__(self):
        if min(self.elongate, self.expand, self.mass_scale) <= 0:
            raise ModelError("trunk scale parameters must be positive")


@dataclass(frozen=True)
class SkeletonParams:
    bones: dict[str, BoneParams] = field(default_factory=dict)
    trunk: TrunkParams = field(default_factory=TrunkParams)
    hands_scale: float = 1.0
    feet_scale: float = 1.0
    global_scale: float = 1.0         # L for the rule-based physics scaling
    symmetric: bool = True

    @staticmethod
    def identity() -> "SkeletonParams":
        return SkeletonParams()

    def resolve(self, skeleton: Skeleton) -> dict[str, BoneParams]:
        """Full per-bone parameter map. A key without a _l/_r suffix
        matching suffixed bones applies to both sides; with `symmetric`,
        one-sided entries are mirrored (torsion sign flipped) unless the
        partner is given explicitly."""
        out = {b.id: BoneParams() for b in skeleton.bones}
        for key, bp in self.bones.items():
            if key in out:
                out[key] = bp
            elif f"{key}_l" in out or f"{key}_r" in out:
                for side in ("l", "r"):
                    bid = f"{key}_{side}"
                    if bid in out:
                        sign = 1.0 if side == "l" else -1.0
                        out[bid] = dc_replace(bp, torsion=sign * bp.torsion)
            else:
                raise ModelError(f"params reference unknown bone {key!r}")
        if self.symmetric:
            for key, bp in self.bones.items():
                for a, b in (("_l", "_r"), ("_r", "_l")):
                    if key.endswith(a):
                        partner = key[:-2] + b
                        if partner in out and partner not in self.bones:
                            out[partner] = dc_replace(bp, torsion=-bp.torsion)
        for b in skeleton.bones:
            if b.group == "trunk":
                out[b.id] = BoneParams(
                    elongate=self.trunk.elongate,
                    proximal_head_scale=self.trunk.expand,
                    distal_head_scale=self.trunk.expand,
                    mass_scale=self.trunk.mass_scale)
            elif b.group == "hand":
                out[b.id] = BoneParams(elongate=self.hands_scale,
                                       proximal_head_scale=self.hands_scale,
                                       distal_head_scale=self.hands_scale)
            elif b.group == "foot":
                out[b.id] = BoneParams(elongate=self.feet_scale,
                                       proximal_head_scale=self.feet_scale,
                                       distal_head_scale=self.feet_scale)
        return out


def deform_point(bone: Bone, bp: BoneParams, x: np.ndarray) -> np.ndarray:
    """Map a point in the bone's frame through the shaft deformation:
    axial elongation, progressive torsion, and head-scale interpolation of
    the radial offset (linear from proximal to distal along the shaft)."""
    x = np.asarray(x, dtype=float)
    s = bone.shaft_axis
    u = float(x @ s)
    r = x - u * s
    t = float(np.clip(u / bone.length, 0.0, 1.0)) if bone.length > 0 else 0.0
    h = (1.0 - t) * bp.proximal_head_scale + t * bp.distal_head_scale
    if bp.torsion != 0.0:
        from ..geometry import quat_rotate
        r = quat_rotate(quat_from_axis_angle(s, bp.torsion * t), r)
    return bp.elongate * u * s + h * r


def _scaled_inertia(bone: Bone, bp: BoneParams) -> np.ndarray:
    s = bone.shaft_axis
    outer = np.outer(s, s)
    h = 0.5 * (bp.proximal_head_scale + bp.distal_head_scale)
    scale = bp.elongate * outer + h * (np.eye(3) - outer)
    return bp.mass_scale * (scale @ bone.inertia @ scale)


def apply_skeleton_params(reference: Skeleton, params: SkeletonParams) -> Skeleton:
    """Deformed skeleton: child joint offsets follow each parent bone's
    shaft deformation, child rest frames pick up the torsion at their
    attachment point, and shape_params record the absolute deformation."""
    per_bone = params.resolve(reference)
    trunk_joints = [b.id for b in reference.bones
                    if b.group == "trunk" and b.joint_type != "free_root"]
    bend_each = params.trunk.bend / len(trunk_joints) if trunk_joints else 0.0

    new_bones = []
    for bone in reference.bones:
        bp = per_bone[bone.id]
        sp = bone.shape_params
        shape = ShapeParams(
            proximal_head_scale=sp.proximal_head_scale * bp.proximal_head_scale,
            distal_head_scale=sp.distal_head_scale * bp.distal_head_scale,
            elongation=sp.elongation * bp.elongate,
            torsion_angle=sp.torsion_angle + bp.torsion)
        offset = bone.local_offset
        rest = bone.rest_rotation
        if bone.parent is not None:
            parent = reference.bone(bone.parent)
            pp = per_bone[parent.id]
            u = float(offset @ parent.shaft_axis)
            t = float(np.clip(u / parent.length, 0.0, 1.0)) if parent.length > 0 else 0.0
            offset = deform_point(parent, pp, offset)
            if pp.torsion != 0.0:
                rest = quat_mul(
                    quat_from_axis_angle(parent.shaft_axis, pp.torsion * t), rest)
        if bend_each != 0.0 and bone.id in trunk_joints:
            rest = quat_mul(quat_from_axis_angle(np.array([0.0, 1.0, 0.0]),
                                                 bend_each), rest)
        new_bones.append(Bone(
            id=bone.id, parent=bone.parent, joint_type=bone.joint_type,
            local_offset=offset, shaft_axis=bone.shaft_axis,
            mass=bone.mass * bp.mass_scale,
            inertia=_scaled_inertia(bone, bp),
            shape_params=shape, joint_axis=bone.joint_axis,
            rest_rotation=rest, length=bone.length * bp.elongate,
            com=deform_point(bone, bp, bone.com), group=bone.group))
    return Skeleton(new_bones)


def scaling_factors(length_scale: float) -> dict[str, float]:
    """Rule-based factors for uniform geometric scaling by L."""
    if length_scale <= 0:
        raise ModelError("length scale must be positive")
    L = length_scale
    return {
        "time": L ** 0.5,
        "force": L ** 3,
        "mass": L ** 3,
        "inertia": L ** 5,
        "velocity": L ** 0.5,
        "stiffness": L ** 2,
        "damping": L ** 2.5,
    }


def scale_physics(model: BodyModel, length_scale: float) -> BodyModel:
    """Scale masses, inertias, and maximum isometric forces per the
    uniform-scaling rule (geometry is left to apply_skeleton_params)."""
    f = scaling_factors(length_scale)
    bones = []
    for bone in model.skeleton.bones:
        bones.append(Bone(
            id=bone.id, parent=bone.parent, joint_type=bone.joint_type,
            local_offset=bone.local_offset, shaft_axis=bone.shaft_axis,
            mass=bone.mass * f["mass"], inertia=bone.inertia * f["inertia"],
            shape_params=bone.shape_params, joint_axis=bone.joint_axis,
            rest_rotation=bone.rest_rotation, length=bone.length,
            com=bone.com, group=bone.group))
    muscles = [dc_replace(m, f_max=m.f_max * f["force"]) for m in model.muscles]
    return BodyModel(Skeleton(bones), muscles, model.curves)
