"""ROM editing via pose-space transformations.

An edit defines a transformation T over joint coordinates and the edited
validity predicate is V(T(q)). T acts inversely on the range of motion:
scaling poses up by s shrinks the edited ROM by 1/s.

Revolute joints and ball-joint twists use the affine map
theta' = s*(theta - center) + center + shift. Ball-joint cone directions
are first rotated by `cone_reaim`, then their angle from `cone_center` is
scaled by `cone_scale`.

`make_cone_edit` converts user intent (tilt the ROM patch by a rotation,
scale its width by a factor) into these transformation parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..anatomy import BodyModel, ModelError, Pose, Skeleton
from ..geometry import (IDENTITY_QUAT, normalize, perpendicular, quat_conj,
                        quat_from_axis_angle, quat_rotate)
from .rotation import JointDecomposition, decompose_rotation, recompose_rotation
from .validity import is_valid


@dataclass(frozen=True)
class RevoluteEdit:
    scale: float = 1.0
    shift: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ModelError("revolute edit scale must be positive")

    def apply(self, angle: float, inverse: bool = False) -> float:
        if inverse:
            return (angle - self.center - self.shift) / self.scale + self.center
        return self.scale * (angle - self.center) + self.center + self.shift


@dataclass(frozen=True)
class BallEdit:
    twist_scale: float = 1.0
    twist_shift: float = 0.0
    twist_center: float = 0.0
    cone_scale: float = 1.0
    cone_reaim: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    cone_center: np.ndarray | None = None  # defaults to the bone shaft axis

    def __post_init__(self):
        if self.twist_scale <= 0 or self.cone_scale <= 0:
            raise ModelError("ball edit scales must be positive")
        object.__setattr__(self, "cone_reaim",
                           np.asarray(self.cone_reaim, dtype=float))
        if self.cone_center is not None:
            object.__setattr__(self, "cone_center",
                               normalize(np.asarray(self.cone_center, dtype=float)))


JointEdit = Union[RevoluteEdit, BallEdit]


@dataclass(frozen=True)
class RomEdit:
    """Per-joint pose transformations; unlisted joints are untouched."""
    joints: dict[str, JointEdit] = field(default_factory=dict)

    @staticmethod
    def identity() -> "RomEdit":
        return RomEdit({})


def make_cone_edit(tilt: np.ndarray, width_scale: float,
                   cone_center: np.ndarray | None = None,
                   twist_scale: float = 1.0, twist_shift: float = 0.0,
                   twist_center: float = 0.0) -> BallEdit:
    """Build a ball-joint edit from user intent: rotate the valid cone by
    `tilt` and scale its width by `width_scale` (< 1 shrinks)."""
    if width_scale <= 0:
        raise ModelError("width scale must be positive")
    return BallEdit(twist_scale=twist_scale, twist_shift=twist_shift,
                    twist_center=twist_center, cone_scale=1.0 / width_scale,
                    cone_reaim=quat_conj(np.asarray(tilt, dtype=float)),
                    cone_center=cone_center)


def scale_about_direction(v: np.ndarray, center: np.ndarray, scale: float) -> np.ndarray:
    """Scale the angle between v and center by `scale` along their great
    circle; the result is clamped just short of the antipode."""
    v = normalize(np.asarray(v, dtype=float))
    center = normalize(np.asarray(center, dtype=float))
    cosang = float(np.clip(np.dot(center, v), -1.0, 1.0))
    angle = float(np.arccos(cosang))
    if angle < 1e-12:
        return center.copy()
    if angle > np.pi - 1e-9:
        axis = perpendicular(center)
    else:
        axis = normalize(np.cross(center, v))
    new_angle = min(scale * angle, np.pi - 1e-9)
    return quat_rotate(quat_from_axis_angle(axis, new_angle), center)


def _apply_ball(edit: BallEdit, q: np.ndarray, shaft_axis: np.ndarray,
                inverse: bool) -> np.ndarray:
    dec = decompose_rotation(q, shaft_axis)
    center = edit.cone_center if edit.cone_center is not None else \
        normalize(np.asarray(shaft_axis, dtype=float))
    tw = RevoluteEdit(edit.twist_scale, edit.twist_shift, edit.twist_center)
    if inverse:
        v = scale_about_direction(dec.cone_dir, center, 1.0 / edit.cone_scale)
        v = quat_rotate(quat_conj(edit.cone_reaim), v)
    else:
        v = quat_rotate(edit.cone_reaim, dec.cone_dir)
        v = scale_about_direction(v, center, edit.cone_scale)
    omega = tw.apply(dec.twist, inverse=inverse)
    return recompose_rotation(JointDecomposition(omega, v), shaft_axis)


def apply_rom_edit(edit: RomEdit, skeleton: Skeleton, pose: Pose,
                   inverse: bool = False) -> Pose:
    """Transformed pose T(q) (or T^-1(q) with inverse=True); joints not
    named in the edit keep their coordinates."""
    out = pose.copy()
    for joint_id, je in edit.joints.items():
        bone = skeleton.bone(joint_id)
        if bone.joint_type == "revolute":
            if not isinstance(je, RevoluteEdit):
                raise ModelError(f"joint {joint_id}: expected a revolute edit")
            out.joint_coords[joint_id] = je.apply(
                float(pose.coord(skeleton, joint_id)), inverse=inverse)
        elif bone.joint_type == "ball_and_socket":
            if not isinstance(je, BallEdit):
                raise ModelError(f"joint {joint_id}: expected a ball edit")
            out.joint_coords[joint_id] = _apply_ball(
                je, pose.coord(skeleton, joint_id), bone.shaft_axis, inverse)
        else:
            raise ModelError(f"joint {joint_id}: free root cannot be edited")
    return out


def edited_is_valid(model: BodyModel, edits: RomEdit, pose: Pose) -> bool:
    return is_valid(model, apply_rom_edit(edits, model.skeleton, pose))
