"""Forward kinematics, LBS waypoint placement, and musculotendon lengths.

Single-pose functions operate on Pose objects; the batched variants take a
PoseBatch (struct-of-arrays) and are what the grid and dataset paths use.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import (IDENTITY_QUAT, quat_from_axis_angle, quat_mul,
                        quat_normalize, quat_to_matrix, quat_to_matrix_batch,
                        transform)
from .model import BodyModel, ModelError, MusculotendonUnit, Pose, Skeleton, Waypoint


def joint_local_transform(bone, coord) -> np.ndarray:
    t = np.eye(4)
    t[:3, 3] = bone.local_offset
    rest = quat_to_matrix(bone.rest_rotation)
    if bone.joint_type == "revolute":
        rot = quat_to_matrix(quat_from_axis_angle(bone.joint_axis, float(coord)))
    else:
        rot = quat_to_matrix(quat_normalize(np.asarray(coord, dtype=float)))
    t[:3, :3] = rest @ rot
    return t


def bone_world_transforms(skeleton: Skeleton, pose: Pose) -> dict[str, np.ndarray]:
    """World 4x4 transforms of every bone frame, root transform included."""
    out: dict[str, np.ndarray] = {}
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        if bone.joint_type == "free_root":
            out[bid] = transform(pose.root_quat, pose.root_pos)
        else:
            out[bid] = out[bone.parent] @ joint_local_transform(
                bone, pose.coord(skeleton, bid))
    return out


def bone_world_transform(skeleton: Skeleton, pose: Pose, bone_id: str) -> np.ndarray:
    if bone_id not in skeleton.index:
        raise ModelError(f"unknown bone id {bone_id!r}")
    chain = []
    cur: str | None = bone_id
    while cur is not None:
        chain.append(cur)
        cur = skeleton.bone(cur).parent
    t = np.eye(4)
    for bid in reversed(chain):
        bone = skeleton.bone(bid)
        if bone.joint_type == "free_root":
            t = transform(pose.root_quat, pose.root_pos)
        else:
            t = t @ joint_local_transform(bone, pose.coord(skeleton, bid))
    return t


def waypoint_position(wp: Waypoint, skeleton: Skeleton, pose: Pose,
                      transforms: dict[str, np.ndarray] | None = None) -> np.ndarray:
    """p = sum_j w_j T_j x_j in homogeneous coordinates."""
    if transforms is None:
        transforms = bone_world_transforms(skeleton, pose)
    p = np.zeros(3)
    for e in wp.skinning:
        t = transforms[e.bone_id]
        p += e.weight * (t[:3, :3] @ e.local_coords + t[:3, 3])
    return p


def muscle_path(m: MusculotendonUnit, skeleton: Skeleton, pose: Pose,
                transforms: dict[str, np.ndarray] | None = None) -> np.ndarray:
    if transforms is None:
        transforms = bone_world_transforms(skeleton, pose)
    return np.array([waypoint_position(wp, skeleton, pose, transforms)
                     for wp in m.waypoints])


def musculotendon_length(m: MusculotendonUnit, skeleton: Skeleton, pose: Pose,
                         transforms: dict[str, np.ndarray] | None = None) -> float:
    """Polyline length through the waypoints (origin to insertion)."""
    pts = muscle_path(m, skeleton, pose, transforms)
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def muscle_crosses_joint(m: MusculotendonUnit, skeleton: Skeleton, joint_id: str) -> bool:
    """True when the muscle's length can depend on the joint's coordinates:
    some skinning bone lies in the joint's subtree and some lies outside."""
    inside = outside = False
    sub = set(skeleton.subtree(joint_id))
    for wp in m.waypoints:
        for e in wp.skinning:
            if e.bone_id in sub:
                inside = True
            else:
                outside = True
    return inside and outside


# ---------------------------------------------------------------------------
# batched evaluation


@dataclass
class PoseBatch:
    """Struct-of-arrays pose collection for vectorized kinematics."""
    root_quat: np.ndarray                      # (B, 4)
    root_pos: np.ndarray                       # (B, 3)
    coords: dict[str, np.ndarray] = field(default_factory=dict)
    # per bone id: (B,) angles for revolute, (B, 4) quats for ball joints

    def __len__(self) -> int:
        return self.root_quat.shape[0]

    @staticmethod
    def from_poses(skeleton: Skeleton, poses) -> "PoseBatch":
        poses = list(poses)
        b = len(poses)
        batch = PoseBatch(
            root_quat=np.array([p.root_quat for p in poses]) if b else np.zeros((0, 4)),
            root_pos=np.array([p.root_pos for p in poses]) if b else np.zeros((0, 3)),
        )
        for bid in skeleton.topo_order:
            bone = skeleton.bone(bid)
            if bone.joint_type == "free_root":
                continue
            if bone.joint_type == "revolute":
                batch.coords[bid] = np.array(
                    [p.coord(skeleton, bid) for p in poses])
            else:
                batch.coords[bid] = np.array(
                    [p.coord(skeleton, bid) for p in poses]).reshape(b, 4)
        return batch

    @staticmethod
    def repeated(skeleton: Skeleton, pose: Pose, count: int) -> "PoseBatch":
        batch = PoseBatch(
            root_quat=np.tile(pose.root_quat, (count, 1)),
            root_pos=np.tile(pose.root_pos, (count, 1)),
        )
        for bid in skeleton.topo_order:
            bone = skeleton.bone(bid)
            if bone.joint_type == "free_root":
                continue
            c = pose.coord(skeleton, bid)
            if bone.joint_type == "revolute":
                batch.coords[bid] = np.full(count, float(c))
            else:
                batch.coords[bid] = np.tile(np.asarray(c, dtype=float), (count, 1))
        return batch

    def pose(self, i: int) -> Pose:
        coords: dict[str, np.ndarray | float] = {}
        for bid, arr in self.coords.items():
            coords[bid] = float(arr[i]) if arr.ndim == 1 else arr[i].copy()
        return Pose(self.root_quat[i].copy(), self.root_pos[i].copy(), coords)

    def poses(self):
        for i in range(len(self)):
            yield self.pose(i)


def bone_world_transforms_batch(skeleton: Skeleton,
                                batch: PoseBatch) -> dict[str, np.ndarray]:
    """Per-bone (B, 4, 4) world transforms."""
    b = len(batch)
    out: dict[str, np.ndarray] = {}
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        t = np.zeros((b, 4, 4))
        t[:, 3, 3] = 1.0
        if bone.joint_type == "free_root":
            t[:, :3, :3] = quat_to_matrix_batch(batch.root_quat)
            t[:, :3, 3] = batch.root_pos
            out[bid] = t
            continue
        if bone.joint_type == "revolute":
            angles = batch.coords[bid]
            axis = bone.joint_axis / np.linalg.norm(bone.joint_axis)
            half = 0.5 * angles
            quats = np.concatenate(
                [np.cos(half)[:, None], np.sin(half)[:, None] * axis[None, :]], axis=1)
        else:
            quats = batch.coords[bid]
            quats = quats / np.linalg.norm(quats, axis=1, keepdims=True)
        rot = quat_to_matrix_batch(quats)
        rest = quat_to_matrix(bone.rest_rotation)
        t[:, :3, :3] = np.einsum("ij,bjk->bik", rest, rot)
        t[:, :3, 3] = bone.local_offset
        out[bid] = np.matmul(out[bone.parent], t)
    return out


def muscle_lengths_batch(model: BodyModel, batch: PoseBatch,
                         muscles: list[MusculotendonUnit] | None = None,
                         transforms: dict[str, np.ndarray] | None = None) -> np.ndarray:
    """(B, M) musculotendon lengths for the batch."""
    if muscles is None:
        muscles = list(model.muscles)
    if transforms is None:
        transforms = bone_world_transforms_batch(model.skeleton, batch)
    b = len(batch)
    out = np.empty((b, len(muscles)))
    for mi, m in enumerate(muscles):
        pts = np.empty((b, len(m.waypoints), 3))
        for wi, wp in enumerate(m.waypoints):
            acc = np.zeros((b, 3))
            for e in wp.skinning:
                t = transforms[e.bone_id]
                acc += e.weight * (np.einsum("bij,j->bi", t[:, :3, :3], e.local_coords)
                                   + t[:, :3, 3])
            pts[:, wi, :] = acc
        seg = np.diff(pts, axis=1)
        out[:, mi] = np.linalg.norm(seg, axis=2).sum(axis=1)
    return out


# ---------------------------------------------------------------------------
# generalized-coordinate perturbations (shared convention for Jacobians,
# finite differences, and integration)
#
# Root: 3 rotational dofs (body-frame axes) then 3 translational (world).
# Ball joints: 3 rotational dofs about the child frame axes (right-multiply).
# Revolute: the scalar angle itself.


def perturb_pose(skeleton: Skeleton, pose: Pose, dof: int, eps: float) -> Pose:
    out = pose.copy()
    for bid in skeleton.topo_order:
        sl = skeleton.dof_slices[bid]
        if not (sl.start <= dof < sl.stop):
            continue
        bone = skeleton.bone(bid)
        k = dof - sl.start
        if bone.joint_type == "free_root":
            if k < 3:
                axis = np.zeros(3)
                axis[k] = 1.0
                out.root_quat = quat_normalize(
                    quat_mul(out.root_quat, quat_from_axis_angle(axis, eps)))
            else:
                out.root_pos = out.root_pos.copy()
                out.root_pos[k - 3] += eps
        elif bone.joint_type == "revolute":
            out.joint_coords[bid] = float(pose.coord(skeleton, bid)) + eps
        else:
            axis = np.zeros(3)
            axis[k] = 1.0
            q = pose.coord(skeleton, bid)
            out.joint_coords[bid] = quat_normalize(
                quat_mul(q, quat_from_axis_angle(axis, eps)))
        return out
    raise IndexError(f"dof {dof} out of range")


def integrate_pose(skeleton: Skeleton, pose: Pose, velocity: np.ndarray,
                   dt: float) -> Pose:
    """First-order pose integration along a generalized velocity."""
    out = pose.copy()
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        sl = skeleton.dof_slices[bid]
        u = velocity[sl] * dt
        if bone.joint_type == "free_root":
            w = u[:3]
            angle = np.linalg.norm(w)
            if angle > 0:
                out.root_quat = quat_normalize(
                    quat_mul(out.root_quat, quat_from_axis_angle(w / angle, angle)))
            out.root_pos = out.root_pos + u[3:]
        elif bone.joint_type == "revolute":
            out.joint_coords[bid] = float(pose.coord(skeleton, bid)) + float(u[0])
        else:
            angle = np.linalg.norm(u)
            if angle > 0:
                out.joint_coords[bid] = quat_normalize(quat_mul(
                    pose.coord(skeleton, bid), quat_from_axis_angle(u / angle, angle)))
    return out
