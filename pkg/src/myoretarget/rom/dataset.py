"""Pose datasets: containers, left/right mirroring, and provenance."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional

import numpy as np

from ..anatomy import ModelError, Pose, PoseBatch, Skeleton


@dataclass(frozen=True)
class DatasetProvenance:
    mirrored: bool = False
    subsample_ratio: float = 1.0
    source: str = "memory"


@dataclass
class PoseDataset:
    """A collection of full-body poses used for maximal-length estimation."""
    batch: PoseBatch
    provenance: DatasetProvenance = field(default_factory=DatasetProvenance)

    def __len__(self) -> int:
        return len(self.batch)

    def __getitem__(self, i: int) -> Pose:
        return self.batch.pose(i)

    def __iter__(self):
        return self.batch.poses()

    @staticmethod
    def from_poses(skeleton: Skeleton, poses: Iterable[Pose],
                   provenance: DatasetProvenance | None = None) -> "PoseDataset":
        return PoseDataset(PoseBatch.from_poses(skeleton, poses),
                           provenance or DatasetProvenance())

    def map_poses(self, skeleton: Skeleton,
                  fn: Callable[[Pose], Pose]) -> "PoseDataset":
        return PoseDataset(
            PoseBatch.from_poses(skeleton, (fn(p) for p in self)),
            self.provenance)

    def subsampled(self, skeleton: Skeleton, ratio: float) -> "PoseDataset":
        """Keep every round(1/ratio)-th pose."""
        if not (0.0 < ratio <= 1.0):
            raise ValueError("subsample ratio must lie in (0, 1]")
        step = max(1, round(1.0 / ratio))
        poses = [self[i] for i in range(0, len(self), step)]
        return PoseDataset(
            PoseBatch.from_poses(skeleton, poses),
            replace(self.provenance, subsample_ratio=self.provenance.subsample_ratio * ratio))

    def mirrored(self, skeleton: Skeleton) -> "PoseDataset":
        """Append the left/right reflection of every pose; the result is
        closed under reflection."""
        poses = list(self)
        poses.extend(mirror_pose(skeleton, p) for p in list(self))
        return PoseDataset(PoseBatch.from_poses(skeleton, poses),
                           replace(self.provenance, mirrored=True))


def mean_cone_direction(skeleton: Skeleton, dataset: "PoseDataset",
                        joint_id: str) -> np.ndarray:
    """Normalized spherical mean of a ball joint's posed shaft directions
    over the dataset; the natural center for cone-style ROM edits."""
    from ..geometry import quat_rotate
    bone = skeleton.bone(joint_id)
    if bone.joint_type != "ball_and_socket":
        raise ModelError(f"joint {joint_id}: cone center needs a ball joint")
    total = np.zeros(3)
    for pose in dataset:
        total += quat_rotate(np.asarray(pose.coord(skeleton, joint_id)),
                             bone.shaft_axis)
    n = np.linalg.norm(total)
    if n < 1e-12:
        return bone.shaft_axis.copy()
    return total / n


# ---------------------------------------------------------------------------
# left/right mirroring across the sagittal (y = 0) plane
#
# Bone pairing uses the "_l"/"_r" suffix convention; unpaired bones reflect
# onto themselves. Quaternions conjugate by diag(1,-1,1):
# (w,x,y,z) -> (w,-x,y,-z). Revolute angles flip sign unless the paired
# joint's axis is the negated reflection of the source axis.

_MIRROR = np.diag([1.0, -1.0, 1.0])


def mirror_bone_id(bone_id: str) -> str:
    if bone_id.endswith("_l"):
        return bone_id[:-2] + "_r"
    if bone_id.endswith("_r"):
        return bone_id[:-2] + "_l"
    return bone_id


def _mirror_quat(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], q[2], -q[3]])


def _revolute_mirror_sign(skeleton: Skeleton, src: str, dst: str) -> float:
    a = skeleton.bone(src).joint_axis
    b = skeleton.bone(dst).joint_axis
    if np.allclose(_MIRROR @ a, -b, atol=1e-9):
        return 1.0
    if np.allclose(_MIRROR @ a, b, atol=1e-9):
        return -1.0
    raise ModelError(
        f"revolute axes of {src}/{dst} are not sagittal-mirror compatible")


def mirror_pose(skeleton: Skeleton, pose: Pose) -> Pose:
    coords: dict[str, np.ndarray | float] = {}
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        if bone.joint_type == "free_root":
            continue
        partner = mirror_bone_id(bid)
        if partner not in skeleton.index:
            raise ModelError(f"bone {bid} has no mirror partner {partner}")
        src = pose.coord(skeleton, bid)
        if bone.joint_type == "revolute":
            coords[partner] = _revolute_mirror_sign(skeleton, bid, partner) * float(src)
        else:
            coords[partner] = _mirror_quat(np.asarray(src, dtype=float))
    root_pos = _MIRROR @ pose.root_pos
    root_quat = _mirror_quat(pose.root_quat)
    return Pose(root_quat, root_pos, coords)
