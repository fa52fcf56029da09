"""Skeleton, pose, and musculotendon data types."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from ..geometry import IDENTITY_QUAT, quat_normalize
from .curves import CurveSet

JOINT_TYPES = ("revolute", "ball_and_socket", "free_root")


class ModelError(ValueError):
    """Invalid model construction or invariant violation."""


@dataclass(frozen=True)
class ShapeParams:
    """Per-bone deformation state relative to the reference shape."""
    proximal_head_scale: float = 1.0
    distal_head_scale: float = 1.0
    elongation: float = 1.0
    torsion_angle: float = 0.0

    def is_identity(self, tol: float = 0.0) -> bool:
        return (abs(self.proximal_head_scale - 1.0) <= tol
                and abs(self.distal_head_scale - 1.0) <= tol
                and abs(self.elongation - 1.0) <= tol
                and abs(self.torsion_angle) <= tol)


@dataclass(frozen=True)
class Bone:
    id: str
    parent: Optional[str]
    joint_type: str
    local_offset: np.ndarray          # from parent joint to this joint, rest pose (m)
    shaft_axis: np.ndarray            # unit bone-shaft direction in this bone's frame
    mass: float
    inertia: np.ndarray               # 3x3 about com, bone frame (kg m^2)
    shape_params: ShapeParams = field(default_factory=ShapeParams)
    joint_axis: Optional[np.ndarray] = None   # revolute rotation axis, bone frame
    rest_rotation: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    length: float = 0.1               # shaft length from joint along shaft_axis (m)
    com: Optional[np.ndarray] = None  # defaults to shaft midpoint
    group: Optional[str] = None       # e.g. "trunk", "hand", "foot"

    def __post_init__(self):
        if self.joint_type not in JOINT_TYPES:
            raise ModelError(f"bone {self.id}: unknown joint type {self.joint_type!r}")
        object.__setattr__(self, "local_offset", np.asarray(self.local_offset, dtype=float))
        axis = np.asarray(self.shaft_axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-8:
            raise ModelError(f"bone {self.id}: shaft_axis must be unit-norm")
        object.__setattr__(self, "shaft_axis", axis)
        if self.mass <= 0:
            raise ModelError(f"bone {self.id}: mass must be positive")
        inertia = np.asarray(self.inertia, dtype=float)
        if inertia.shape != (3, 3) or not np.allclose(inertia, inertia.T, atol=1e-9):
            raise ModelError(f"bone {self.id}: inertia must be symmetric 3x3")
        if np.any(np.linalg.eigvalsh(inertia) <= 0):
            raise ModelError(f"bone {self.id}: inertia must be positive-definite")
        object.__setattr__(self, "inertia", inertia)
        if self.joint_type == "revolute":
            if self.joint_axis is None:
                raise ModelError(f"bone {self.id}: revolute joint needs joint_axis")
            object.__setattr__(self, "joint_axis",
                               np.asarray(self.joint_axis, dtype=float))
        object.__setattr__(self, "rest_rotation",
                           quat_normalize(np.asarray(self.rest_rotation, dtype=float)))
        if self.com is None:
            object.__setattr__(self, "com", 0.5 * self.length * self.shaft_axis)
        else:
            object.__setattr__(self, "com", np.asarray(self.com, dtype=float))

    def dof_count(self) -> int:
        return {"free_root": 6, "ball_and_socket": 3, "revolute": 1}[self.joint_type]


class Skeleton:
    """Bone tree with a single free root. Immutable once constructed."""

    def __init__(self, bones: Iterable[Bone]):
        self.bones: tuple[Bone, ...] = tuple(bones)
        self.index = {b.id: i for i, b in enumerate(self.bones)}
        if len(self.index) != len(self.bones):
            raise ModelError("duplicate bone ids")
        roots = [b for b in self.bones if b.joint_type == "free_root"]
        if len(roots) != 1:
            raise ModelError(f"expected exactly one free_root bone, got {len(roots)}")
        if roots[0].parent is not None:
            raise ModelError("free_root bone cannot have a parent")
        self.root = roots[0]
        self.children: dict[str, list[str]] = {b.id: [] for b in self.bones}
        for b in self.bones:
            if b.joint_type != "free_root":
                if b.parent is None or b.parent not in self.index:
                    raise ModelError(f"bone {b.id}: missing or unknown parent {b.parent!r}")
                self.children[b.parent].append(b.id)
        self._check_tree()
        self.topo_order: tuple[str, ...] = tuple(self._topo())
        # generalized-coordinate layout, root first then topological order
        self.dof_slices: dict[str, slice] = {}
        at = 0
        for bid in self.topo_order:
            n = self.bone(bid).dof_count()
            self.dof_slices[bid] = slice(at, at + n)
            at += n
        self.dof_count: int = at

    def _check_tree(self):
        for b in self.bones:
            seen = {b.id}
            cur = b.parent
            while cur is not None:
                if cur in seen:
                    raise ModelError(f"parent cycle through bone {cur}")
                seen.add(cur)
                cur = self.bone(cur).parent

    def _topo(self) -> list[str]:
        order: list[str] = []
        stack = [self.root.id]
        while stack:
            bid = stack.pop()
            order.append(bid)
            stack.extend(reversed(self.children[bid]))
        return order

    def bone(self, bone_id: str) -> Bone:
        try:
            return self.bones[self.index[bone_id]]
        except KeyError:
            raise ModelError(f"unknown bone id {bone_id!r}") from None

    def is_ancestor(self, ancestor: str, bone_id: str) -> bool:
        cur: Optional[str] = bone_id
        while cur is not None:
            if cur == ancestor:
                return True
            cur = self.bone(cur).parent
        return False

    def subtree(self, bone_id: str) -> list[str]:
        out: list[str] = []
        stack = [bone_id]
        while stack:
            bid = stack.pop()
            out.append(bid)
            stack.extend(self.children[bid])
        return out

    def with_bones(self, bones: Iterable[Bone]) -> "Skeleton":
        return Skeleton(bones)


@dataclass
class Pose:
    """Full-body configuration: root rigid transform + per-joint coordinates.

    joint_coords maps bone id -> scalar angle (revolute) or unit quaternion
    [w, x, y, z] (ball-and-socket). The free root is described by root_quat
    and root_pos.
    """
    root_quat: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    root_pos: np.ndarray = field(default_factory=lambda: np.zeros(3))
    joint_coords: dict[str, np.ndarray | float] = field(default_factory=dict)

    def copy(self) -> "Pose":
        return Pose(self.root_quat.copy(), self.root_pos.copy(),
                    {k: (v.copy() if isinstance(v, np.ndarray) else v)
                     for k, v in self.joint_coords.items()})

    def coord(self, skeleton: Skeleton, bone_id: str):
        b = skeleton.bone(bone_id)
        if b.joint_type == "revolute":
            return float(self.joint_coords.get(bone_id, 0.0))
        q = self.joint_coords.get(bone_id)
        return IDENTITY_QUAT.copy() if q is None else np.asarray(q, dtype=float)


def rest_pose(skeleton: Skeleton) -> Pose:
    return Pose()


@dataclass(frozen=True)
class SkinEntry:
    bone_id: str
    weight: float
    local_coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "local_coords",
                           np.asarray(self.local_coords, dtype=float))


@dataclass(frozen=True)
class Waypoint:
    skinning: tuple[SkinEntry, ...]

    def __post_init__(self):
        entries = tuple(self.skinning)
        if not entries:
            raise ModelError("waypoint needs at least one skinning entry")
        w = np.array([e.weight for e in entries])
        if np.any(w < -1e-12):
            raise ModelError("waypoint skinning weights must be non-negative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ModelError(f"waypoint skinning weights must sum to 1 (got {w.sum():.12g})")
        object.__setattr__(self, "skinning", entries)

    @staticmethod
    def on_bone(bone_id: str, local_coords) -> "Waypoint":
        return Waypoint((SkinEntry(bone_id, 1.0, np.asarray(local_coords, float)),))


@dataclass(frozen=True)
class JointMotion:
    """A named joint motion: rotation about `axis` (joint-local) over an
    angle range; the normalized parameter theta in [0, 1] spans it."""
    name: str
    joint_id: str
    axis: np.ndarray
    angle_range: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "axis", np.asarray(self.axis, dtype=float))
        object.__setattr__(self, "angle_range",
                           (float(self.angle_range[0]), float(self.angle_range[1])))

    def angle(self, theta: float) -> float:
        lo, hi = self.angle_range
        return lo + theta * (hi - lo)


@dataclass(frozen=True)
class MusculotendonUnit:
    id: str
    waypoints: tuple[Waypoint, ...]   # ordered origin -> insertion
    l_m0: float                       # optimal fiber length (m)
    l_t0: float                       # tendon slack length (m)
    f_max: float                      # maximum isometric force (N)
    pennation: float = 0.0            # constant fiber-tendon angle (rad)
    k_m: float = 1.6                  # max fiber extension ratio
    k_t: float = 1.03                 # max tendon extension ratio
    joint_motions: tuple[JointMotion, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        if len(self.waypoints) < 2:
            raise ModelError(f"muscle {self.id}: needs >= 2 waypoints")
        if self.l_m0 <= 0:
            raise ModelError(f"muscle {self.id}: l_m0 must be positive")
        if self.l_t0 < 0:
            raise ModelError(f"muscle {self.id}: l_t0 must be non-negative")
        if not (0.0 <= self.pennation < np.pi / 2):
            raise ModelError(f"muscle {self.id}: pennation out of [0, pi/2)")
        if self.f_max <= 0:
            raise ModelError(f"muscle {self.id}: f_max must be positive")
        if self.k_m <= 1.0:
            raise ModelError(f"muscle {self.id}: k_m must exceed 1")
        if self.k_t < 1.0:
            raise ModelError(f"muscle {self.id}: k_t must be >= 1")
        object.__setattr__(self, "joint_motions", tuple(self.joint_motions))

    @property
    def ratio(self) -> float:
        """Tendon-to-fiber rest length ratio rho = l_t0 / l_m0."""
        return self.l_t0 / self.l_m0

    def with_lengths(self, l_m0: float, l_t0: float) -> "MusculotendonUnit":
        return replace(self, l_m0=l_m0, l_t0=l_t0)

    def with_waypoints(self, waypoints) -> "MusculotendonUnit":
        return replace(self, waypoints=tuple(waypoints))


class BodyModel:
    """Skeleton + musculature + force-length curves."""

    def __init__(self, skeleton: Skeleton, muscles: Iterable[MusculotendonUnit],
                 curves: CurveSet | None = None):
        self.skeleton = skeleton
        self.muscles: tuple[MusculotendonUnit, ...] = tuple(muscles)
        self.muscle_index = {m.id: i for i, m in enumerate(self.muscles)}
        if len(self.muscle_index) != len(self.muscles):
            raise ModelError("duplicate muscle ids")
        self.curves = curves if curves is not None else CurveSet.default()
        for m in self.muscles:
            for wi, wp in enumerate(m.waypoints):
                for e in wp.skinning:
                    if e.bone_id not in skeleton.index:
                        raise ModelError(
                            f"muscle {m.id} waypoint {wi}: unknown bone {e.bone_id!r}")

    def muscle(self, muscle_id: str) -> MusculotendonUnit:
        try:
            return self.muscles[self.muscle_index[muscle_id]]
        except KeyError:
            raise ModelError(f"unknown muscle id {muscle_id!r}") from None

    def with_muscles(self, muscles: Iterable[MusculotendonUnit]) -> "BodyModel":
        return BodyModel(self.skeleton, muscles, self.curves)

    def with_skeleton(self, skeleton: Skeleton) -> "BodyModel":
        return BodyModel(skeleton, self.muscles, self.curves)

    def replace_muscle(self, muscle: MusculotendonUnit) -> "BodyModel":
        out = list(self.muscles)
        out[self.muscle_index[muscle.id]] = muscle
        return self.with_muscles(out)

    def all_motions(self) -> list[JointMotion]:
        """Unique joint motions registered across muscles, stable order."""
        seen: dict[str, JointMotion] = {}
        for m in self.muscles:
            for jm in m.joint_motions:
                seen.setdefault(jm.name, jm)
        return list(seen.values())

    def muscles_for_motion(self, motion_name: str) -> list[MusculotendonUnit]:
        return [m for m in self.muscles
                if any(jm.name == motion_name for jm in m.joint_motions)]
