from .curves import CurveParams, CurveSet
from .equilibrium import (EquilibriumResult, fiber_equilibrium,
                          fiber_equilibrium_batch, max_musculotendon_length,
                          muscle_stretch_limit)
from .kinematics import (PoseBatch, bone_world_transform, bone_world_transforms,
                         bone_world_transforms_batch, integrate_pose,
                         muscle_crosses_joint, muscle_lengths_batch, muscle_path,
                         musculotendon_length, perturb_pose, waypoint_position)
from .model import (BodyModel, Bone, JointMotion, ModelError, MusculotendonUnit,
                    Pose, ShapeParams, Skeleton, SkinEntry, Waypoint, rest_pose)

__all__ = [
    "BodyModel", "Bone", "CurveParams", "CurveSet", "EquilibriumResult",
    "JointMotion", "ModelError", "MusculotendonUnit", "Pose", "PoseBatch",
    "ShapeParams", "Skeleton", "SkinEntry", "Waypoint",
    "bone_world_transform", "bone_world_transforms", "bone_world_transforms_batch",
    "fiber_equilibrium", "fiber_equilibrium_batch", "integrate_pose",
    "max_musculotendon_length", "muscle_crosses_joint", "muscle_lengths_batch",
    "muscle_path", "muscle_stretch_limit", "musculotendon_length",
    "perturb_pose", "rest_pose", "waypoint_position",
]
