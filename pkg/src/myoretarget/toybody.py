"""Desk-scale reference body: a 13-bone biped (trunk, legs, arms) with 24
musculotendon units, plus a seeded synthetic stretching-pose generator.

Conventions: z up, x forward, y to the model's left. Limb shafts point
down (-z) at rest; feet point forward. Left/right bones use the _l/_r
suffix so the sagittal mirroring utilities apply.
"""
from __future__ import annotations

import numpy as np

from .anatomy import (BodyModel, Bone, JointMotion, MusculotendonUnit, Pose,
                      Skeleton, SkinEntry, Waypoint, bone_world_transforms)
from .geometry import quat_from_axis_angle, quat_mul
from .rom import PoseDataset, estimate_lengths, recompose_rotation, relax_keyposes
from .rom.rotation import JointDecomposition

DOWN = np.array([0.0, 0.0, -1.0])
UP = np.array([0.0, 0.0, 1.0])
FWD = np.array([1.0, 0.0, 0.0])

DEFAULT_SEED = 42
DEFAULT_DATASET_SIZE = 5000
RELAX_TORQUE_THRESHOLD = 50.0  # N m


def _rod_inertia(mass: float, length: float, shaft: np.ndarray,
                 radius: float = 0.04) -> np.ndarray:
    shaft = np.asarray(shaft, dtype=float)
    perp = mass * (3 * radius ** 2 + length ** 2) / 12.0
    axial = 0.5 * mass * radius ** 2
    outer = np.outer(shaft, shaft)
    return perp * (np.eye(3) - outer) + axial * outer


def _bone(bid, parent, joint, offset, shaft, mass, length, axis=None, group=None):
    return Bone(id=bid, parent=parent, joint_type=joint,
                local_offset=np.asarray(offset, dtype=float),
                shaft_axis=np.asarray(shaft, dtype=float), mass=mass,
                inertia=_rod_inertia(mass, length, shaft), joint_axis=axis,
                length=length, group=group)


def build_toy_skeleton() -> Skeleton:
    hip_y, shoulder_y = 0.10, 0.20
    bones = [
        _bone("pelvis", None, "free_root", (0, 0, 0), UP, 10.0, 0.12, group="trunk"),
        _bone("spine", "pelvis", "ball_and_socket", (0, 0, 0.12), UP, 8.0, 0.18,
              group="trunk"),
        _bone("chest", "spine", "ball_and_socket", (0, 0, 0.18), UP, 12.0, 0.18,
              group="trunk"),
    ]
    for side, s in (("l", 1.0), ("r", -1.0)):
        bones += [
            _bone(f"femur_{side}", "pelvis", "ball_and_socket",
                  (0, s * hip_y, -0.02), DOWN, 7.0, 0.44),
            _bone(f"tibia_{side}", f"femur_{side}", "revolute",
                  (0, 0, -0.44), DOWN, 3.5, 0.43, axis=(0, 1, 0)),
            _bone(f"foot_{side}", f"tibia_{side}", "ball_and_socket",
                  (0, 0, -0.43), FWD, 1.0, 0.20, group="foot"),
            _bone(f"humerus_{side}", "chest", "ball_and_socket",
                  (0, s * shoulder_y, 0.14), DOWN, 2.0, 0.30),
            _bone(f"ulna_{side}", f"humerus_{side}", "revolute",
                  (0, 0, -0.30), DOWN, 1.2, 0.28, axis=(0, -1, 0)),
        ]
    return Skeleton(bones)


# motions (left side; right side mirrors axis -> (ax, ay, az) -> (-ax, ay, -az)
# for the rotation mirror, which leaves sagittal y-axis rotations unchanged)

def toy_motions() -> dict[str, JointMotion]:
    motions = {}

    def add(name, joint, axis, rng):
        motions[name] = JointMotion(name, joint, np.asarray(axis, float), rng)

    for side, s in (("l", 1.0), ("r", -1.0)):
        add(f"hip_flexion_{side}", f"femur_{side}", (0, -1, 0), (-0.35, 1.4))
        add(f"hip_abduction_{side}", f"femur_{side}", (s, 0, 0), (-0.35, 0.8))
        add(f"hip_rotation_{side}", f"femur_{side}", (0, 0, -s), (-0.5, 0.5))
        add(f"knee_flexion_{side}", f"tibia_{side}", (0, 1, 0), (0.0, 1.25))
        add(f"ankle_plantarflexion_{side}", f"foot_{side}", (0, 1, 0), (-0.5, 0.8))
        add(f"elbow_flexion_{side}", f"ulna_{side}", (0, -1, 0), (0.0, 1.5))
    add("spine_flexion", "spine", (0, 1, 0), (-0.3, 0.6))
    return motions


_MUSCLE_SPECS = [
    # name, [(bone, world point or blend), ...], f_max, rho, motion names
    # blend entries: ((bone_a, bone_b), point[, (w_a, w_b)]) skin across
    # two bones, 50/50 unless weights are given
    ("hip_flexor", [("pelvis", (0.06, 0.10, 0.02)),
                    (("pelvis", "femur"), (0.07, 0.10, -0.06)),
                    ("femur", (0.028, 0.112, -0.14))],
     1200.0, 1.0, ["hip_flexion", "hip_abduction", "hip_rotation"]),
    ("hip_extensor", [("pelvis", (-0.08, 0.08, 0.06)),
                      (("pelvis", "femur"), (-0.07, 0.10, -0.06)),
                      ("femur", (-0.022, 0.082, -0.16))],
     1500.0, 0.8, ["hip_flexion", "hip_abduction", "hip_rotation"]),
    ("hamstring", [("pelvis", (-0.05, 0.08, -0.04)),
                   (("femur", "tibia"), (-0.025, 0.10, -0.47)),
                   ("tibia", (-0.02, 0.09, -0.50))],
     1300.0, 2.0, ["hip_flexion", "hip_abduction", "hip_rotation",
                   "knee_flexion"]),
    ("psoas", [("pelvis", (0.05, 0.09, -0.01)),
               ("femur", (0.038, 0.108, -0.25)),
               ("femur", (0.033, 0.112, -0.42))],
     900.0, 1.8, ["hip_flexion", "hip_abduction", "hip_rotation"]),
    ("vastus", [("femur", (0.045, 0.10, -0.18)),
                (("femur", "tibia"), (0.05, 0.10, -0.455)),
                ("tibia", (0.035, 0.10, -0.51))],
     1800.0, 1.5, ["knee_flexion"]),
    ("gastroc", [("femur", (-0.04, 0.10, -0.40)),
                 ("tibia", (-0.045, 0.10, -0.50)),
                 ("foot", (-0.06, 0.10, -0.92))],
     1400.0, 3.0, ["knee_flexion", "ankle_plantarflexion"]),
    ("tibialis", [("tibia", (0.045, 0.10, -0.60)),
                  ("foot", (0.06, 0.10, -0.87))],
     600.0, 2.0, ["ankle_plantarflexion"]),
    ("hip_abductor", [("pelvis", (0.0, 0.13, 0.04)),
                      ("femur", (0.012, 0.143, -0.10))],
     1000.0, 0.8, ["hip_abduction", "hip_flexion", "hip_rotation"]),
    ("hip_adductor", [("pelvis", (0.0, 0.03, -0.03)),
                      ("femur", (-0.012, 0.078, -0.20))],
     900.0, 0.9, ["hip_abduction", "hip_flexion", "hip_rotation"]),
    # short near-joint rotator: steeply loads large twist in either sense
    ("hip_rotator", [("pelvis", (0.045, 0.105, -0.015)),
                     ("femur", (0.032, 0.137, -0.07))],
     400.0, 0.6, ["hip_rotation", "hip_flexion", "hip_abduction"]),
    # capsule-like stabilizer spanning the joint axially: caps total swing
    # so near-antipodal configurations never read as valid
    ("hip_capsule", [("pelvis", (0.005, 0.095, -0.065)),
                     ("femur", (0.005, 0.105, -0.13))],
     350.0, 0.5, ["hip_flexion", "hip_abduction"]),
    ("biceps", [("humerus", (0.03, 0.20, 0.40)),
                (("humerus", "ulna"), (0.035, 0.20, 0.16), (0.75, 0.25)),
                ("ulna", (0.02, 0.20, 0.10))],
     500.0, 1.5, ["elbow_flexion"]),
    ("triceps", [("humerus", (-0.03, 0.20, 0.39)),
                 (("humerus", "ulna"), (-0.035, 0.20, 0.15), (0.7, 0.3)),
                 ("ulna", (-0.02, 0.20, 0.11))],
     600.0, 1.6, ["elbow_flexion"]),
]

_TRUNK_SPECS = [
    ("trunk_flexor", [("pelvis", (0.07, 0.0, 0.02)),
                      ("spine", (0.065, 0.0, 0.20)),
                      ("chest", (0.06, 0.0, 0.38))],
     1200.0, 0.5, ["spine_flexion"]),
    ("trunk_extensor", [("pelvis", (-0.07, 0.0, 0.02)),
                        ("spine", (-0.065, 0.0, 0.20)),
                        ("chest", (-0.06, 0.0, 0.38))],
     1200.0, 0.5, ["spine_flexion"]),
]


def _world_to_local(transforms, bone_id, world):
    t = transforms[bone_id]
    return t[:3, :3].T @ (np.asarray(world, dtype=float) - t[:3, 3])


def _make_waypoint(transforms, entry, side_suffix):
    bones, world = entry[0], entry[1]
    weights = entry[2] if len(entry) > 2 else (0.5, 0.5)

    def qualify(b):
        if b in ("pelvis", "spine", "chest"):
            return b
        return f"{b}{side_suffix}"

    if isinstance(bones, tuple):
        a, b = (qualify(x) for x in bones)
        return Waypoint((
            SkinEntry(a, weights[0], _world_to_local(transforms, a, world)),
            SkinEntry(b, weights[1], _world_to_local(transforms, b, world)),
        ))
    bid = qualify(bones)
    return Waypoint.on_bone(bid, _world_to_local(transforms, bid, world))


def build_toy_muscles(skeleton: Skeleton) -> list[MusculotendonUnit]:
    transforms = bone_world_transforms(skeleton, Pose())
    motions = toy_motions()
    mirror = np.array([1.0, -1.0, 1.0])
    muscles = []
    for side, flip in (("l", False), ("r", True)):
        for name, path, f_max, rho, motion_names in _MUSCLE_SPECS:
            entries = []
            for spec in path:
                w = np.asarray(spec[1], dtype=float)
                entries.append((spec[0], mirror * w if flip else w, *spec[2:]))
            wps = [_make_waypoint(transforms, e, f"_{side}") for e in entries]
            rest = sum(
                float(np.linalg.norm(
                    _wp_world(transforms, wps[i + 1]) - _wp_world(transforms, wps[i])))
                for i in range(len(wps) - 1))
            l_m0 = rest / (1.0 + rho)
            muscles.append(MusculotendonUnit(
                id=f"{name}_{side}", waypoints=tuple(wps), l_m0=l_m0,
                l_t0=rho * l_m0, f_max=f_max,
                joint_motions=tuple(motions[f"{mn}_{side}"] for mn in motion_names)))
    for name, path, f_max, rho, motion_names in _TRUNK_SPECS:
        wps = [_make_waypoint(transforms, (spec[0], np.asarray(spec[1], float),
                                           *spec[2:]), "")
               for spec in path]
        rest = sum(
            float(np.linalg.norm(
                _wp_world(transforms, wps[i + 1]) - _wp_world(transforms, wps[i])))
            for i in range(len(wps) - 1))
        l_m0 = rest / (1.0 + rho)
        muscles.append(MusculotendonUnit(
            id=name, waypoints=tuple(wps), l_m0=l_m0, l_t0=rho * l_m0,
            f_max=f_max, joint_motions=tuple(motions[mn] for mn in motion_names)))
    return muscles


def _wp_world(transforms, wp):
    p = np.zeros(3)
    for e in wp.skinning:
        t = transforms[e.bone_id]
        p += e.weight * (t[:3, :3] @ e.local_coords + t[:3, 3])
    return p


def standing_pose() -> Pose:
    return Pose()


def t_pose() -> Pose:
    pose = Pose()
    pose.joint_coords["humerus_l"] = quat_from_axis_angle((1, 0, 0), np.pi / 2)
    pose.joint_coords["humerus_r"] = quat_from_axis_angle((1, 0, 0), -np.pi / 2)
    return pose


def toy_keyposes() -> list[Pose]:
    return [standing_pose(), t_pose()]


def _ball_coord(flex: float, abd: float, twist: float) -> np.ndarray:
    """Hip/shoulder-style coordinate: positive flexion swings the down
    shaft forward (+x), positive abduction to +y, plus an axial twist."""
    v = DOWN
    v = _rot(quat_from_axis_angle((0, -1, 0), flex), v)
    v = _rot(quat_from_axis_angle((1, 0, 0), abd), v)
    return recompose_rotation(JointDecomposition(twist, v), DOWN)


def _rot(q, v):
    from .geometry import quat_rotate
    return quat_rotate(q, v)


def synthetic_dataset(skeleton: Skeleton, n_poses: int = DEFAULT_DATASET_SIZE,
                      seed: int = DEFAULT_SEED) -> PoseDataset:
    """Seeded random stretching poses with human-like joint coupling: the
    deeper the same-side knee is flexed, the further the hip may flex."""
    rng = np.random.default_rng(seed)
    poses = [standing_pose()]
    while len(poses) < n_poses:
        pose = Pose()
        for side, s in (("l", 1.0), ("r", -1.0)):
            knee = rng.uniform(0.0, 2.1)
            hip_flex_max = min(0.9 + 0.55 * knee, 1.9)
            hip = _ball_coord(
                flex=rng.uniform(-0.6, hip_flex_max),
                abd=s * rng.uniform(-0.5, 1.2),
                twist=rng.uniform(-0.9, 0.9))
            ankle = _ball_coord(
                flex=rng.uniform(-0.5, 0.8),
                abd=s * rng.uniform(-0.25, 0.25),
                twist=rng.uniform(-0.2, 0.2))
            shoulder = _ball_coord(
                flex=rng.uniform(-0.7, 2.2),
                abd=s * rng.uniform(-0.4, 2.0),
                twist=rng.uniform(-0.8, 0.8))
            pose.joint_coords[f"femur_{side}"] = hip
            pose.joint_coords[f"tibia_{side}"] = knee
            pose.joint_coords[f"foot_{side}"] = ankle
            pose.joint_coords[f"humerus_{side}"] = shoulder
            pose.joint_coords[f"ulna_{side}"] = rng.uniform(0.0, 2.5)
        for joint in ("spine", "chest"):
            pose.joint_coords[joint] = _ball_coord(
                flex=rng.uniform(-0.3, 0.6),
                abd=rng.uniform(-0.3, 0.3),
                twist=rng.uniform(-0.4, 0.4))
        poses.append(pose)
    return PoseDataset.from_poses(skeleton, poses)


def build_toy_model(n_poses: int = DEFAULT_DATASET_SIZE, seed: int = DEFAULT_SEED,
                    relax: bool = True) -> BodyModel:
    """Reference model with lengths calibrated on the default synthetic
    dataset (maximal-length estimation plus key-pose relaxation)."""
    skeleton = build_toy_skeleton()
    model = BodyModel(skeleton, build_toy_muscles(skeleton))
    dataset = synthetic_dataset(skeleton, n_poses, seed)
    model = estimate_lengths(model, dataset)
    if relax:
        model, _ = relax_keyposes(model, toy_keyposes(),
                                  torque_threshold=RELAX_TORQUE_THRESHOLD)
    return model


def toy_reference_path() -> str:
    """Path of the pre-calibrated reference model shipped with the package."""
    from pathlib import Path
    return str(Path(__file__).parent / "data" / "toy_reference.msk.json")


def load_toy_reference() -> BodyModel:
    from .service.io import load_model
    return load_model(toy_reference_path())
