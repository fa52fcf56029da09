import numpy as np
import pytest

from myoretarget.anatomy import (BodyModel, Bone, CurveSet, JointMotion,
                                 MusculotendonUnit, Pose, Skeleton, Waypoint)
from myoretarget.toybody import load_toy_reference, synthetic_dataset


@pytest.fixture(scope="session")
def toy():
    return load_toy_reference()


@pytest.fixture(scope="session")
def toy_dataset_small(toy):
    return synthetic_dataset(toy.skeleton, 400, seed=42)


def rod_inertia(mass=1.0, length=0.3):
    i = mass * length ** 2 / 12.0
    return np.diag([i, i, 0.05 * i + 1e-6])


def make_hinge(offset=0.1, muscle_offset=0.05, l_m0=0.08, rho=1.0,
               f_max=100.0, axis=(0, 0, 1), motion_range=(0.0, 1.5)):
    """Planar hinge: root bone plus one revolute link rotating about z,
    with a single straight muscle from the root to the link at a
    perpendicular standoff. Lever geometry is analytic."""
    bones = [
        Bone("base", None, "free_root", np.zeros(3), np.array([1.0, 0, 0]),
             mass=1.0, inertia=rod_inertia(), length=offset),
        Bone("link", "base", "revolute", np.array([offset, 0.0, 0.0]),
             np.array([1.0, 0, 0]), mass=1.0, inertia=rod_inertia(),
             joint_axis=np.asarray(axis, dtype=float), length=0.3),
    ]
    skeleton = Skeleton(bones)
    motion = JointMotion("hinge_swing", "link", np.asarray(axis, dtype=float),
                         motion_range)
    muscle = MusculotendonUnit(
        id="hinge_muscle",
        waypoints=(
            Waypoint.on_bone("base", np.array([0.0, muscle_offset, 0.0])),
            Waypoint.on_bone("link", np.array([0.1, muscle_offset, 0.0])),
        ),
        l_m0=l_m0, l_t0=rho * l_m0, f_max=f_max,
        joint_motions=(motion,))
    return BodyModel(skeleton, [muscle]), motion


def make_three_link(angles=(0.3, -0.7, 1.1)):
    """Serial chain of three revolute links about z for FK oracles."""
    bones = [
        Bone("b0", None, "free_root", np.zeros(3), np.array([1.0, 0, 0]),
             mass=1.0, inertia=rod_inertia(), length=0.2),
    ]
    for i in range(3):
        bones.append(Bone(
            f"b{i+1}", f"b{i}", "revolute",
            np.array([0.2, 0.05 * i, 0.0]), np.array([1.0, 0, 0]),
            mass=0.5, inertia=rod_inertia(0.5, 0.2),
            joint_axis=np.array([0.0, 0.0, 1.0]), length=0.2))
    skeleton = Skeleton(bones)
    pose = Pose()
    for i, a in enumerate(angles):
        pose.joint_coords[f"b{i+1}"] = a
    return skeleton, pose
