import numpy as np
import pytest

from myoretarget.anatomy import Pose, bone_world_transforms, musculotendon_length
from myoretarget.geometry import quat_from_axis_angle, quat_mul, quat_rotate
from myoretarget.retarget import (BoneParams, SkeletonParams, TrunkParams,
                                  anchored_model, apply_skeleton_params,
                                  deform_point, initial_waypoint_guess,
                                  naive_linear_model, scale_physics,
                                  scaling_factors, transplant_model)


def test_identity_params_is_model_identity(toy):
    out = apply_skeleton_params(toy.skeleton, SkeletonParams.identity())
    for a, b in zip(toy.skeleton.bones, out.bones):
        np.testing.assert_allclose(a.local_offset, b.local_offset, atol=1e-12)
        np.testing.assert_allclose(a.rest_rotation, b.rest_rotation, atol=1e-12)
        assert a.length == pytest.approx(b.length, abs=1e-12)
        assert a.mass == pytest.approx(b.mass, abs=1e-12)
        np.testing.assert_allclose(a.inertia, b.inertia, atol=1e-12)


def test_limb_elongation_scales_joint_distances(toy):
    params = SkeletonParams(bones={
        "femur": BoneParams(elongate=2.5), "tibia": BoneParams(elongate=2.5),
        "humerus": BoneParams(elongate=2.5), "ulna": BoneParams(elongate=2.5)})
    out = apply_skeleton_params(toy.skeleton, params)
    t_ref = bone_world_transforms(toy.skeleton, Pose())
    t_out = bone_world_transforms(out, Pose())
    for parent, child in (("femur_l", "tibia_l"), ("tibia_r", "foot_r"),
                          ("humerus_l", "ulna_l")):
        d_ref = np.linalg.norm(t_ref[child][:3, 3] - t_ref[parent][:3, 3])
        d_out = np.linalg.norm(t_out[child][:3, 3] - t_out[parent][:3, 3])
        assert d_out == pytest.approx(2.5 * d_ref, rel=1e-12)


def test_torsion_prerotates_distal_frame(toy):
    torsion = np.radians(-10.0)
    params = SkeletonParams(
        bones={"femur_l": BoneParams(elongate=0.6, torsion=torsion)},
        symmetric=False)
    out = apply_skeleton_params(toy.skeleton, params)
    femur = out.bone("femur_l")
    assert femur.length == pytest.approx(0.6 * toy.skeleton.bone("femur_l").length)
    tibia_ref = toy.skeleton.bone("tibia_l")
    tibia_out = out.bone("tibia_l")
    expected = quat_mul(quat_from_axis_angle(femur.shaft_axis, torsion),
                        tibia_ref.rest_rotation)
    q = tibia_out.rest_rotation
    if q[0] * expected[0] < 0:
        q = -q
    np.testing.assert_allclose(q, expected, atol=1e-12)
    np.testing.assert_allclose(
        tibia_out.local_offset,
        0.6 * quat_rotate(quat_from_axis_angle(femur.shaft_axis, torsion),
                          tibia_ref.local_offset), atol=1e-12)


def test_symmetric_key_applies_to_both_sides_with_mirrored_torsion(toy):
    params = SkeletonParams(bones={"femur": BoneParams(elongate=1.2,
                                                       torsion=0.3)})
    resolved = params.resolve(toy.skeleton)
    assert resolved["femur_l"].elongate == 1.2
    assert resolved["femur_r"].elongate == 1.2
    assert resolved["femur_l"].torsion == pytest.approx(0.3)
    assert resolved["femur_r"].torsion == pytest.approx(-0.3)


def test_trunk_lumped_scaling(toy):
    params = SkeletonParams(trunk=TrunkParams(elongate=2.0, expand=0.6,
                                              mass_scale=2.0))
    out = apply_skeleton_params(toy.skeleton, params)
    # spine sits along the trunk axis: its offset elongates
    assert out.bone("spine").local_offset[2] == pytest.approx(
        2.0 * toy.skeleton.bone("spine").local_offset[2])
    # hip offsets are radial on the pelvis: they follow expand
    assert out.bone("femur_l").local_offset[1] == pytest.approx(
        0.6 * toy.skeleton.bone("femur_l").local_offset[1])
    assert out.bone("pelvis").mass == pytest.approx(
        2.0 * toy.skeleton.bone("pelvis").mass)


def test_scale_physics_identity(toy):
    out = scale_physics(toy, 1.0)
    for a, b in zip(toy.muscles, out.muscles):
        assert a.f_max == b.f_max
    for a, b in zip(toy.skeleton.bones, out.skeleton.bones):
        assert a.mass == b.mass


def test_scale_physics_exponents(toy):
    out = scale_physics(toy, 2.0)
    for a, b in zip(toy.skeleton.bones, out.skeleton.bones):
        assert b.mass == pytest.approx(8.0 * a.mass, rel=1e-15)
        np.testing.assert_allclose(b.inertia, 32.0 * a.inertia, rtol=1e-15)
    for a, b in zip(toy.muscles, out.muscles):
        assert b.f_max == pytest.approx(8.0 * a.f_max, rel=1e-15)


def test_scaling_factors_time_rule():
    f = scaling_factors(4.0)
    assert f["time"] == pytest.approx(2.0)
    assert f["velocity"] == pytest.approx(2.0)
    assert f["stiffness"] == pytest.approx(16.0)
    assert f["damping"] == pytest.approx(32.0)


# -- waypoint anchoring -------------------------------------------------------


def oracle_anchor_map(bone, bp, x):
    # independent closed-form cylinder-proxy mapping
    s = bone.shaft_axis
    u = float(np.dot(x, s))
    r = np.asarray(x, float) - u * s
    t = np.clip(u / bone.length, 0.0, 1.0)
    h = (1 - t) * bp.proximal_head_scale + t * bp.distal_head_scale
    c, si = np.cos(bp.torsion * t), np.sin(bp.torsion * t)
    k = np.cross(s, r)
    r_rot = r * c + k * si + s * np.dot(s, r) * (1 - c)
    return bp.elongate * u * s + h * r_rot


def test_identity_guess_preserves_waypoints(toy):
    out = initial_waypoint_guess(toy.muscles, toy.skeleton, toy.skeleton)
    for a, b in zip(toy.muscles, out):
        for wa, wb in zip(a.waypoints, b.waypoints):
            for ea, eb in zip(wa.skinning, wb.skinning):
                np.testing.assert_allclose(ea.local_coords, eb.local_coords,
                                           atol=1e-12)
                assert ea.weight == eb.weight


@pytest.mark.parametrize("bp", [
    BoneParams(elongate=2.0),
    BoneParams(torsion=np.radians(30)),
    BoneParams(elongate=0.6, torsion=np.radians(-25),
               proximal_head_scale=1.4, distal_head_scale=0.7),
])
def test_guess_matches_cylinder_oracle(toy, bp):
    params = SkeletonParams(bones={"femur_l": bp}, symmetric=False)
    target = apply_skeleton_params(toy.skeleton, params)
    out = initial_waypoint_guess(toy.muscles, toy.skeleton, target)
    ref_bone = toy.skeleton.bone("femur_l")
    for a, b in zip(toy.muscles, out):
        for wa, wb in zip(a.waypoints, b.waypoints):
            for ea, eb in zip(wa.skinning, wb.skinning):
                assert eb.weight == ea.weight
                if ea.bone_id == "femur_l":
                    np.testing.assert_allclose(
                        eb.local_coords,
                        oracle_anchor_map(ref_bone, bp, ea.local_coords),
                        atol=1e-12)
                else:
                    np.testing.assert_allclose(eb.local_coords, ea.local_coords,
                                               atol=1e-12)


def test_deform_point_matches_oracle(toy):
    rng = np.random.default_rng(51)
    bone = toy.skeleton.bone("femur_l")
    bp = BoneParams(elongate=1.7, torsion=0.4, proximal_head_scale=1.2,
                    distal_head_scale=0.8)
    for _ in range(50):
        x = rng.normal(scale=0.2, size=3)
        np.testing.assert_allclose(deform_point(bone, bp, x),
                                   oracle_anchor_map(bone, bp, x), atol=1e-12)


def test_baseline_builders(toy):
    params = SkeletonParams(bones={"femur": BoneParams(elongate=1.3)})
    skel = apply_skeleton_params(toy.skeleton, params)
    raw = transplant_model(toy, skel)
    anchored = anchored_model(toy, skel)
    naive = naive_linear_model(toy, skel)
    m = toy.muscle("hamstring_l")
    assert raw.muscle("hamstring_l").l_m0 == m.l_m0
    # naive scales lengths by the rest-length ratio
    rest_ref = musculotendon_length(m, toy.skeleton, Pose())
    rest_new = musculotendon_length(anchored.muscle("hamstring_l"), skel, Pose())
    assert naive.muscle("hamstring_l").l_m0 == pytest.approx(
        m.l_m0 * rest_new / rest_ref)
