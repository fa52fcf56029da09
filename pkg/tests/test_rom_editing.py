import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from myoretarget.anatomy import Pose
from myoretarget.geometry import (quat_conj, quat_from_axis_angle, quat_mul,
                                  quat_normalize, quat_rotate, random_quat)
from myoretarget.rom import (BallEdit, PoseDataset, RevoluteEdit, RomEdit,
                             apply_rom_edit, decompose_rotation, edited_is_valid,
                             estimate_lengths, is_valid, make_cone_edit,
                             recompose_rotation, scale_about_direction)

from conftest import make_hinge


def test_decompose_identity():
    dec = decompose_rotation(np.array([1.0, 0, 0, 0]), [0, 0, -1])
    assert dec.twist == pytest.approx(0.0)
    np.testing.assert_allclose(dec.cone_dir, [0, 0, -1], atol=1e-12)


def test_decompose_pure_twist():
    shaft = np.array([0.0, 0.0, -1.0])
    q = quat_from_axis_angle(shaft, 0.5)
    dec = decompose_rotation(q, shaft)
    assert dec.twist == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(dec.cone_dir, shaft, atol=1e-12)


def test_decompose_recompose_round_trip():
    rng = np.random.default_rng(41)
    shaft = np.array([0.0, 0.0, -1.0])
    for _ in range(2000):
        q = random_quat(rng)
        dec = decompose_rotation(q, shaft)
        back = recompose_rotation(dec, shaft)
        if back[0] * q[0] < 0:
            back = -back
        assert np.max(np.abs(back - q)) < 1e-10


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_decompose_round_trip_property(seed):
    rng = np.random.default_rng(seed)
    q = random_quat(rng)
    shaft = rng.normal(size=3)
    shaft /= np.linalg.norm(shaft)
    dec = decompose_rotation(q, shaft)
    back = recompose_rotation(dec, shaft)
    if back[0] * q[0] < 0:
        back = -back
    assert np.max(np.abs(back - q)) < 1e-10


def test_antipodal_singularity_documented_choice():
    shaft = np.array([0.0, 0.0, -1.0])
    q = quat_from_axis_angle([1, 0, 0], np.pi)  # flips the shaft
    dec = decompose_rotation(q, shaft)
    np.testing.assert_allclose(dec.cone_dir, -shaft, atol=1e-12)
    back = recompose_rotation(dec, shaft)
    np.testing.assert_allclose(quat_rotate(back, shaft), -shaft, atol=1e-10)


def test_identity_edit_is_identity(toy):
    edit = RomEdit({"femur_l": BallEdit(), "tibia_l": RevoluteEdit()})
    pose = Pose(joint_coords={
        "femur_l": quat_normalize(np.array([0.9, 0.1, -0.2, 0.3])),
        "tibia_l": 0.7})
    out = apply_rom_edit(edit, toy.skeleton, pose)
    assert out.joint_coords["tibia_l"] == pytest.approx(0.7)
    q_in = quat_normalize(np.array([0.9, 0.1, -0.2, 0.3]))
    q_out = np.asarray(out.joint_coords["femur_l"])
    if q_out[0] * q_in[0] < 0:
        q_out = -q_out
    np.testing.assert_allclose(q_out, q_in, atol=1e-10)


def test_edit_leaves_other_joints_untouched(toy):
    edit = RomEdit({"tibia_l": RevoluteEdit(scale=2.0, shift=0.1)})
    pose = Pose(joint_coords={"tibia_l": 0.4, "tibia_r": 0.9})
    out = apply_rom_edit(edit, toy.skeleton, pose)
    assert out.joint_coords["tibia_r"] == pytest.approx(0.9)


def test_revolute_affine_and_inverse():
    edit = RevoluteEdit(scale=1.7, shift=0.2, center=0.3)
    for theta in (-0.5, 0.0, 0.4, 1.2):
        fwd = edit.apply(theta)
        assert fwd == pytest.approx(1.7 * (theta - 0.3) + 0.3 + 0.2)
        assert edit.apply(fwd, inverse=True) == pytest.approx(theta, abs=1e-12)


def test_ball_edit_inverse_round_trip(toy):
    # exact within the non-wrapping domain: transformed twist inside
    # (-pi, pi) and cone scaling away from the antipodal clamp
    rng = np.random.default_rng(42)
    shaft = toy.skeleton.bone("femur_l").shaft_axis
    edit = RomEdit({"femur_l": BallEdit(
        twist_scale=1.4, twist_shift=0.2, twist_center=0.1,
        cone_scale=0.63, cone_reaim=quat_from_axis_angle([0, 1, 0], 0.5))})
    checked = 0
    while checked < 40:
        q0 = random_quat(rng)
        dec = decompose_rotation(q0, shaft)
        if abs(1.4 * (dec.twist - 0.1) + 0.3) > 0.9 * np.pi:
            continue
        pose = Pose(joint_coords={"femur_l": q0})
        fwd = apply_rom_edit(edit, toy.skeleton, pose)
        fdec = decompose_rotation(np.asarray(fwd.joint_coords["femur_l"]), shaft)
        if abs(fdec.twist) > 0.9 * np.pi:
            continue
        back = apply_rom_edit(edit, toy.skeleton, fwd, inverse=True)
        q1 = np.asarray(back.joint_coords["femur_l"])
        if q0[0] * q1[0] < 0:
            q1 = -q1
        np.testing.assert_allclose(q1, q0, atol=1e-9)
        checked += 1


def test_scale_about_direction_scales_angle():
    center = np.array([0.0, 0.0, -1.0])
    v = quat_rotate(quat_from_axis_angle([0, 1, 0], 0.4), center)
    out = scale_about_direction(v, center, 1.5)
    assert np.arccos(np.clip(np.dot(out, center), -1, 1)) == pytest.approx(
        0.6, abs=1e-12)


def _contiguous_width(angles, mask, around):
    # width of the valid component containing `around`
    idx = int(np.argmin(np.abs(angles - around)))
    if not mask[idx]:
        return 0.0
    lo = idx
    while lo > 0 and mask[lo - 1]:
        lo -= 1
    hi = idx
    while hi < len(mask) - 1 and mask[hi + 1]:
        hi += 1
    return angles[hi] - angles[lo]


def test_revolute_scale_halves_valid_interval():
    # dense 1-D scan oracle: pointwise the edited predicate is the base
    # predicate precomposed with theta' = 2(theta - phi) + phi, so the
    # valid component around phi has half the reference width
    from myoretarget.anatomy import musculotendon_length
    from myoretarget.anatomy.equilibrium import split_for_limit
    model, _ = make_hinge()
    m = model.muscles[0]
    coarse = np.linspace(-np.pi, np.pi, 361)
    coarse_len = np.array([
        musculotendon_length(m, model.skeleton,
                             Pose(joint_coords={"link": float(a)}))
        for a in coarse])
    theta_min = float(coarse[int(np.argmin(coarse_len))])
    angles = np.linspace(theta_min - 1.2, theta_min + 1.2, 1201)
    lengths = np.array([
        musculotendon_length(m, model.skeleton,
                             Pose(joint_coords={"link": float(a)}))
        for a in angles])
    # tighten the muscle so the valid arc sits strictly inside the scan
    limit = float(lengths.min() + 0.25 * (lengths.max() - lengths.min()))
    model = model.replace_muscle(
        m.with_lengths(*split_for_limit(m, model.curves, limit, m.ratio)))
    base = lengths <= limit + 1e-9
    assert not base[0] and not base[-1] and base.any()
    valid = angles[base]
    phi = float(0.5 * (valid.min() + valid.max()))
    edit = RomEdit({"link": RevoluteEdit(scale=2.0, center=phi)})
    edited = np.array([
        edited_is_valid(model, edit, Pose(joint_coords={"link": float(a)}))
        for a in angles])
    for a, flag in zip(angles[::25], edited[::25]):
        expected = is_valid(model, Pose(joint_coords={
            "link": 2.0 * (float(a) - phi) + phi}))
        assert flag == expected
    step = angles[1] - angles[0]
    w_base = _contiguous_width(angles, base, phi)
    w_edit = _contiguous_width(angles, edited, phi)
    assert w_edit == pytest.approx(w_base / 2.0, abs=3 * step)


def test_identity_edit_equals_is_valid(toy, toy_dataset_small):
    edit = RomEdit.identity()
    for i in (0, 5, 11):
        pose = toy_dataset_small[i]
        assert edited_is_valid(toy, edit, pose) == is_valid(toy, pose)


def test_make_cone_edit_payload():
    tilt = quat_from_axis_angle([0, 1, 0], np.radians(-30))
    edit = make_cone_edit(tilt, 0.63)
    assert edit.cone_scale == pytest.approx(1.0 / 0.63)
    np.testing.assert_allclose(edit.cone_reaim, quat_conj(tilt), atol=1e-15)


def test_cone_edit_tilts_and_shrinks_rom(toy, toy_dataset_small):
    # functional check of the inverse action: the edited valid set is the
    # reference set shrunk about the shaft and rotated by the tilt
    from myoretarget.rom import rom_grid
    tilt = quat_from_axis_angle([0, 1, 0], np.radians(-30))
    edit = RomEdit({"femur_l": make_cone_edit(tilt, 0.63)})
    ref = rom_grid(toy, "femur_l", (6, 12, 12))
    edited = rom_grid(toy, "femur_l", (6, 12, 12), edit=edit)
    assert 0 < edited.true_count < ref.true_count
