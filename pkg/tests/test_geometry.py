import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from myoretarget.geometry import (minimal_rotation_between, orthonormal_frame,
                                  perpendicular, quat_conj, quat_from_axis_angle,
                                  quat_mul, quat_normalize, quat_rotate,
                                  quat_to_matrix, quat_to_matrix_batch,
                                  random_quat, swing_twist, twist_angle)

unit_quats = st.tuples(*[st.floats(-1, 1) for _ in range(4)]).filter(
    lambda q: np.linalg.norm(q) > 1e-2).map(
    lambda q: quat_normalize(np.array(q)))


@given(unit_quats, unit_quats)
@settings(max_examples=200, deadline=None)
def test_quat_mul_matches_matrix_product(a, b):
    np.testing.assert_allclose(
        quat_to_matrix(quat_mul(a, b)),
        quat_to_matrix(a) @ quat_to_matrix(b), atol=1e-12)


@given(unit_quats)
@settings(max_examples=200, deadline=None)
def test_conjugate_inverts(q):
    np.testing.assert_allclose(quat_mul(q, quat_conj(q)),
                               [1, 0, 0, 0], atol=1e-12)


def test_rotate_matches_matrix():
    rng = np.random.default_rng(3)
    for _ in range(50):
        q = random_quat(rng)
        v = rng.normal(size=3)
        np.testing.assert_allclose(quat_rotate(q, v), quat_to_matrix(q) @ v,
                                   atol=1e-12)


def test_batch_matrix_matches_scalar():
    rng = np.random.default_rng(4)
    qs = random_quat(rng, 32)
    batch = quat_to_matrix_batch(qs)
    for i in range(32):
        np.testing.assert_allclose(batch[i], quat_to_matrix(qs[i]), atol=1e-14)


def test_axis_angle_round_trip():
    q = quat_from_axis_angle([0, 0, 1], np.pi / 2)
    np.testing.assert_allclose(quat_rotate(q, [1, 0, 0]), [0, 1, 0], atol=1e-12)


def test_swing_twist_reconstructs():
    rng = np.random.default_rng(5)
    for _ in range(200):
        q = random_quat(rng)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        swing, twist = swing_twist(q, axis)
        np.testing.assert_allclose(quat_mul(swing, twist), q, atol=1e-12)
        # twist leaves the axis fixed; swing axis is orthogonal to it
        np.testing.assert_allclose(quat_rotate(twist, axis), axis, atol=1e-10)
        assert abs(np.dot(swing[1:], axis)) < 1e-9


def test_twist_angle_range():
    axis = np.array([0.0, 0.0, 1.0])
    for angle in (-3.0, -0.5, 0.0, 0.5, 3.0):
        tw = quat_from_axis_angle(axis, angle)
        assert twist_angle(tw, axis) == pytest.approx(angle, abs=1e-12)


def test_minimal_rotation_between_antipodal_uses_fallback():
    a = np.array([0.0, 0.0, 1.0])
    q = minimal_rotation_between(a, -a)
    np.testing.assert_allclose(quat_rotate(q, a), -a, atol=1e-12)


def test_orthonormal_frame_right_handed():
    e1, e2, p = orthonormal_frame([0.0, 0.0, -1.0])
    np.testing.assert_allclose(np.cross(e1, e2), -p * -1, atol=1e-12)
    for u, v in ((e1, e2), (e1, p), (e2, p)):
        assert abs(np.dot(u, v)) < 1e-12


def test_perpendicular_is_unit_and_orthogonal():
    rng = np.random.default_rng(6)
    for _ in range(50):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        p = perpendicular(v)
        assert np.linalg.norm(p) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.dot(p, v)) < 1e-12
