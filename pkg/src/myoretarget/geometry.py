"""Quaternion and rigid-transform helpers.

Quaternions are numpy arrays [w, x, y, z], unit norm for rotations.
Rigid transforms are 4x4 homogeneous matrices. Batched variants take a
leading batch axis and are used by the grid/dataset evaluation paths.
"""
from __future__ import annotations

import numpy as np

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def normalize(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < 1e-15:
        raise ValueError("cannot normalize near-zero vector")
    return v / n


def quat_normalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q)


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = normalize(np.asarray(axis, dtype=float))
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis))


def quat_to_axis_angle(q: np.ndarray) -> tuple[np.ndarray, float]:
    q = quat_normalize(q)
    if q[0] < 0.0:
        q = -q
    s = np.linalg.norm(q[1:])
    if s < 1e-12:
        return np.array([1.0, 0.0, 0.0]), 0.0
    return q[1:] / s, 2.0 * np.arctan2(s, q[0])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    # q v q* expanded; cheaper than building the matrix for one vector
    v = np.asarray(v, dtype=float)
    w = q[0]
    u = q[1:]
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_to_matrix_batch(q: np.ndarray) -> np.ndarray:
    """(B, 4) quaternions -> (B, 3, 3) rotation matrices."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    m = np.empty(q.shape[:1] + (3, 3))
    m[:, 0, 0] = 1 - 2 * (y * y + z * z)
    m[:, 0, 1] = 2 * (x * y - w * z)
    m[:, 0, 2] = 2 * (x * z + w * y)
    m[:, 1, 0] = 2 * (x * y + w * z)
    m[:, 1, 1] = 1 - 2 * (x * x + z * z)
    m[:, 1, 2] = 2 * (y * z - w * x)
    m[:, 2, 0] = 2 * (x * z - w * y)
    m[:, 2, 1] = 2 * (y * z + w * x)
    m[:, 2, 2] = 1 - 2 * (x * x + y * y)
    return m


def random_quat(rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Uniform random rotation(s) via normalized Gaussian 4-vectors."""
    shape = (4,) if n is None else (n, 4)
    q = rng.normal(size=shape)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def transform(rotation: np.ndarray | None = None,
              translation: np.ndarray | None = None) -> np.ndarray:
    t = np.eye(4)
    if rotation is not None:
        t[:3, :3] = quat_to_matrix(rotation)
    if translation is not None:
        t[:3, 3] = translation
    return t


def transform_point(t: np.ndarray, p: np.ndarray) -> np.ndarray:
    return t[:3, :3] @ p + t[:3, 3]


def swing_twist(q: np.ndarray, axis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split q into swing * twist where twist rotates about `axis`.

    Returns (swing, twist) quaternions with q = swing * twist; the swing
    axis is orthogonal to `axis`. At the 180-degree swing singularity the
    projection degenerates and the twist is taken as identity.
    """
    axis = normalize(np.asarray(axis, dtype=float))
    proj = float(np.dot(q[1:], axis))
    tw = np.array([q[0], *(proj * axis)])
    n = np.linalg.norm(tw)
    if n < 1e-12:
        twist = IDENTITY_QUAT.copy()
    else:
        twist = tw / n
    swing = quat_mul(q, quat_conj(twist))
    return quat_normalize(swing), twist


def twist_angle(twist: np.ndarray, axis: np.ndarray) -> float:
    """Signed rotation angle of a twist quaternion about `axis`, in (-pi, pi]."""
    axis = normalize(np.asarray(axis, dtype=float))
    angle = 2.0 * np.arctan2(float(np.dot(twist[1:], axis)), float(twist[0]))
    # fold into (-pi, pi]
    angle = (angle + np.pi) % (2.0 * np.pi) - np.pi
    if angle == -np.pi:
        angle = np.pi
    return float(angle)


def minimal_rotation_between(a: np.ndarray, b: np.ndarray,
                             fallback_axis: np.ndarray | None = None) -> np.ndarray:
    """Quaternion of the minimal rotation taking unit vector a onto b.

    Antipodal inputs rotate 180 degrees about `fallback_axis` (or an
    arbitrary perpendicular when not given).
    """
    a = normalize(np.asarray(a, dtype=float))
    b = normalize(np.asarray(b, dtype=float))
    c = float(np.dot(a, b))
    if c < -1.0 + 1e-12:
        axis = fallback_axis if fallback_axis is not None else perpendicular(a)
        return quat_from_axis_angle(axis, np.pi)
    axis = np.cross(a, b)
    w = 1.0 + c
    q = np.concatenate(([w], axis))
    return quat_normalize(q)


def perpendicular(v: np.ndarray) -> np.ndarray:
    """A deterministic unit vector perpendicular to v."""
    v = normalize(np.asarray(v, dtype=float))
    ref = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    return normalize(np.cross(v, ref))


def orthonormal_frame(polar_axis: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(e1, e2, polar) right-handed frame with deterministic azimuth reference."""
    p = normalize(np.asarray(polar_axis, dtype=float))
    e1 = perpendicular(p)
    e2 = normalize(np.cross(p, e1))
    return e1, e2, p


def spherical_direction(frame: tuple[np.ndarray, np.ndarray, np.ndarray],
                        azimuth: float, polar: float) -> np.ndarray:
    e1, e2, p = frame
    return (np.cos(polar) * p
            + np.sin(polar) * (np.cos(azimuth) * e1 + np.sin(azimuth) * e2))
