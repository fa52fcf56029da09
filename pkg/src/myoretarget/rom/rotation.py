"""Twist/conic decomposition of ball-joint rotations.

A joint rotation q is split as q = conic(v_hat) * twist(omega): first a
twist about the bone shaft axis, then the minimal ("conic") rotation that
carries the shaft axis onto its posed direction v_hat. The conic axis is
orthogonal to the shaft axis. At the antipodal singularity (v_hat opposite
the shaft) the conic axis is chosen as a deterministic perpendicular.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import (minimal_rotation_between, normalize, perpendicular,
                        quat_from_axis_angle, quat_mul, quat_normalize,
                        quat_rotate, swing_twist, twist_angle)


@dataclass(frozen=True)
class JointDecomposition:
    twist: float          # omega in (-pi, pi]
    cone_dir: np.ndarray  # unit shaft direction after rotation

    def __post_init__(self):
        object.__setattr__(self, "cone_dir", normalize(np.asarray(self.cone_dir, float)))


def decompose_rotation(q: np.ndarray, shaft_axis: np.ndarray) -> JointDecomposition:
    q = quat_normalize(np.asarray(q, dtype=float))
    s = normalize(np.asarray(shaft_axis, dtype=float))
    _, twist = swing_twist(q, s)
    omega = twist_angle(twist, s)
    v_hat = quat_rotate(q, s)
    return JointDecomposition(twist=omega, cone_dir=v_hat)


def recompose_rotation(dec: JointDecomposition, shaft_axis: np.ndarray) -> np.ndarray:
    s = normalize(np.asarray(shaft_axis, dtype=float))
    twist = quat_from_axis_angle(s, dec.twist)
    conic = minimal_rotation_between(s, dec.cone_dir, fallback_axis=perpendicular(s))
    return quat_normalize(quat_mul(conic, twist))
