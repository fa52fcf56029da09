from .jacobians import (DofAxis, TorqueAngleCurve, ZeroTensionError,
                        agonist_activations, dof_axes, joint_torques,
                        moment_arm, motion_axis_torque, motion_pose,
                        muscle_jacobian, parabolic_peak, torque_angle_curve)
from .lcp import (ConstraintSet, LcpResult, active_limit_rows,
                  complementarity_residual, solve_joint_limit_lcp, solve_lcp_pgs)
from .qp import (BoxQpResult, MuscleQpResult, kkt_residual, solve_box_qp,
                 solve_muscle_qp)
from .rigid import (GRAVITY, ActivationVector, DynamicsState, bias_forces,
                    body_jacobians, gravity_torque, mass_matrix)

__all__ = [
    "ActivationVector", "BoxQpResult", "ConstraintSet", "DofAxis",
    "DynamicsState", "GRAVITY", "LcpResult", "MuscleQpResult",
    "TorqueAngleCurve", "ZeroTensionError", "active_limit_rows",
    "agonist_activations", "bias_forces", "body_jacobians",
    "complementarity_residual", "dof_axes", "gravity_torque", "joint_torques",
    "kkt_residual", "mass_matrix", "moment_arm", "motion_axis_torque",
    "motion_pose", "muscle_jacobian", "parabolic_peak", "solve_box_qp",
    "solve_joint_limit_lcp", "solve_lcp_pgs", "solve_muscle_qp",
    "torque_angle_curve",
]
