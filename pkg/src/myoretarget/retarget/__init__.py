from .anchors import (anchored_model, initial_waypoint_guess,
                      naive_linear_model, transplant_model)
from .curves import (CurveCharacteristics, CurveClass, LengthAngleCurve,
                     characterize, functional_disorder_rate, length_angle_curve)
from .descent import (DescentConfig, DescentResult, fd_gradient,
                      gradient_descent, project_simplex)
from .energy import (MuscleEnergyEvaluator, direction_energy, length_energy,
                     segment_directions)
from .params import (BoneParams, SkeletonParams, TrunkParams,
                     apply_skeleton_params, deform_point, scale_physics,
                     scaling_factors)
from .pipeline import (MuscleCurveReport, RetargetConfig, RetargetReport,
                       retarget_pipeline)
from .ratios import (RatioOptConfig, RatioOptResult, optimize_fiber_tendon_ratio,
                     torque_peaks)
from .waypoints import WaypointOptConfig, WaypointOptResult, optimize_waypoints

__all__ = [
    "BoneParams", "CurveCharacteristics", "CurveClass", "DescentConfig",
    "DescentResult", "LengthAngleCurve", "MuscleCurveReport",
    "MuscleEnergyEvaluator", "RatioOptConfig", "RatioOptResult",
    "RetargetConfig", "RetargetReport", "SkeletonParams", "TrunkParams",
    "WaypointOptConfig", "WaypointOptResult", "anchored_model",
    "apply_skeleton_params", "characterize", "deform_point",
    "direction_energy", "fd_gradient", "functional_disorder_rate",
    "gradient_descent", "initial_waypoint_guess", "length_angle_curve",
    "length_energy", "naive_linear_model", "optimize_fiber_tendon_ratio",
    "optimize_waypoints", "project_simplex", "retarget_pipeline",
    "scale_physics", "scaling_factors", "segment_directions",
    "torque_peaks", "transplant_model",
]
