from .dataset import (DatasetProvenance, PoseDataset, mean_cone_direction,
                      mirror_bone_id, mirror_pose)
from .editing import (BallEdit, JointEdit, RevoluteEdit, RomEdit, apply_rom_edit,
                      edited_is_valid, make_cone_edit, scale_about_direction)
from .grid import (DEFAULT_RESOLUTION, RomGrid, decode_grid, encode_grid,
                   grid_error_rate, grid_to_csv, rom_grid, twist_bin_centers)
from .rotation import JointDecomposition, decompose_rotation, recompose_rotation
from .validity import (EstimationError, RelaxationError, RelaxationReport,
                       estimate_lengths, is_valid, passive_constraint,
                       passive_joint_torques, relax_keyposes, stretch_limits,
                       valid_mask)

__all__ = [
    "BallEdit", "DEFAULT_RESOLUTION", "DatasetProvenance", "EstimationError",
    "JointDecomposition", "JointEdit", "PoseDataset", "RelaxationError",
    "RelaxationReport", "RevoluteEdit", "RomEdit", "RomGrid", "apply_rom_edit",
    "decode_grid", "decompose_rotation", "edited_is_valid", "encode_grid",
    "estimate_lengths", "grid_error_rate", "grid_to_csv", "is_valid",
    "make_cone_edit", "mean_cone_direction", "mirror_bone_id", "mirror_pose", "passive_constraint",
    "passive_joint_torques", "recompose_rotation", "relax_keyposes", "rom_grid",
    "scale_about_direction", "stretch_limits", "twist_bin_centers", "valid_mask",
]
