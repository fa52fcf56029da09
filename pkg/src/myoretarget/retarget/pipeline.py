"""Three-stage retargeting pipeline: routing, maximal lengths, ratios."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..anatomy import BodyModel, Pose
from ..rom import (PoseDataset, RomEdit, apply_rom_edit, estimate_lengths,
                   grid_error_rate, relax_keyposes, rom_grid)
from .anchors import anchored_model
from .curves import (CurveCharacteristics, functional_disorder_rate,
                     length_angle_curve)
from .params import SkeletonParams, apply_skeleton_params, scale_physics
from .ratios import RatioOptConfig, optimize_fiber_tendon_ratio
from .waypoints import WaypointOptConfig, optimize_waypoints

ProgressFn = Callable[[int, float, str], None]


@dataclass
class RetargetConfig:
    waypoints: WaypointOptConfig = field(default_factory=WaypointOptConfig)
    ratios: RatioOptConfig = field(default_factory=RatioOptConfig)
    relax_threshold: float = 50.0           # N m
    grid_resolution: tuple[int, int, int] = (18, 36, 36)
    report_joints: list[str] = field(default_factory=list)
    curve_samples: int = 21


@dataclass
class MuscleCurveReport:
    motion: str
    before: CurveCharacteristics
    after: CurveCharacteristics


@dataclass
class RetargetReport:
    waypoint_traces: dict[str, list[float]] = field(default_factory=dict)
    ratio_trace: list[float] = field(default_factory=list)
    muscle_curves: dict[str, list[MuscleCurveReport]] = field(default_factory=dict)
    grid_errors: dict[str, float] = field(default_factory=dict)
    peak_torque_delta: dict[str, float] = field(default_factory=dict)
    disorder_rate: float = 0.0
    relax_iterations: int = 0
    converged: bool = True

    def to_dict(self) -> dict:
        def chars(c: CurveCharacteristics) -> dict:
            return {"theta_max": c.theta_max, "theta_min": c.theta_min,
                    "delta": c.delta, "classification": c.classification.value}
        return {
            "waypoint_traces": self.waypoint_traces,
            "ratio_trace": self.ratio_trace,
            "muscle_curves": {
                mid: [{"motion": r.motion, "before": chars(r.before),
                       "after": chars(r.after)} for r in reports]
                for mid, reports in self.muscle_curves.items()},
            "grid_errors": self.grid_errors,
            "peak_torque_delta": self.peak_torque_delta,
            "disorder_rate": self.disorder_rate,
            "relax_iterations": self.relax_iterations,
            "converged": self.converged,
        }


def retarget_pipeline(reference: BodyModel, params: SkeletonParams,
                      dataset: PoseDataset, edits: RomEdit | None = None,
                      config: RetargetConfig | None = None,
                      keyposes: Optional[list[Pose]] = None,
                      progress: ProgressFn | None = None
                      ) -> tuple[BodyModel, RetargetReport]:
    """Run the three retargeting stages and assemble the report.

    Stage 1 deforms the skeleton, anchors the waypoints, and optimizes the
    routing. Stage 2 re-estimates maximal lengths from the dataset (mapped
    through the inverse ROM edit when one is given) and optionally relaxes
    at the key-poses. Stage 3 tunes fiber-tendon ratios for peak-torque
    angles against the reference.
    """
    cfg = config or RetargetConfig()
    report = RetargetReport()

    def tick(stage: int, frac: float, msg: str):
        if progress is not None:
            progress(stage, frac, msg)

    # stage 1: skeleton deformation + routing optimization
    tick(0, 0.0, "deforming skeleton")
    target_skel = apply_skeleton_params(reference.skeleton, params)
    model = anchored_model(reference, target_skel)
    if params.global_scale != 1.0:
        model = scale_physics(model, params.global_scale)
    model, wp_result = optimize_waypoints(model, reference, cfg.waypoints)
    report.waypoint_traces = wp_result.traces
    report.converged &= wp_result.all_converged
    tick(0, 1.0, "waypoint routing optimized")

    # stage 2: maximal lengths from the (possibly edit-mapped) dataset
    tick(1, 0.0, "estimating maximal lengths")
    ds = dataset
    relax_poses = list(keyposes) if keyposes else []
    if edits is not None and edits.joints:
        ds = dataset.map_poses(
            model.skeleton,
            lambda p: apply_rom_edit(edits, model.skeleton, p, inverse=True))
        # key-poses live in edited coordinates too, otherwise relaxation
        # would re-open regions the edit deliberately excluded
        relax_poses = [apply_rom_edit(edits, model.skeleton, p, inverse=True)
                       for p in relax_poses]
    model = estimate_lengths(model, ds)
    if relax_poses:
        model, relax_report = relax_keyposes(model, relax_poses,
                                             torque_threshold=cfg.relax_threshold)
        report.relax_iterations = relax_report.iterations
    tick(1, 1.0, "lengths estimated")

    # stage 3: fiber-tendon ratios for peak-torque angles
    tick(2, 0.0, "optimizing fiber-tendon ratios")
    model, ratio_result = optimize_fiber_tendon_ratio(
        model, reference, config=cfg.ratios)
    report.ratio_trace = ratio_result.trace
    report.converged &= ratio_result.converged
    for name, ref_peak in ratio_result.reference_peaks.items():
        if name in ratio_result.peaks_after and name not in ratio_result.flat_motions:
            report.peak_torque_delta[name] = abs(
                ref_peak - ratio_result.peaks_after[name])
    tick(2, 0.7, "ratios optimized")

    # report: curve characteristics, grid errors, disorder rate
    for m in reference.muscles:
        entries = []
        for motion in m.joint_motions:
            before = length_angle_curve(reference, m.id, motion,
                                        cfg.curve_samples).characteristics
            after = length_angle_curve(model, m.id, motion,
                                       cfg.curve_samples).characteristics
            entries.append(MuscleCurveReport(motion.name, before, after))
        if entries:
            report.muscle_curves[m.id] = entries
    for joint in cfg.report_joints:
        target_grid = rom_grid(reference, joint, cfg.grid_resolution, edit=edits)
        model_grid = rom_grid(model, joint, cfg.grid_resolution)
        report.grid_errors[joint] = grid_error_rate(target_grid, model_grid)
    report.disorder_rate = functional_disorder_rate(reference, model,
                                                    samples=cfg.curve_samples)
    tick(2, 1.0, "report assembled")
    return model, report
