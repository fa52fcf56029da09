"""HTTP service for the companion editor UI.

One project per process. Reads are concurrent; model mutations are
optimistic (clients send the hash they based their change on and get a
409 when stale); the long retarget job runs on the store's single worker.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..anatomy import ModelError, Pose
from ..dynamics import torque_angle_curve
from ..retarget import (RetargetConfig, anchored_model, length_angle_curve,
                        retarget_pipeline, scale_physics)
from ..rom import BallEdit, RevoluteEdit, RomEdit, rom_grid
from .config import skeleton_params_from_config
from .io import model_to_dict
from .store import ProjectStore, StaleBaseError


class ParamsBody(BaseModel):
    params: dict
    base_hash: Optional[str] = None


class RetargetBody(BaseModel):
    base_hash: Optional[str] = None
    synthetic: Optional[int] = None
    seed: int = 42
    report_joints: Optional[list[str]] = None


class EditBody(BaseModel):
    base_hash: Optional[str] = None
    # revolute fields
    scale: Optional[float] = None
    shift: Optional[float] = None
    center: Optional[float] = None
    # ball fields
    twist_scale: float = 1.0
    twist_shift: float = 0.0
    twist_center: float = 0.0
    cone_scale: Optional[float] = None
    cone_reaim: Optional[list[float]] = None
    cone_center: Optional[list[float]] = None


def grid_payload(grid, model_hash: str) -> dict:
    flat = grid.cells.ravel()
    runs: list[int] = []
    first = bool(flat[0]) if flat.size else False
    changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
    prev = 0
    for c in changes:
        runs.append(int(c + 1 - prev))
        prev = int(c + 1)
    if flat.size:
        runs.append(int(flat.size - prev))
    return {
        "joint": grid.joint_id,
        "resolution": list(grid.resolution),
        "frame": [float(v) for v in grid.frame.ravel()],
        "first": first,
        "runs": runs,
        "true_count": grid.true_count,
        "model_hash": model_hash,
    }


def create_app(store: ProjectStore) -> FastAPI:
    app = FastAPI(title="musculature retargeting service")

    @app.exception_handler(RequestValidationError)
    async def _invalid_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(StaleBaseError)
    async def _stale(request: Request, exc: StaleBaseError):
        return JSONResponse(status_code=409, content={
            "error": str(exc), "current_hash": exc.current})

    @app.exception_handler(ModelError)
    async def _model_error(request: Request, exc: ModelError):
        status = 404 if "unknown" in str(exc) else 400
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.get("/model")
    def get_model():
        with store.lock:
            return {"hash": store.current_hash,
                    "reference_hash": store.reference_hash,
                    "model": model_to_dict(store.current)}

    @app.get("/model/summary")
    def get_summary():
        with store.lock:
            model = store.current
            return {
                "hash": store.current_hash,
                "bones": [b.id for b in model.skeleton.bones],
                "muscles": [m.id for m in model.muscles],
                "motions": [jm.name for jm in model.all_motions()],
                "dof_count": model.skeleton.dof_count,
            }

    @app.put("/model/params")
    def put_params(body: ParamsBody):
        with store.lock:
            store.check_base(body.base_hash)
            params = skeleton_params_from_config({"": {}, **body.params})
            from ..retarget import apply_skeleton_params
            skel = apply_skeleton_params(store.reference.skeleton, params)
            model = anchored_model(store.reference, skel)
            if params.global_scale != 1.0:
                model = scale_physics(model, params.global_scale)
            store.params_doc = body.params
            new_hash = store.commit(model)
            return {"hash": new_hash}

    @app.post("/jobs/retarget")
    def post_retarget(body: RetargetBody):
        with store.lock:
            store.check_base(body.base_hash)
            params = skeleton_params_from_config({"": {}, **store.params_doc})
            edits = store.edits
            if body.synthetic is not None:
                from ..toybody import synthetic_dataset
                dataset = synthetic_dataset(store.reference.skeleton,
                                            body.synthetic, body.seed)
            else:
                dataset = store.dataset
            if dataset is None:
                raise ModelError("no dataset configured for retargeting")
            report_joints = body.report_joints
            if report_joints is None:
                report_joints = sorted(edits.joints.keys())

        def work(record):
            def progress(stage, frac, msg):
                with store.lock:
                    record.update(progress=(stage + frac) / 3.0, message=msg)
            cfg = RetargetConfig(report_joints=report_joints)
            model, report = retarget_pipeline(
                store.reference, params, dataset,
                edits=edits if edits.joints else None,
                config=cfg, keyposes=store.keyposes, progress=progress)
            new_hash = store.commit(model)
            doc = report.to_dict()
            with store.lock:
                store.reports[new_hash] = doc
            return {"model_hash": new_hash, "report": doc}

        record = store.submit_job("retarget", work)
        return {"job_id": record.id, "status": record.status}

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        with store.lock:
            return store.job(job_id).to_dict()

    @app.get("/rom/{joint_id}/grid")
    def get_grid(joint_id: str, twist: int = 18, azimuth: int = 36,
                 polar: int = 36, edited: bool = False,
                 model: Optional[str] = None,
                 conditioning_joint: Optional[str] = None,
                 conditioning_angle: float = 0.0):
        with store.lock:
            body_model = store.model(model) if model else store.current
            h = model if model else store.current_hash
            edits = store.edits if edited and store.edits.joints else None
        cond = Pose()
        if conditioning_joint is not None:
            cond.joint_coords[conditioning_joint] = conditioning_angle
        grid = rom_grid(body_model, joint_id, (twist, azimuth, polar),
                        conditioning_pose=cond, edit=edits)
        return grid_payload(grid, h)

    @app.post("/rom/{joint_id}/edit")
    def post_edit(joint_id: str, body: EditBody):
        with store.lock:
            store.check_base(body.base_hash)
            bone = store.current.skeleton.bone(joint_id)
            if bone.joint_type == "revolute":
                edit = RevoluteEdit(scale=body.scale or 1.0,
                                    shift=body.shift or 0.0,
                                    center=body.center or 0.0)
            elif bone.joint_type == "ball_and_socket":
                edit = BallEdit(
                    twist_scale=body.twist_scale,
                    twist_shift=body.twist_shift,
                    twist_center=body.twist_center,
                    cone_scale=body.cone_scale or 1.0,
                    cone_reaim=np.asarray(body.cone_reaim or [1, 0, 0, 0], float),
                    cone_center=(np.asarray(body.cone_center, float)
                                 if body.cone_center else None))
            else:
                raise ModelError(f"joint {joint_id!r} cannot be edited")
            joints = dict(store.edits.joints)
            joints[joint_id] = edit
            store.edits = RomEdit(joints)
            return {"edited_joints": sorted(store.edits.joints.keys()),
                    "hash": store.current_hash}

    @app.get("/muscles/{muscle_id}/length-angle")
    def get_length_angle(muscle_id: str, motion: str, samples: int = 21,
                         model: Optional[str] = None):
        with store.lock:
            body_model = store.model(model) if model else store.current
            h = model if model else store.current_hash
            reference = store.reference
        m = body_model.muscle(muscle_id)
        jm = next((x for x in m.joint_motions if x.name == motion), None)
        if jm is None:
            raise ModelError(f"unknown motion {motion!r} on muscle {muscle_id!r}")
        curve = length_angle_curve(body_model, muscle_id, jm, samples)
        ref_curve = length_angle_curve(reference, muscle_id, jm, samples)
        chars = curve.characteristics
        return {
            "muscle": muscle_id, "motion": motion, "model_hash": h,
            "thetas": [float(t) for t in curve.thetas],
            "lengths": [float(v) for v in curve.lengths],
            "reference_lengths": [float(v) for v in ref_curve.lengths],
            "characteristics": {
                "theta_max": chars.theta_max, "theta_min": chars.theta_min,
                "delta": chars.delta,
                "classification": chars.classification.value},
        }

    @app.get("/joints/{joint_id}/torque-angle")
    def get_torque_angle(joint_id: str, motion: str, samples: int = 21,
                         model: Optional[str] = None):
        with store.lock:
            body_model = store.model(model) if model else store.current
            h = model if model else store.current_hash
        jm = next((x for x in body_model.all_motions()
                   if x.name == motion and x.joint_id == joint_id), None)
        if jm is None:
            raise ModelError(
                f"unknown motion {motion!r} on joint {joint_id!r}")
        curve = torque_angle_curve(body_model, jm, samples=samples)
        return {
            "joint": joint_id, "motion": motion, "model_hash": h,
            "thetas": [float(t) for t in curve.thetas],
            "torques": [float(v) for v in curve.torques],
            "peak_theta": curve.peak_theta,
            "flat": curve.flat,
        }

    return app
