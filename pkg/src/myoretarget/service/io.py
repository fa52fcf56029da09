"""Model persistence: the msk-1 JSON document, canonical serialization,
and content hashing.

The canonical form sorts keys and uses compact separators, so hashing the
bytes identifies a model snapshot and save/load round-trips are
byte-stable.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ..anatomy import (BodyModel, Bone, CurveParams, CurveSet, JointMotion,
                       ModelError, MusculotendonUnit, ShapeParams, Skeleton,
                       SkinEntry, Waypoint)

FORMAT = "msk-1"


class ModelFormatError(ModelError):
    """Schema violation with the offending document location."""

    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _vec(v) -> list[float]:
    return [float(x) for x in np.asarray(v).ravel()]


def _mat(v) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(v)]


def model_to_dict(model: BodyModel) -> dict:
    bones = []
    for b in model.skeleton.bones:
        entry = {
            "id": b.id,
            "parent": b.parent,
            "joint_type": b.joint_type,
            "local_offset": _vec(b.local_offset),
            "shaft_axis": _vec(b.shaft_axis),
            "mass": float(b.mass),
            "inertia": _mat(b.inertia),
            "length": float(b.length),
            "com": _vec(b.com),
            "rest_rotation": _vec(b.rest_rotation),
            "shape_params": {
                "proximal_head_scale": b.shape_params.proximal_head_scale,
                "distal_head_scale": b.shape_params.distal_head_scale,
                "elongation": b.shape_params.elongation,
                "torsion_angle": b.shape_params.torsion_angle,
            },
        }
        if b.joint_axis is not None:
            entry["joint_axis"] = _vec(b.joint_axis)
        if b.group is not None:
            entry["group"] = b.group
        bones.append(entry)
    muscles = []
    for m in model.muscles:
        muscles.append({
            "id": m.id,
            "l_m0": float(m.l_m0),
            "l_t0": float(m.l_t0),
            "f_max": float(m.f_max),
            "pennation": float(m.pennation),
            "k_m": float(m.k_m),
            "k_t": float(m.k_t),
            "waypoints": [
                {"skinning": [
                    {"bone": e.bone_id, "weight": float(e.weight),
                     "coords": _vec(e.local_coords)}
                    for e in wp.skinning]}
                for wp in m.waypoints],
            "joint_motions": [
                {"name": jm.name, "joint": jm.joint_id, "axis": _vec(jm.axis),
                 "range": [jm.angle_range[0], jm.angle_range[1]]}
                for jm in m.joint_motions],
        })
    params = model.curves.params or CurveParams()
    curves = {
        "active_width": params.active_width,
        "passive_exp_shape": params.passive_exp_shape,
        "passive_strain_limit": params.passive_strain_limit,
        "passive_force_at_limit": params.passive_force_at_limit,
        "tendon_strain_at_fmax": params.tendon_strain_at_fmax,
        "tendon_toe_force": params.tendon_toe_force,
        "tendon_toe_shape": params.tendon_toe_shape,
    }
    return {"format": FORMAT, "bones": bones, "muscles": muscles, "curves": curves}


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def model_hash(model: BodyModel) -> str:
    return hashlib.sha256(
        canonical_json(model_to_dict(model)).encode()).hexdigest()[:16]


def save_model(model: BodyModel, path: str | Path) -> str:
    """Write the canonical msk-1 document; returns the content hash."""
    text = canonical_json(model_to_dict(model))
    Path(path).write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _expect(doc, key, types, location):
    if key not in doc:
        raise ModelFormatError(location, f"missing field {key!r}")
    value = doc[key]
    if types is not None and not isinstance(value, types):
        raise ModelFormatError(f"{location}.{key}",
                               f"expected {types}, got {type(value).__name__}")
    return value


def _vec3(value, location):
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ModelFormatError(location, "expected a 3-vector")
    return arr


def model_from_dict(doc: dict) -> BodyModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("$", "document must be a JSON object")
    if doc.get("format") != FORMAT:
        raise ModelFormatError("$.format", f"expected {FORMAT!r}, got "
                               f"{doc.get('format')!r}")
    bones = []
    for i, b in enumerate(_expect(doc, "bones", list, "$")):
        loc = f"$.bones[{i}]"
        bid = _expect(b, "id", str, loc)
        loc = f"$.bones[{i}] ({bid})"
        try:
            bones.append(Bone(
                id=bid,
                parent=b.get("parent"),
                joint_type=_expect(b, "joint_type", str, loc),
                local_offset=_vec3(_expect(b, "local_offset", list, loc),
                                   f"{loc}.local_offset"),
                shaft_axis=_vec3(_expect(b, "shaft_axis", list, loc),
                                 f"{loc}.shaft_axis"),
                mass=float(_expect(b, "mass", (int, float), loc)),
                inertia=np.asarray(_expect(b, "inertia", list, loc), dtype=float),
                shape_params=ShapeParams(**b.get("shape_params", {})),
                joint_axis=(_vec3(b["joint_axis"], f"{loc}.joint_axis")
                            if "joint_axis" in b else None),
                rest_rotation=np.asarray(
                    b.get("rest_rotation", [1, 0, 0, 0]), dtype=float),
                length=float(b.get("length", 0.1)),
                com=(_vec3(b["com"], f"{loc}.com") if "com" in b else None),
                group=b.get("group"),
            ))
        except ModelError as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(loc, str(exc)) from exc
    try:
        skeleton = Skeleton(bones)
    except ModelError as exc:
        raise ModelFormatError("$.bones", str(exc)) from exc

    muscles = []
    for i, m in enumerate(_expect(doc, "muscles", list, "$")):
        loc = f"$.muscles[{i}]"
        mid = _expect(m, "id", str, loc)
        loc = f"$.muscles[{i}] ({mid})"
        wps = []
        for wi, wp in enumerate(_expect(m, "waypoints", list, loc)):
            wloc = f"{loc}.waypoints[{wi}]"
            entries = []
            for ei, e in enumerate(_expect(wp, "skinning", list, wloc)):
                eloc = f"{wloc}.skinning[{ei}]"
                entries.append(SkinEntry(
                    _expect(e, "bone", str, eloc),
                    float(_expect(e, "weight", (int, float), eloc)),
                    _vec3(_expect(e, "coords", list, eloc), f"{eloc}.coords")))
            try:
                wps.append(Waypoint(tuple(entries)))
            except ModelError as exc:
                raise ModelFormatError(wloc, str(exc)) from exc
        motions = []
        for ji, jm in enumerate(m.get("joint_motions", [])):
            jloc = f"{loc}.joint_motions[{ji}]"
            rng = _expect(jm, "range", list, jloc)
            motions.append(JointMotion(
                _expect(jm, "name", str, jloc),
                _expect(jm, "joint", str, jloc),
                _vec3(_expect(jm, "axis", list, jloc), f"{jloc}.axis"),
                (float(rng[0]), float(rng[1]))))
        try:
            muscles.append(MusculotendonUnit(
                id=mid, waypoints=tuple(wps),
                l_m0=float(_expect(m, "l_m0", (int, float), loc)),
                l_t0=float(_expect(m, "l_t0", (int, float), loc)),
                f_max=float(_expect(m, "f_max", (int, float), loc)),
                pennation=float(m.get("pennation", 0.0)),
                k_m=float(m.get("k_m", 1.6)),
                k_t=float(m.get("k_t", 1.03)),
                joint_motions=tuple(motions)))
        except ModelError as exc:
            if isinstance(exc, ModelFormatError):
                raise
            raise ModelFormatError(loc, str(exc)) from exc

    curves = CurveSet.default(CurveParams(**doc.get("curves", {})))
    try:
        return BodyModel(skeleton, muscles, curves)
    except ModelError as exc:
        raise ModelFormatError("$", str(exc)) from exc


def load_model(path: str | Path) -> BodyModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError("$", f"invalid JSON: {exc}") from exc
    return model_from_dict(doc)
