"""Pose dataset ingestion: JSON-lines and CSV with a declared header.

Records carry a root transform plus named joint coordinates (quaternion
[w,x,y,z] for ball joints, scalar radians for revolute). Optional
subsampling runs before mirroring so the result stays closed under
left/right reflection.
"""
from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

import numpy as np

from ..anatomy import ModelError, Pose, Skeleton
from ..rom import DatasetProvenance, PoseDataset


class DatasetFormatError(ModelError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def pose_to_record(skeleton: Skeleton, pose: Pose) -> dict:
    joints = {}
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        if bone.joint_type == "free_root":
            continue
        c = pose.coord(skeleton, bid)
        joints[bid] = float(c) if bone.joint_type == "revolute" else \
            [float(x) for x in np.asarray(c)]
    return {"root_pos": [float(x) for x in pose.root_pos],
            "root_quat": [float(x) for x in pose.root_quat],
            "joints": joints}


def record_to_pose(skeleton: Skeleton, rec: dict, line: int) -> Pose:
    try:
        pose = Pose(
            root_quat=np.asarray(rec.get("root_quat", [1, 0, 0, 0]), dtype=float),
            root_pos=np.asarray(rec.get("root_pos", [0, 0, 0]), dtype=float))
        for bid, value in rec.get("joints", {}).items():
            if bid not in skeleton.index:
                raise DatasetFormatError(line, f"unknown joint {bid!r}")
            bone = skeleton.bone(bid)
            if bone.joint_type == "revolute":
                pose.joint_coords[bid] = float(value)
            else:
                q = np.asarray(value, dtype=float)
                if q.shape != (4,):
                    raise DatasetFormatError(
                        line, f"joint {bid!r}: expected quaternion [w,x,y,z]")
                pose.joint_coords[bid] = q / np.linalg.norm(q)
        return pose
    except (TypeError, ValueError) as exc:
        raise DatasetFormatError(line, str(exc)) from exc


def save_dataset_jsonl(skeleton: Skeleton, dataset: PoseDataset,
                       path: str | Path) -> None:
    with open(path, "w") as fh:
        for pose in dataset:
            fh.write(json.dumps(pose_to_record(skeleton, pose)) + "\n")


def _csv_columns(skeleton: Skeleton) -> list[str]:
    cols = ["root_px", "root_py", "root_pz",
            "root_qw", "root_qx", "root_qy", "root_qz"]
    for bid in skeleton.topo_order:
        bone = skeleton.bone(bid)
        if bone.joint_type == "revolute":
            cols.append(bid)
        elif bone.joint_type == "ball_and_socket":
            cols.extend(f"{bid}_q{c}" for c in "wxyz")
    return cols


def save_dataset_csv(skeleton: Skeleton, dataset: PoseDataset,
                     path: str | Path) -> None:
    cols = _csv_columns(skeleton)
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for pose in dataset:
            rec = pose_to_record(skeleton, pose)
            values = list(rec["root_pos"]) + list(rec["root_quat"])
            for bid in skeleton.topo_order:
                bone = skeleton.bone(bid)
                if bone.joint_type == "revolute":
                    values.append(rec["joints"][bid])
                elif bone.joint_type == "ball_and_socket":
                    values.extend(rec["joints"][bid])
            fh.write(",".join(f"{v:.12g}" for v in values) + "\n")


def _parse_csv(skeleton: Skeleton, path: Path) -> list[Pose]:
    lines = path.read_text().splitlines()
    if not lines:
        raise DatasetFormatError(1, "empty file")
    header = [h.strip() for h in lines[0].split(",")]
    col = {name: i for i, name in enumerate(header)}
    for required in ("root_px", "root_qw"):
        if required not in col:
            raise DatasetFormatError(1, f"header missing column {required!r}")
    poses = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise DatasetFormatError(
                ln, f"expected {len(header)} columns, got {len(parts)}")
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise DatasetFormatError(ln, str(exc)) from exc
        pose = Pose(
            root_quat=np.array([row[col["root_qw"]], row[col["root_qx"]],
                                row[col["root_qy"]], row[col["root_qz"]]]),
            root_pos=np.array([row[col["root_px"]], row[col["root_py"]],
                               row[col["root_pz"]]]))
        for bid in skeleton.topo_order:
            bone = skeleton.bone(bid)
            if bone.joint_type == "revolute" and bid in col:
                pose.joint_coords[bid] = row[col[bid]]
            elif bone.joint_type == "ball_and_socket" and f"{bid}_qw" in col:
                q = np.array([row[col[f"{bid}_q{c}"]] for c in "wxyz"])
                pose.joint_coords[bid] = q / np.linalg.norm(q)
        poses.append(pose)
    return poses


def ingest_dataset(path: str | Path, skeleton: Skeleton, fmt: str = "jsonl",
                   mirror: bool = False, subsample: float = 1.0) -> PoseDataset:
    """Read poses, then subsample, then optionally mirror (in that order,
    so mirrored datasets stay reflection-closed)."""
    path = Path(path)
    if fmt == "jsonl":
        poses = []
        for ln, line in enumerate(path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(ln, f"invalid JSON: {exc}") from exc
            poses.append(record_to_pose(skeleton, rec, ln))
    elif fmt == "csv":
        poses = _parse_csv(skeleton, path)
    else:
        raise ModelError(f"unknown dataset format {fmt!r}")
    ds = PoseDataset.from_poses(
        skeleton, poses,
        DatasetProvenance(source=str(path)))
    if subsample != 1.0:
        ds = ds.subsampled(skeleton, subsample)
    if mirror:
        ds = ds.mirrored(skeleton)
    return ds


# External capture formats (marker files, vendor skeletons) convert via
# this registry; register a callable path -> list[Pose] per format name.
CONVERTERS: dict[str, object] = {}
