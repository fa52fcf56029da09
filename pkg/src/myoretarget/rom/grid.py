"""Discretized ROM grids over a joint's twist x cone configuration space."""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from ..anatomy import (BodyModel, ModelError, Pose, PoseBatch,
                       bone_world_transforms_batch, muscle_crosses_joint)
from ..geometry import orthonormal_frame, quat_to_matrix_batch
from .editing import BallEdit, RevoluteEdit, RomEdit, apply_rom_edit
from .validity import stretch_limits, valid_mask

DEFAULT_RESOLUTION = (18, 36, 36)  # twist x cone azimuth x cone polar


@dataclass
class RomGrid:
    joint_id: str
    resolution: tuple[int, ...]
    cells: np.ndarray                 # boolean, shape == resolution
    frame: np.ndarray = field(default_factory=lambda: np.eye(3))
    # rows: azimuth reference e1, e2, polar axis (joint-local)

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=bool)
        self.resolution = tuple(int(r) for r in self.resolution)
        if self.cells.shape != self.resolution:
            raise ModelError("grid cell array does not match resolution")
        self.frame = np.asarray(self.frame, dtype=float)

    @property
    def cell_count(self) -> int:
        return int(np.prod(self.resolution))

    @property
    def true_count(self) -> int:
        return int(self.cells.sum())

    def __eq__(self, other) -> bool:
        return (isinstance(other, RomGrid)
                and self.joint_id == other.joint_id
                and self.resolution == other.resolution
                and np.array_equal(self.cells, other.cells))


def grid_error_rate(a: RomGrid, b: RomGrid) -> float:
    """Percentage of cells on which the two grids disagree."""
    if a.resolution != b.resolution:
        raise ModelError(
            f"grid resolution mismatch: {a.resolution} vs {b.resolution}")
    return 100.0 * float(np.mean(a.cells != b.cells))


def twist_bin_centers(n: int) -> np.ndarray:
    return -np.pi + (np.arange(n) + 0.5) * (2.0 * np.pi / n)


def _cell_rotations(shaft: np.ndarray, frame, omega: np.ndarray,
                    dirs: np.ndarray) -> np.ndarray:
    """Compose (B,4) quaternions conic(dir) * twist(omega) about `shaft`."""
    b = omega.shape[0]
    half = 0.5 * omega
    twist = np.zeros((b, 4))
    twist[:, 0] = np.cos(half)
    twist[:, 1:] = np.sin(half)[:, None] * shaft[None, :]
    # minimal rotation shaft -> dir: q = normalize([1 + shaft.dir, shaft x dir])
    conic = np.zeros((b, 4))
    conic[:, 0] = 1.0 + dirs @ shaft
    conic[:, 1:] = np.cross(np.broadcast_to(shaft, dirs.shape), dirs)
    degenerate = conic[:, 0] < 1e-12
    if np.any(degenerate):
        # antipodal: 180-degree rotation about a deterministic perpendicular
        from ..geometry import perpendicular
        p = perpendicular(shaft)
        conic[degenerate, 0] = 0.0
        conic[degenerate, 1:] = p
    conic /= np.linalg.norm(conic, axis=1, keepdims=True)
    # quaternion product conic * twist
    w1, v1 = conic[:, :1], conic[:, 1:]
    w2, v2 = twist[:, :1], twist[:, 1:]
    out = np.empty((b, 4))
    out[:, :1] = w1 * w2 - np.sum(v1 * v2, axis=1, keepdims=True)
    out[:, 1:] = w1 * v2 + w2 * v1 + np.cross(v1, v2)
    return out


def _edit_cells(edit: BallEdit, center: np.ndarray, omega: np.ndarray,
                dirs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ball-joint transformation of cell centers."""
    omega = (edit.twist_scale * (omega - edit.twist_center)
             + edit.twist_center + edit.twist_shift)
    rot = quat_to_matrix_batch(edit.cone_reaim[None, :])[0]
    v = dirs @ rot.T
    cosang = np.clip(v @ center, -1.0, 1.0)
    angle = np.arccos(cosang)
    axis = np.cross(np.broadcast_to(center, v.shape), v)
    norm = np.linalg.norm(axis, axis=1, keepdims=True)
    safe = norm[:, 0] > 1e-12
    axis = np.where(norm > 1e-12, axis / np.where(norm > 0, norm, 1.0), axis)
    new_angle = np.minimum(edit.cone_scale * angle, np.pi - 1e-9)
    # rotate center about axis by new_angle (Rodrigues)
    c = np.cos(new_angle)[:, None]
    s = np.sin(new_angle)[:, None]
    k = axis
    base = np.broadcast_to(center, v.shape)
    rotated = (base * c + np.cross(k, base) * s
               + k * (np.sum(k * base, axis=1, keepdims=True)) * (1 - c))
    out = np.where(safe[:, None], rotated, base)
    return omega, out


def rom_grid(model: BodyModel, joint_id: str,
             resolution: tuple[int, ...] = DEFAULT_RESOLUTION,
             conditioning_pose: Pose | None = None,
             edit: RomEdit | None = None,
             frame: np.ndarray | None = None) -> RomGrid:
    """Sample pose validity over a joint's configuration space.

    Ball joints get a (twist x azimuth x polar) grid parameterized around
    the bone's rest shaft axis (or a caller-supplied frame); revolute
    joints get a 1-D angle grid over (-pi, pi]. All other joints are held
    at the conditioning pose. An optional edit evaluates the edited
    predicate V(T(q)) instead.
    """
    skeleton = model.skeleton
    bone = skeleton.bone(joint_id)
    cond = conditioning_pose.copy() if conditioning_pose is not None else Pose()
    if edit is not None:
        cond = apply_rom_edit(edit, skeleton, cond)
        joint_edit = edit.joints.get(joint_id)
    else:
        joint_edit = None

    if bone.joint_type == "revolute":
        if len(resolution) == 3:
            resolution = (resolution[0],)
        (n,) = resolution
        angles = twist_bin_centers(n)
        if joint_edit is not None:
            if not isinstance(joint_edit, RevoluteEdit):
                raise ModelError(f"joint {joint_id}: expected a revolute edit")
            angles = np.array([joint_edit.apply(a) for a in angles])
        batch = PoseBatch.repeated(skeleton, cond, n)
        batch.coords[joint_id] = angles
        cells = _batch_validity(model, joint_id, batch)
        return RomGrid(joint_id, (n,), cells.reshape(n))

    if bone.joint_type != "ball_and_socket":
        raise ModelError(f"joint {joint_id}: grids need a revolute or ball joint")
    if len(resolution) != 3:
        raise ModelError("ball-joint grids need (twist, azimuth, polar) resolution")
    nt, naz, npol = resolution
    shaft = bone.shaft_axis
    if frame is None:
        e1, e2, pol_axis = orthonormal_frame(shaft)
    else:
        frame = np.asarray(frame, dtype=float)
        e1, e2, pol_axis = frame[0], frame[1], frame[2]
    tw = twist_bin_centers(nt)
    az = (np.arange(naz) + 0.5) * (2.0 * np.pi / naz)
    pol = (np.arange(npol) + 0.5) * (np.pi / npol)
    tw_g, az_g, pol_g = np.meshgrid(tw, az, pol, indexing="ij")
    omega = tw_g.ravel()
    dirs = (np.cos(pol_g.ravel())[:, None] * pol_axis[None, :]
            + np.sin(pol_g.ravel())[:, None]
            * (np.cos(az_g.ravel())[:, None] * e1[None, :]
               + np.sin(az_g.ravel())[:, None] * e2[None, :]))
    if joint_edit is not None:
        if not isinstance(joint_edit, BallEdit):
            raise ModelError(f"joint {joint_id}: expected a ball edit")
        center = joint_edit.cone_center if joint_edit.cone_center is not None else shaft
        omega, dirs = _edit_cells(joint_edit, center, omega, dirs)
    quats = _cell_rotations(shaft, (e1, e2, pol_axis), omega, dirs)
    batch = PoseBatch.repeated(skeleton, cond, len(omega))
    batch.coords[joint_id] = quats
    cells = _batch_validity(model, joint_id, batch)
    return RomGrid(joint_id, (nt, naz, npol), cells.reshape(nt, naz, npol),
                   frame=np.stack([e1, e2, pol_axis]))


def _batch_validity(model: BodyModel, joint_id: str, batch: PoseBatch) -> np.ndarray:
    # only muscles whose length depends on the swept joint can flip cells;
    # the rest are constant across the grid and checked once
    moving = [m for m in model.muscles
              if muscle_crosses_joint(m, model.skeleton, joint_id)]
    static = [m for m in model.muscles if m not in moving]
    ok = valid_mask(model, batch, moving)
    if static:
        first = PoseBatch.from_poses(model.skeleton, [batch.pose(0)])
        if not valid_mask(model, first, static)[0]:
            ok[:] = False
    return ok


# ---------------------------------------------------------------------------
# serialization: run-length-encoded text format and CSV

FORMAT_TAG = "romgrid-1"


def encode_grid(grid: RomGrid) -> str:
    flat = grid.cells.ravel()
    runs: list[int] = []
    first = bool(flat[0]) if flat.size else False
    if flat.size:
        changes = np.flatnonzero(np.diff(flat.astype(np.int8)))
        prev = 0
        for c in changes:
            runs.append(int(c + 1 - prev))
            prev = int(c + 1)
        runs.append(int(flat.size - prev))
    out = io.StringIO()
    out.write(f"{FORMAT_TAG}\n")
    out.write(f"joint {grid.joint_id}\n")
    out.write("resolution " + " ".join(str(r) for r in grid.resolution) + "\n")
    out.write("frame " + " ".join(f"{v:.17g}" for v in grid.frame.ravel()) + "\n")
    out.write(f"first {int(first)}\n")
    out.write("runs " + " ".join(str(r) for r in runs) + "\n")
    return out.getvalue()


def decode_grid(text: str) -> RomGrid:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_TAG:
        raise ModelError(f"not a {FORMAT_TAG} document")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        key, _, rest = ln.partition(" ")
        fields[key] = rest
    try:
        joint = fields["joint"]
        resolution = tuple(int(v) for v in fields["resolution"].split())
        frame = np.array([float(v) for v in fields["frame"].split()]).reshape(3, 3)
        first = bool(int(fields["first"]))
        runs = [int(v) for v in fields["runs"].split()] if fields["runs"] else []
    except (KeyError, ValueError) as exc:
        raise ModelError(f"malformed grid document: {exc}") from exc
    total = int(np.prod(resolution))
    flat = np.empty(total, dtype=bool)
    at = 0
    value = first
    for r in runs:
        flat[at:at + r] = value
        at += r
        value = not value
    if at != total:
        raise ModelError(f"run lengths cover {at} cells, expected {total}")
    return RomGrid(joint, resolution, flat.reshape(resolution), frame)


def grid_to_csv(grid: RomGrid) -> str:
    out = io.StringIO()
    if len(grid.resolution) == 1:
        out.write("angle,valid\n")
        for ang, v in zip(twist_bin_centers(grid.resolution[0]), grid.cells):
            out.write(f"{ang:.9g},{int(v)}\n")
        return out.getvalue()
    nt, naz, npol = grid.resolution
    tw = twist_bin_centers(nt)
    az = (np.arange(naz) + 0.5) * (2.0 * np.pi / naz)
    pol = (np.arange(npol) + 0.5) * (np.pi / npol)
    out.write("twist,azimuth,polar,valid\n")
    for i in range(nt):
        for j in range(naz):
            for k in range(npol):
                out.write(f"{tw[i]:.9g},{az[j]:.9g},{pol[k]:.9g},"
                          f"{int(grid.cells[i, j, k])}\n")
    return out.getvalue()
