"""Command-line interface: estimation, retargeting, grids, curves,
coordination checks, and the HTTP server.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ..anatomy import ModelError, Pose
from ..dynamics import (DynamicsState, complementarity_residual,
                        solve_joint_limit_lcp, solve_muscle_qp,
                        torque_angle_curve)
from ..retarget import RetargetConfig, length_angle_curve, retarget_pipeline
from ..rom import (PoseDataset, encode_grid, estimate_lengths, grid_to_csv,
                   relax_keyposes, rom_grid)
from .config import load_config, skeleton_params_from_config
from .datasets import ingest_dataset
from .io import load_model, model_hash, save_model
from .store import ProjectStore


def _dataset_from_args(args, skeleton) -> PoseDataset:
    if getattr(args, "dataset", None):
        return ingest_dataset(args.dataset, skeleton, fmt=args.dataset_format,
                              mirror=args.mirror, subsample=args.subsample)
    if getattr(args, "synthetic_dataset", None):
        from ..toybody import synthetic_dataset
        return synthetic_dataset(skeleton, args.synthetic_dataset, args.seed)
    raise ModelError("provide --dataset FILE or --synthetic-dataset N")


def _add_dataset_args(p: argparse.ArgumentParser):
    p.add_argument("--dataset", help="pose dataset file (jsonl or csv)")
    p.add_argument("--dataset-format", default="jsonl", choices=("jsonl", "csv"))
    p.add_argument("--mirror", action="store_true",
                   help="append left/right mirrored poses")
    p.add_argument("--subsample", type=float, default=1.0,
                   help="keep this fraction of poses (e.g. 0.1)")
    p.add_argument("--synthetic-dataset", type=int, metavar="N",
                   help="generate N synthetic poses instead of reading a file")
    p.add_argument("--seed", type=int, default=42,
                   help="seed for synthetic data and any randomized steps")


def _resolution(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad resolution {text!r}")
    if len(parts) not in (1, 3):
        raise argparse.ArgumentTypeError("resolution is N or TxAxP")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="myoretarget",
        description="Musculature retargeting: length estimation, ROM grids, "
                    "curve characterization, and muscle coordination checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate fiber/tendon lengths from a"
                       " pose dataset")
    p.add_argument("--model", required=True)
    _add_dataset_args(p)
    p.add_argument("--relax", action="store_true",
                   help="relax key-poses after estimation")
    p.add_argument("--torque-threshold", type=float, default=50.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("retarget", help="run the three-stage retargeting "
                       "pipeline")
    p.add_argument("--model", required=True, help="reference model file")
    p.add_argument("--params", required=True, help="skeleton parameter config")
    _add_dataset_args(p)
    p.add_argument("--config", help="optimizer constants config file")
    p.add_argument("--report-joint", action="append", default=[],
                   help="joint to include in grid-error report (repeatable)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("rom-grid", help="sample a joint ROM grid")
    p.add_argument("--model", required=True)
    p.add_argument("--joint", required=True)
    p.add_argument("--res", type=_resolution, default=(18, 36, 36),
                   help="resolution TxAxP (default 18x36x36)")
    p.add_argument("--conditioning-joint")
    p.add_argument("--conditioning-angle", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write a CSV dump here")

    p = sub.add_parser("curves", help="export length-angle and torque-angle "
                       "curves")
    p.add_argument("--model", required=True)
    p.add_argument("--muscle", help="muscle id (length-angle mode)")
    p.add_argument("--joint", help="joint id (torque-angle mode)")
    p.add_argument("--motion", required=True)
    p.add_argument("--samples", type=int, default=21)
    p.add_argument("--out", required=True)

    p = sub.add_parser("qp-check", help="run the muscle-coordination QP and "
                       "joint-limit LCP on a scenario")
    p.add_argument("--model", required=True)
    p.add_argument("--scenario", help="scenario JSON (pose, velocity, "
                   "qdd_desired, w_reg)")
    p.add_argument("--kkt-tol", type=float, default=1e-6)

    p = sub.add_parser("serve", help="serve the HTTP API for the editor UI")
    p.add_argument("--model", required=True)
    _add_dataset_args(p)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    return parser


def cmd_estimate(args) -> int:
    model = load_model(args.model)
    dataset = _dataset_from_args(args, model.skeleton)
    model = estimate_lengths(model, dataset)
    if args.relax:
        model, report = relax_keyposes(model, [Pose()],
                                       torque_threshold=args.torque_threshold)
        print(f"relaxed {len(report.grown)} muscles in "
              f"{report.iterations} iterations")
    h = save_model(model, args.out)
    print(f"estimated lengths for {len(model.muscles)} muscles -> "
          f"{args.out} ({h})")
    return 0


def cmd_retarget(args) -> int:
    reference = load_model(args.model)
    params = skeleton_params_from_config(load_config(args.params))
    dataset = _dataset_from_args(args, reference.skeleton)
    cfg = RetargetConfig(report_joints=list(args.report_joint))
    if args.config:
        doc = load_config(args.config).get("optimizer", {})
        if "w_length" in doc:
            cfg.waypoints.w_length = float(doc["w_length"])
        if "w_delta" in doc:
            cfg.waypoints.w_delta = float(doc["w_delta"])
        if "max_iters" in doc:
            cfg.waypoints.max_iters = int(doc["max_iters"])
        if "ratio_bound" in doc:
            cfg.ratios.bound = float(doc["ratio_bound"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model, report = retarget_pipeline(reference, params, dataset, config=cfg,
                                      keyposes=[Pose()])
    h = save_model(model, out / "retargeted.msk.json")
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2))
    with open(out / "curves.csv", "w") as fh:
        fh.write("muscle,motion,theta_max_before,theta_max_after,"
                 "theta_min_before,theta_min_after,delta_before,delta_after,"
                 "class_before,class_after\n")
        for mid, entries in report.muscle_curves.items():
            for r in entries:
                fh.write(f"{mid},{r.motion},{r.before.theta_max:.6g},"
                         f"{r.after.theta_max:.6g},{r.before.theta_min:.6g},"
                         f"{r.after.theta_min:.6g},{r.before.delta:.6g},"
                         f"{r.after.delta:.6g},"
                         f"{r.before.classification.value},"
                         f"{r.after.classification.value}\n")
    print(f"retargeted model {h} written to {out}")
    for joint, err in report.grid_errors.items():
        print(f"grid error {joint}: {err:.2f}%")
    print(f"functional disorder rate: {report.disorder_rate:.2f}%")
    return 0


def cmd_rom_grid(args) -> int:
    model = load_model(args.model)
    cond = Pose()
    if args.conditioning_joint:
        cond.joint_coords[args.conditioning_joint] = args.conditioning_angle
    grid = rom_grid(model, args.joint, args.res, conditioning_pose=cond)
    Path(args.out).write_text(encode_grid(grid))
    if args.csv:
        Path(args.csv).write_text(grid_to_csv(grid))
    print(f"{grid.joint_id}: {grid.true_count}/{grid.cell_count} valid cells "
          f"-> {args.out}")
    return 0


def cmd_curves(args) -> int:
    model = load_model(args.model)
    if bool(args.muscle) == bool(args.joint):
        print("error: provide exactly one of --muscle or --joint",
              file=sys.stderr)
        return 2
    if args.muscle:
        m = model.muscle(args.muscle)
        jm = next((x for x in m.joint_motions if x.name == args.motion), None)
        if jm is None:
            raise ModelError(f"unknown motion {args.motion!r} on muscle "
                             f"{args.muscle!r}")
        curve = length_angle_curve(model, args.muscle, jm, args.samples)
        with open(args.out, "w") as fh:
            fh.write("theta,length\n")
            for t, v in zip(curve.thetas, curve.lengths):
                fh.write(f"{t:.9g},{v:.9g}\n")
        chars = curve.characteristics
        print(f"{args.muscle} over {args.motion}: "
              f"{chars.classification.value}, span {chars.delta:.4g} m")
    else:
        jm = next((x for x in model.all_motions()
                   if x.name == args.motion and x.joint_id == args.joint), None)
        if jm is None:
            raise ModelError(f"unknown motion {args.motion!r} on joint "
                             f"{args.joint!r}")
        curve = torque_angle_curve(model, jm, samples=args.samples)
        with open(args.out, "w") as fh:
            fh.write("theta,torque\n")
            for t, v in zip(curve.thetas, curve.torques):
                fh.write(f"{t:.9g},{v:.9g}\n")
        print(f"{args.joint} {args.motion}: peak torque at theta = "
              f"{curve.peak_theta:.3f}")
    return 0


def cmd_qp_check(args) -> int:
    model = load_model(args.model)
    n = model.skeleton.dof_count
    pose = Pose()
    velocity = np.zeros(n)
    qdd_desired = np.zeros(n)
    w_reg = 0.01
    if args.scenario:
        doc = json.loads(Path(args.scenario).read_text())
        for bid, val in doc.get("pose", {}).items():
            pose.joint_coords[bid] = (float(val) if np.isscalar(val)
                                      else np.asarray(val, dtype=float))
        if "velocity" in doc:
            velocity = np.asarray(doc["velocity"], dtype=float)
        if "qdd_desired" in doc:
            qdd_desired = np.asarray(doc["qdd_desired"], dtype=float)
        w_reg = float(doc.get("w_reg", w_reg))
    state = DynamicsState(pose, velocity)
    qp = solve_muscle_qp(model, state, qdd_desired, w_reg=w_reg)
    lcp = solve_joint_limit_lcp(model, state)
    comp = complementarity_residual(lcp.forces, lcp.velocities)
    print(f"QP: kkt residual {qp.kkt_residual:.3e}, tracking error "
          f"{qp.tracking_error:.3e}, max activation {qp.activations.a.max():.3f}")
    print(f"LCP: {len(lcp.muscle_ids)} active limit rows, complementarity "
          f"residual {comp:.3e}")
    ok = qp.kkt_residual <= args.kkt_tol and comp <= 1e-6
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    model = load_model(args.model)
    dataset = None
    if args.dataset or args.synthetic_dataset:
        dataset = _dataset_from_args(args, model.skeleton)
    store = ProjectStore(model, dataset, keyposes=[Pose()])
    app = create_app(store)
    print(f"serving model {model_hash(model)} on "
          f"http://{args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "estimate": cmd_estimate,
    "retarget": cmd_retarget,
    "rom-grid": cmd_rom_grid,
    "curves": cmd_curves,
    "qp-check": cmd_qp_check,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ModelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
