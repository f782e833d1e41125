"""Command line interface: ``pedfuse fuse|eval|synth|plot|convert-*``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from typing import List, Optional

from .errors import PedfuseError
from .evaluation import DEFAULT_GATE, GroundTruthFrame, evaluate_frames
from .geometry import AreaOfInterest
from .io import (
    load_calibrations,
    load_detections,
    load_fused,
    load_ground_truth,
    load_json,
    save_fused,
    save_metrics,
)
from .pipeline import (
    AVERAGE_HEATMAP,
    BBOX_ONLY,
    CLIQUE_COVER,
    POSE_BBOX,
    WILDTRACK_AOI,
    HeatmapParams,
    PipelineConfig,
    run_pipeline,
)
from .plot import emit_plot
from .synthetic import NoiseParams, generate_synthetic_scene, write_scene

logger = logging.getLogger("pedfuse")

FUSION_CHOICES = {"cc": CLIQUE_COVER, "ah": AVERAGE_HEATMAP}
GROUNDPOINT_CHOICES = {"pose": POSE_BBOX, "bbox": BBOX_ONLY}
DEFAULT_AOI = ",".join(f"{v:g}" for v in WILDTRACK_AOI.as_tuple())


def _aoi(text: str) -> Optional[AreaOfInterest]:
    if text.lower() == "none":
        return None
    try:
        return AreaOfInterest.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _print_metrics(report) -> None:
    for key, value in report.to_dict().items():
        print(f"{key:>9}: {value:.4f}" if isinstance(value, float) else f"{key:>9}: {value}")


def cmd_fuse(args) -> int:
    config = PipelineConfig(
        t_s=args.ts,
        t_g=args.tg,
        t_d=args.td,
        gate=args.gate,
        aoi=args.aoi,
        fusion_method=FUSION_CHOICES[args.fusion],
        groundpoint_method=GROUNDPOINT_CHOICES[args.groundpoint],
        heatmap=HeatmapParams(
            resolution=args.ah_resolution,
            kernel_radius=args.ah_radius,
            sigma=args.ah_sigma,
            min_distance=args.ah_min_distance,
            min_value=args.ah_min_value,
        ),
    )
    if args.visibility:
        polygons = load_json(args.visibility)
        config = dataclasses.replace(
            config, visibility={int(k): tuple(tuple(map(float, v)) for v in poly) for k, poly in polygons.items()}
        )
    calibrations = load_calibrations(args.calib)
    frames = load_detections(args.detections)
    gt = load_ground_truth(args.gt) if args.gt else None
    result = run_pipeline(config, calibrations, frames, gt, workers=args.workers)
    save_fused(args.out, result.frames)
    n = sum(len(f.detections) for f in result.frames)
    logger.info("wrote %d detections over %d frames to %s", n, len(result.frames), args.out)
    if result.errors:
        logger.warning("%d projection errors (see output file)", len(result.errors))
    if result.metrics is not None:
        if args.metrics_out:
            save_metrics(args.metrics_out, result.metrics)
        _print_metrics(result.metrics)
    return 0


def cmd_eval(args) -> int:
    fused = load_fused(args.detections)
    gt = load_ground_truth(args.gt)
    if args.aoi is not None:
        gt = [GroundTruthFrame(g.frame_id, tuple(a for a in g.annotations if args.aoi.contains(a[1], a[2])))
              for g in gt]
    dets = {fid: [(d.X, d.Y) for d in ds] for fid, ds in fused.items()}
    report = evaluate_frames(dets, gt, args.gate)
    if args.out:
        save_metrics(args.out, report)
    _print_metrics(report)
    return 0


def cmd_synth(args) -> int:
    scene = generate_synthetic_scene(
        seed=args.seed,
        n_cameras=args.cameras,
        n_pedestrians=args.pedestrians,
        n_frames=args.frames,
        noise=NoiseParams(keypoint_px=args.noise_px, miss_rate=args.miss_rate,
                          descriptor_noise=args.descriptor_noise),
        aoi=args.aoi or WILDTRACK_AOI,
        descriptor_dim=args.descriptor_dim,
    )
    paths = write_scene(scene, args.out_dir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def cmd_plot(args) -> int:
    fused = load_fused(args.detections)
    if args.frame not in fused:
        raise PedfuseError(f"frame {args.frame} not in {args.detections}")
    dets = [(d.X, d.Y) for d in fused[args.frame]]
    truth = []
    if args.gt:
        for g in load_ground_truth(args.gt):
            if g.frame_id == args.frame:
                truth = g.positions
    emit_plot(dets, truth, args.aoi or WILDTRACK_AOI, args.out, title=f"frame {args.frame}")
    return 0


def cmd_convert_alphapose(args) -> int:
    from .converters import alphapose

    inputs = {}
    for item in args.camera:
        cam, _, path = item.partition("=")
        if not path:
            raise PedfuseError(f"--camera expects ID=PATH, got {item!r}")
        inputs[int(cam)] = path
    frames = alphapose.convert(inputs, args.out)
    print(f"converted {len(frames)} frames from {len(inputs)} cameras")
    return 0


def cmd_convert_wildtrack(args) -> int:
    from .converters import wildtrack

    if args.annotations:
        frames = wildtrack.convert_annotations(args.annotations, args.gt_out)
        print(f"converted {len(frames)} annotated frames; use --aoi {','.join(f'{v:g}' for v in wildtrack.AOI.as_tuple())}")
    if args.intrinsics:
        calibs = wildtrack.convert_calibration(args.intrinsics, args.extrinsics or [], args.calib_out)
        print(f"converted {len(calibs)} cameras")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pedfuse", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse per-camera detections into ground-plane detections")
    p.add_argument("--calib", required=True)
    p.add_argument("--detections", required=True)
    p.add_argument("--aoi", type=_aoi, default=_aoi(DEFAULT_AOI), help='"x0,y0,x1,y1" in meters, or "none"')
    p.add_argument("--ts", type=float, default=0.4, help="ankle keypoint score threshold")
    p.add_argument("--tg", type=float, default=0.7, help="ground point distance threshold (m)")
    p.add_argument("--td", type=float, default=None, help="descriptor distance threshold; enables re-ID")
    p.add_argument("--fusion", choices=sorted(FUSION_CHOICES), default="cc")
    p.add_argument("--groundpoint", choices=sorted(GROUNDPOINT_CHOICES), default="pose")
    p.add_argument("--ah-resolution", type=float, default=0.025, help="heatmap cell size (m)")
    p.add_argument("--ah-radius", type=float, default=0.8)
    p.add_argument("--ah-sigma", type=float, default=10.1, help="kernel sigma in grid cells")
    p.add_argument("--ah-min-distance", type=float, default=0.5)
    p.add_argument("--ah-min-value", type=float, default=0.3)
    p.add_argument("--visibility", help='JSON {"camera_id": [[X, Y], ...]} ground-plane visibility polygons')
    p.add_argument("--gt", help="optional ground truth; prints metrics")
    p.add_argument("--gate", type=float, default=DEFAULT_GATE)
    p.add_argument("--metrics-out")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("eval", help="score a fused detection file against ground truth")
    p.add_argument("--detections", required=True, help="output of `pedfuse fuse`")
    p.add_argument("--gt", required=True)
    p.add_argument("--gate", type=float, default=DEFAULT_GATE)
    p.add_argument("--aoi", type=_aoi, default=None, help="clip ground truth to this area first")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a synthetic scene")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cameras", type=int, default=7)
    p.add_argument("--pedestrians", type=int, default=20)
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--noise-px", type=float, default=0.0)
    p.add_argument("--miss-rate", type=float, default=0.0)
    p.add_argument("--descriptor-dim", type=int, default=0)
    p.add_argument("--descriptor-noise", type=float, default=0.0)
    p.add_argument("--aoi", type=_aoi, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("plot", help="SVG plot of one frame on the ground plane")
    p.add_argument("--detections", required=True)
    p.add_argument("--gt")
    p.add_argument("--frame", type=int, required=True)
    p.add_argument("--aoi", type=_aoi, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("convert-alphapose", help="AlphaPose results -> detection file")
    p.add_argument("--camera", action="append", required=True, metavar="ID=PATH")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert_alphapose)

    p = sub.add_parser("convert-wildtrack", help="WILDTRACK annotations/calibration -> pedfuse files")
    p.add_argument("--annotations", help="annotations_positions directory")
    p.add_argument("--gt-out", default="ground_truth.json")
    p.add_argument("--intrinsics", nargs="*")
    p.add_argument("--extrinsics", nargs="*")
    p.add_argument("--calib-out", default="calibration.json")
    p.set_defaults(func=cmd_convert_wildtrack)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * args.verbose
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PedfuseError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
