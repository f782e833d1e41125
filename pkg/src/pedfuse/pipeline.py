"""Per-frame orchestration: ground points -> ground plane -> AOI -> fusion."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

from .errors import CalibrationError, PointAtInfinity
from .evaluation import DEFAULT_GATE, GroundTruthFrame, MetricsReport, evaluate_frames
from .fusion import FusedDetection, average_heatmap_fuse, fuse_clique_cover
from .geometry import (
    AreaOfInterest,
    CameraCalibration,
    GroundHomography,
    WorldGroundPoint,
    compute_homography,
    filter_aoi,
    filter_visibility,
    project_to_ground,
)
from .groundpoint import estimate_ground_point, estimate_ground_point_bbox
from .io import FrameBundle

logger = logging.getLogger(__name__)

CLIQUE_COVER = "clique_cover"
AVERAGE_HEATMAP = "average_heatmap"
POSE_BBOX = "pose_bbox"
BBOX_ONLY = "bbox_only"

WILDTRACK_AOI = AreaOfInterest(0.0, 0.0, 12.0, 36.0)


@dataclass(frozen=True)
class HeatmapParams:
    resolution: float = 0.025
    kernel_radius: float = 0.8
    sigma: float = 10.1
    min_distance: float = 0.5
    min_value: float = 0.3


@dataclass(frozen=True)
class PipelineConfig:
    t_s: float = 0.4
    t_g: float = 0.7
    t_d: Optional[float] = None
    gate: float = DEFAULT_GATE
    aoi: Optional[AreaOfInterest] = WILDTRACK_AOI
    fusion_method: str = CLIQUE_COVER
    groundpoint_method: str = POSE_BBOX
    heatmap: HeatmapParams = field(default_factory=HeatmapParams)
    # camera_id -> ground-plane polygon; points a camera reports outside it are dropped
    visibility: Optional[Mapping[int, Tuple[Tuple[float, float], ...]]] = None

    def __post_init__(self):
        if not 0 <= self.t_s <= 1:
            raise ValueError("t_s must lie in [0, 1]")
        for name in ("t_g", "gate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.t_d is not None and self.t_d <= 0:
            raise ValueError("t_d must be positive")
        if self.fusion_method not in (CLIQUE_COVER, AVERAGE_HEATMAP):
            raise ValueError(f"unknown fusion method {self.fusion_method!r}")
        if self.groundpoint_method not in (POSE_BBOX, BBOX_ONLY):
            raise ValueError(f"unknown ground point method {self.groundpoint_method!r}")
        if self.fusion_method == AVERAGE_HEATMAP and self.aoi is None:
            raise ValueError("the average heatmap fuser needs an area of interest")


@dataclass(frozen=True)
class FrameResult:
    frame_id: int
    detections: Tuple[FusedDetection, ...]
    points: Tuple[WorldGroundPoint, ...] = ()
    errors: Tuple[str, ...] = ()


@dataclass(frozen=True)
class PipelineResult:
    frames: Tuple[FrameResult, ...]
    metrics: Optional[MetricsReport] = None

    @property
    def errors(self) -> List[str]:
        return [e for f in self.frames for e in f.errors]


def ground_points_for_frame(
    frame: FrameBundle,
    homographies: Mapping[int, GroundHomography],
    config: PipelineConfig,
) -> Tuple[List[WorldGroundPoint], List[str]]:
    """Project every usable detection of a frame onto the ground plane."""
    points = []
    errors = []
    for cam in sorted(frame.detections):
        H = homographies[cam]
        for det in frame.detections[cam]:
            if config.groundpoint_method == BBOX_ONLY:
                est = estimate_ground_point_bbox(det)
            else:
                est = estimate_ground_point(det, config.t_s)
            if est is None:
                continue
            try:
                X, Y = project_to_ground(H, est.point)
            except PointAtInfinity as exc:
                errors.append(f"frame {frame.frame_id} camera {cam} detection {det.detection_id}: {exc}")
                continue
            points.append(WorldGroundPoint(X, Y, cam, det.detection_id, det.descriptor))
    if config.visibility:
        points = filter_visibility(points, config.visibility)
    if config.aoi is not None:
        points = filter_aoi(points, config.aoi)
    return points, errors


def process_frame(
    frame: FrameBundle,
    homographies: Mapping[int, GroundHomography],
    config: PipelineConfig,
    camera_count: int,
) -> FrameResult:
    points, errors = ground_points_for_frame(frame, homographies, config)
    if config.fusion_method == AVERAGE_HEATMAP:
        hp = config.heatmap
        fused = average_heatmap_fuse(
            points,
            config.aoi,
            camera_count,
            resolution=hp.resolution,
            kernel_radius=hp.kernel_radius,
            sigma=hp.sigma,
            min_distance=hp.min_distance,
            min_value=hp.min_value,
        )
    else:
        fused = fuse_clique_cover(points, config.t_g, config.t_d)
    return FrameResult(frame.frame_id, tuple(fused), tuple(points), tuple(errors))


def run_pipeline(
    config: PipelineConfig,
    calibrations: Mapping[int, CameraCalibration],
    frames: Sequence[FrameBundle],
    ground_truth: Optional[Sequence[GroundTruthFrame]] = None,
    workers: int = 1,
) -> PipelineResult:
    """Fuse every frame and, when ground truth is given, score the result.

    Ground truth is clipped to the AOI before matching. Per-point projection
    failures are collected in ``FrameResult.errors``; a camera without
    calibration aborts the run.
    """
    for frame in frames:
        missing = set(frame.detections) - set(calibrations)
        if missing:
            raise CalibrationError(f"frame {frame.frame_id}: no calibration for cameras {sorted(missing)}")
    homographies = {cam: compute_homography(c) for cam, c in calibrations.items()}
    if config.fusion_method == AVERAGE_HEATMAP:
        hp = config.heatmap
        logger.info(
            "average heatmap sigma %.3g taken in grid cells: %.4g m at %.4g m/cell",
            hp.sigma,
            hp.sigma * hp.resolution,
            hp.resolution,
        )
    camera_count = len(calibrations)

    def work(frame):
        return process_frame(frame, homographies, config, camera_count)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, frames))
    else:
        results = [work(f) for f in frames]
    results.sort(key=lambda r: r.frame_id)
    for r in results:
        for e in r.errors:
            logger.warning(e)

    metrics = None
    if ground_truth is not None:
        dets = {r.frame_id: [(d.X, d.Y) for d in r.detections] for r in results}
        if config.aoi is not None:
            ground_truth = [
                GroundTruthFrame(g.frame_id, tuple(a for a in g.annotations if config.aoi.contains(a[1], a[2])))
                for g in ground_truth
            ]
        metrics = evaluate_frames(dets, ground_truth, config.gate)
    return PipelineResult(tuple(results), metrics)
