"""Synthetic multi-camera scenes with known pedestrian positions.

The generator renders consistent MSCOCO poses: at zero noise the ankle-based
ground point of every detection reprojects exactly onto the pedestrian's true
ground position, so the true positions serve as an oracle for the pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import PlacementFailure
from .evaluation import GroundTruthFrame
from .geometry import AreaOfInterest, CameraCalibration, look_at_calibration
from .groundpoint import LEFT_ANKLE, NUM_KEYPOINTS, RIGHT_ANKLE, PoseDetection
from .io import FrameBundle, save_calibrations, save_detections, save_ground_truth

IMAGE_WIDTH = 1920
IMAGE_HEIGHT = 1080
PERSON_HEIGHT = 1.75

# (horizontal offset, height above ground) as fractions of the person's
# pixel height, MSCOCO order; ankles are overwritten per detection
_SKELETON = np.array(
    [
        (0.00, 0.94),
        (-0.02, 0.96),
        (0.02, 0.96),
        (-0.04, 0.95),
        (0.04, 0.95),
        (-0.11, 0.82),
        (0.11, 0.82),
        (-0.14, 0.64),
        (0.14, 0.64),
        (-0.15, 0.48),
        (0.15, 0.48),
        (-0.07, 0.52),
        (0.07, 0.52),
        (-0.06, 0.28),
        (0.06, 0.28),
        (-0.05, 0.04),
        (0.05, 0.04),
    ]
)


@dataclass(frozen=True)
class NoiseParams:
    keypoint_px: float = 0.0
    miss_rate: float = 0.0
    descriptor_noise: float = 0.0


@dataclass(frozen=True)
class SyntheticScene:
    calibrations: Tuple[CameraCalibration, ...]
    aoi: AreaOfInterest
    positions: Tuple[Tuple[Tuple[float, float], ...], ...]  # per frame, per pedestrian
    frames: Tuple[FrameBundle, ...]
    ground_truth: Tuple[GroundTruthFrame, ...]
    noise: NoiseParams

    @property
    def calibration_map(self) -> Dict[int, CameraCalibration]:
        return {c.camera_id: c for c in self.calibrations}


def make_rig(n_cameras: int, aoi: AreaOfInterest, distance: float = 30.0, height: float = 10.0,
             focal: float = 1000.0) -> Tuple[CameraCalibration, ...]:
    """Cameras evenly spaced on a circle around the AOI center, all aimed at it."""
    cx = (aoi.x_min + aoi.x_max) / 2.0
    cy = (aoi.y_min + aoi.y_max) / 2.0
    K = np.array([[focal, 0.0, IMAGE_WIDTH / 2.0], [0.0, focal, IMAGE_HEIGHT / 2.0], [0.0, 0.0, 1.0]])
    rig = []
    for k in range(n_cameras):
        theta = 2.0 * math.pi * k / n_cameras + 0.3
        center = (cx + distance * math.cos(theta), cy + distance * math.sin(theta), height)
        rig.append(look_at_calibration(k + 1, center, (cx, cy, 0.0), K))
    return tuple(rig)


def _visible(calib: CameraCalibration, X: float, Y: float) -> bool:
    pts = np.array([[X, Y, 0.0], [X, Y, PERSON_HEIGHT]])
    img, depth = calib.project_world(pts)
    if np.any(depth <= 0):
        return False
    return bool(np.all((img[:, 0] >= 0) & (img[:, 0] < IMAGE_WIDTH) & (img[:, 1] >= 0) & (img[:, 1] < IMAGE_HEIGHT)))


def place_pedestrians(rng: np.random.Generator, n: int, aoi: AreaOfInterest, spacing: float,
                      rig, max_tries: int = 20000) -> List[Tuple[float, float]]:
    """Rejection-sample ``n`` positions with pairwise distance > ``spacing``,
    each seen by at least two cameras."""
    placed: List[Tuple[float, float]] = []
    tries = 0
    while len(placed) < n:
        tries += 1
        if tries > max_tries:
            raise PlacementFailure(f"could not place {n} pedestrians {spacing} m apart in {aoi.as_tuple()}")
        X = float(rng.uniform(aoi.x_min, aoi.x_max))
        Y = float(rng.uniform(aoi.y_min, aoi.y_max))
        if any(math.hypot(X - a, Y - b) <= spacing for a, b in placed):
            continue
        if sum(_visible(c, X, Y) for c in rig) < 2:
            continue
        placed.append((X, Y))
    return placed


def render_detection(rng: np.random.Generator, calib: CameraCalibration, X: float, Y: float,
                     detection_id: int, frame_id: int, noise_px: float,
                     descriptor: Optional[np.ndarray]) -> PoseDetection:
    """Render one pose whose ground point is the projection of (X, Y, 0)."""
    img, _ = calib.project_world(np.array([[X, Y, 0.0], [X, Y, PERSON_HEIGHT]]))
    (mx, my), (_, hy) = img
    h = my - hy
    w = 0.4 * h
    # ankles sit e_l, e_r pixels above the foot point; the box bottom takes the
    # half-gap so the ankle heuristic lands back on (mx, my)
    e_l, e_r = rng.uniform(0.01, 0.06, size=2) * h
    half_sep = rng.uniform(0.03, 0.07) * h
    y_max = my + abs(e_l - e_r) / 2.0
    kps = np.empty((NUM_KEYPOINTS, 3))
    kps[:, 0] = mx + _SKELETON[:, 0] * h
    kps[:, 1] = my - _SKELETON[:, 1] * h
    kps[:, 2] = rng.uniform(0.6, 1.0, size=NUM_KEYPOINTS)
    kps[LEFT_ANKLE, :2] = (mx - half_sep, my - e_l)
    kps[RIGHT_ANKLE, :2] = (mx + half_sep, my - e_r)
    jitter = rng.uniform(-1.0, 1.0, size=(2, 2)) * noise_px
    kps[[LEFT_ANKLE, RIGHT_ANKLE], :2] += jitter
    return PoseDetection(
        detection_id=detection_id,
        camera_id=calib.camera_id,
        frame_id=frame_id,
        bbox=(mx - w / 2.0, hy, mx + w / 2.0, y_max),
        keypoints=kps,
        descriptor=None if descriptor is None else tuple(float(v) for v in descriptor),
    )


def generate_synthetic_scene(
    seed: int,
    n_cameras: int = 7,
    n_pedestrians: int = 20,
    n_frames: int = 1,
    noise: NoiseParams = NoiseParams(),
    aoi: AreaOfInterest = AreaOfInterest(0.0, 0.0, 12.0, 36.0),
    spacing: float = 1.4,
    descriptor_dim: int = 0,
) -> SyntheticScene:
    """Generate a deterministic scene for ``seed``.

    Pedestrians are resampled independently every frame with pairwise spacing
    greater than ``spacing`` (2 * t_g by default). Every random draw happens
    regardless of the noise settings, so scenes with the same seed differ only
    in the noise-controlled aspects; in particular raising ``miss_rate`` only
    ever removes detections.
    """
    if n_cameras < 2:
        raise ValueError("need at least two cameras")
    if not 0.0 <= noise.miss_rate <= 1.0:
        raise ValueError("miss_rate must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    rig = make_rig(n_cameras, aoi)
    identities = None
    if descriptor_dim > 0:
        identities = rng.normal(size=(n_pedestrians, descriptor_dim))
        identities /= np.linalg.norm(identities, axis=1, keepdims=True)

    positions, frames, truth = [], [], []
    for frame_id in range(n_frames):
        placed = place_pedestrians(rng, n_pedestrians, aoi, spacing, rig)
        per_cam: Dict[int, Tuple[PoseDetection, ...]] = {}
        for calib in rig:
            dets = []
            for pid, (X, Y) in enumerate(placed):
                drop = rng.uniform() < noise.miss_rate
                desc = None
                if identities is not None:
                    desc = identities[pid] + noise.descriptor_noise * rng.normal(size=descriptor_dim)
                if not _visible(calib, X, Y):
                    continue
                det = render_detection(rng, calib, X, Y, len(dets), frame_id, noise.keypoint_px, desc)
                if not drop:
                    dets.append(det)
            per_cam[calib.camera_id] = tuple(dets)
        positions.append(tuple(placed))
        frames.append(FrameBundle(frame_id, per_cam))
        truth.append(GroundTruthFrame(frame_id, tuple((pid, X, Y) for pid, (X, Y) in enumerate(placed))))
    return SyntheticScene(tuple(rig), aoi, tuple(positions), tuple(frames), tuple(truth), noise)


def write_scene(scene: SyntheticScene, out_dir) -> Dict[str, Path]:
    """Write ``calibration.json``, ``detections.json`` and ``ground_truth.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "calibration": out / "calibration.json",
        "detections": out / "detections.json",
        "ground_truth": out / "ground_truth.json",
    }
    save_calibrations(paths["calibration"], scene.calibrations)
    save_detections(paths["detections"], scene.frames)
    save_ground_truth(paths["ground_truth"], scene.ground_truth)
    return paths
