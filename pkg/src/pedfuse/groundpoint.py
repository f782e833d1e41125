"""Ground-point estimation from monocular pose detections.

Detections follow the MSCOCO 17-keypoint layout. Only the ankles are used:
the ankle midpoint is pushed down by the gap between the lower ankle and the
bottom of the full-body box.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .geometry import ImagePoint

NUM_KEYPOINTS = 17
LEFT_ANKLE = 15
RIGHT_ANKLE = 16

COCO_KEYPOINT_NAMES = (
    "nose",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)


@dataclass(frozen=True)
class PoseDetection:
    """One person detected in one camera frame.

    ``keypoints`` is a (17, 3) array of (x, y, score) rows in MSCOCO order.
    """

    detection_id: int
    camera_id: int
    frame_id: int
    bbox: Tuple[float, float, float, float]
    keypoints: np.ndarray
    descriptor: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        x0, y0, x1, y1 = (float(v) for v in self.bbox)
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"detection {self.detection_id}: degenerate bbox {self.bbox}")
        kp = np.array(self.keypoints, dtype=float)
        if kp.shape != (NUM_KEYPOINTS, 3):
            raise ValueError(
                f"detection {self.detection_id}: expected {NUM_KEYPOINTS}x3 keypoints, got {kp.shape}"
            )
        if np.any(kp[:, 2] < 0) or np.any(kp[:, 2] > 1):
            raise ValueError(f"detection {self.detection_id}: keypoint scores outside [0, 1]")
        kp.setflags(write=False)
        object.__setattr__(self, "bbox", (x0, y0, x1, y1))
        object.__setattr__(self, "keypoints", kp)
        if self.descriptor is not None:
            object.__setattr__(self, "descriptor", tuple(float(v) for v in self.descriptor))


@dataclass(frozen=True)
class GroundPointEstimate:
    point: ImagePoint
    detection_id: int
    camera_id: int
    frame_id: int


def estimate_ground_point(det: PoseDetection, t_s: float) -> Optional[GroundPointEstimate]:
    """Estimate the image ground point from the ankles and the box bottom.

    Returns None unless both ankle scores are strictly greater than ``t_s``.
    """
    la = det.keypoints[LEFT_ANKLE]
    ra = det.keypoints[RIGHT_ANKLE]
    if min(la[2], ra[2]) <= t_s:
        return None
    x = (la[0] + ra[0]) / 2.0
    # midpoint + (y_max - max ankle y), folded so the result is exact in floats
    y = det.bbox[3] - abs(la[1] - ra[1]) / 2.0
    return GroundPointEstimate(
        point=ImagePoint(float(x), float(y)),
        detection_id=det.detection_id,
        camera_id=det.camera_id,
        frame_id=det.frame_id,
    )


def estimate_ground_point_bbox(det: PoseDetection) -> GroundPointEstimate:
    """Bottom-center of the bounding box (ablation baseline)."""
    x0, _, x1, y1 = det.bbox
    return GroundPointEstimate(
        point=ImagePoint((x0 + x1) / 2.0, y1),
        detection_id=det.detection_id,
        camera_id=det.camera_id,
        frame_id=det.frame_id,
    )
