"""Camera calibration, ground-plane homographies and area-of-interest filtering.

The world ground plane is Z = 0. For a camera with intrinsics K and extrinsics
[R|t], a world ground point (X, Y, 0) projects to the image as

    s * (x, y, 1)^T = K [r1 r2 t] (X, Y, 1)^T

where r1, r2 are the first two columns of R. The image-to-ground homography is
therefore H = (K [r1 r2 t])^-1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import CalibrationError, PointAtInfinity, SingularCalibration

logger = logging.getLogger(__name__)

ORTHONORMAL_TOL = 1e-6
SINGULAR_TOL = 1e-12
HORIZON_TOL = 1e-9


@dataclass(frozen=True)
class CameraCalibration:
    """Pinhole calibration of one camera (frames assumed undistorted).

    Attributes:
        camera_id: Identifier used by detection files.
        K: 3x3 intrinsic matrix in pixels.
        R: 3x3 world-to-camera rotation.
        t: world-to-camera translation in meters.
    """

    camera_id: int
    K: np.ndarray
    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        K = np.array(self.K, dtype=float).reshape(3, 3)
        R = np.array(self.R, dtype=float).reshape(3, 3)
        t = np.array(self.t, dtype=float).reshape(3)
        for name, arr in (("K", K), ("R", R), ("t", t)):
            if not np.all(np.isfinite(arr)):
                raise CalibrationError(f"camera {self.camera_id}: {name} has non-finite entries")
        if not np.allclose(R @ R.T, np.eye(3), atol=ORTHONORMAL_TOL, rtol=0):
            raise CalibrationError(f"camera {self.camera_id}: R is not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > ORTHONORMAL_TOL:
            raise CalibrationError(f"camera {self.camera_id}: det(R) != 1")
        if np.any(np.tril(K, -1) != 0) or np.any(np.diag(K) <= 0):
            raise CalibrationError(
                f"camera {self.camera_id}: K must be upper triangular with positive diagonal"
            )
        for arr in (K, R, t):
            arr.setflags(write=False)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)

    @property
    def ground_projection(self) -> np.ndarray:
        """The 3x3 matrix K [r1 r2 t] mapping ground (X, Y, 1) to image."""
        return self.K @ np.column_stack([self.R[:, 0], self.R[:, 1], self.t])

    @property
    def center(self) -> np.ndarray:
        """Camera optical center in world coordinates."""
        return -self.R.T @ self.t

    def project_world(self, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Project 3D world points (N, 3) to pixels; also returns camera depths."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cam = pts @ self.R.T + self.t
        img = cam @ self.K.T
        return img[:, :2] / img[:, 2:3], cam[:, 2]


@dataclass(frozen=True)
class GroundHomography:
    """Image-to-ground homography of one camera.

    ``H`` maps homogeneous image coordinates to homogeneous world ground-plane
    coordinates; ``H_inv`` (= K [r1 r2 t]) goes the other way.
    """

    camera_id: int
    H: np.ndarray
    H_inv: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class ImagePoint:
    x: float
    y: float


@dataclass(frozen=True)
class WorldGroundPoint:
    """A ground point on the world Z=0 plane, tagged with its provenance."""

    X: float
    Y: float
    camera_id: int
    detection_id: int
    descriptor: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class AreaOfInterest:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate area of interest: {self}")

    @classmethod
    def parse(cls, text: str) -> "AreaOfInterest":
        """Parse ``"x0,y0,x1,y1"``."""
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 4 comma-separated numbers, got {text!r}")
        return cls(*parts)

    def contains(self, X: float, Y: float) -> bool:
        return self.x_min <= X <= self.x_max and self.y_min <= Y <= self.y_max

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


def _relative_det(A: np.ndarray) -> float:
    # |det| normalised by the Hadamard bound (product of column norms), in [0, 1]
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        return 0.0
    return abs(np.linalg.det(A)) / float(np.prod(norms))


def compute_homography(calib: CameraCalibration) -> GroundHomography:
    """Return the image-to-ground homography ``(K [r1 r2 t])^-1``.

    Raises:
        SingularCalibration: if K [r1 r2 t] is numerically singular, e.g. when
            the camera center lies on the ground plane.
    """
    A = calib.ground_projection
    if _relative_det(A) < SINGULAR_TOL:
        raise SingularCalibration(f"camera {calib.camera_id}: K[r1 r2 t] is singular")
    H = np.linalg.inv(A)
    H.setflags(write=False)
    A.setflags(write=False)
    return GroundHomography(camera_id=calib.camera_id, H=H, H_inv=A)


def _apply(M: np.ndarray, x: float, y: float) -> Tuple[float, float]:
    v = M @ np.array([x, y, 1.0])
    w = v[2]
    if abs(w) < HORIZON_TOL * np.linalg.norm(v):
        raise PointAtInfinity(f"point ({x}, {y}) maps to infinity")
    return float(v[0] / w), float(v[1] / w)


def project_to_ground(homography: GroundHomography, p: ImagePoint) -> Tuple[float, float]:
    """Map an image point to world ground-plane coordinates (X, Y) in meters."""
    if not (np.isfinite(p.x) and np.isfinite(p.y)):
        raise ValueError(f"non-finite image point {p}")
    return _apply(homography.H, p.x, p.y)


def project_to_image(homography: GroundHomography, X: float, Y: float) -> ImagePoint:
    """Map a world ground point back to pixels (inverse of :func:`project_to_ground`)."""
    return ImagePoint(*_apply(homography.H_inv, X, Y))


def filter_aoi(points: Iterable[WorldGroundPoint], aoi: AreaOfInterest) -> List[WorldGroundPoint]:
    """Keep points inside the closed AOI rectangle, preserving order."""
    return [p for p in points if aoi.contains(p.X, p.Y)]


def point_in_polygon(X: float, Y: float, polygon: Sequence[Tuple[float, float]]) -> bool:
    """Even-odd rule; points on an edge count as inside."""
    inside = False
    n = len(polygon)
    for i in range(n):
        (x1, y1), (x2, y2) = polygon[i], polygon[(i + 1) % n]
        cross = (x2 - x1) * (Y - y1) - (y2 - y1) * (X - x1)
        if cross == 0 and min(x1, x2) <= X <= max(x1, x2) and min(y1, y2) <= Y <= max(y1, y2):
            return True
        if (y1 > Y) != (y2 > Y):
            x_at = x1 + (Y - y1) * (x2 - x1) / (y2 - y1)
            if X < x_at:
                inside = not inside
    return inside


def filter_visibility(
    points: Iterable[WorldGroundPoint], polygons: Mapping[int, Sequence[Tuple[float, float]]]
) -> List[WorldGroundPoint]:
    """Drop points outside their camera's ground-plane visibility polygon.

    Cameras without a polygon keep all their points.
    """
    return [
        p for p in points if p.camera_id not in polygons or point_in_polygon(p.X, p.Y, polygons[p.camera_id])
    ]


def look_at_calibration(
    camera_id: int,
    center: Sequence[float],
    target: Sequence[float],
    K: np.ndarray,
) -> CameraCalibration:
    """Build a calibration for a camera at ``center`` looking at ``target``.

    The image y axis points "down" relative to world +Z, matching the usual
    pixel convention.
    """
    c = np.asarray(center, dtype=float)
    forward = np.asarray(target, dtype=float) - c
    forward /= np.linalg.norm(forward)
    up = np.array([0.0, 0.0, 1.0])
    right = np.cross(forward, up)
    if np.linalg.norm(right) < 1e-9:
        right = np.array([1.0, 0.0, 0.0])
    right /= np.linalg.norm(right)
    down = np.cross(forward, right)
    R = np.vstack([right, down, forward])
    return CameraCalibration(camera_id=camera_id, K=K, R=R, t=-R @ c)
