"""JSON readers and writers for calibration, detection, ground-truth and output files.

All formats are documented in ``docs/formats.md``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from .errors import CalibrationError, SchemaError
from .evaluation import GroundTruthFrame, MetricsReport
from .fusion import FusedDetection
from .geometry import CameraCalibration, compute_homography
from .groundpoint import NUM_KEYPOINTS, PoseDetection

PathLike = Union[str, Path]


@dataclass(frozen=True)
class FrameBundle:
    """All detections of one synchronized frame, keyed by camera id."""

    frame_id: int
    detections: Dict[int, Tuple[PoseDetection, ...]]


def _read(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def _write(path: PathLike, payload: Any) -> None:
    text = json.dumps(payload, indent=1, sort_keys=False, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _numbers(value, count: int, what: str) -> List[float]:
    if not isinstance(value, list) or len(value) != count:
        raise SchemaError(f"{what}: expected a list of {count} numbers")
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: non-numeric entry") from exc
    if not all(math.isfinite(v) for v in out):
        raise SchemaError(f"{what}: non-finite entry")
    return out


def _require(record: dict, key: str, what: str):
    if not isinstance(record, dict) or key not in record:
        raise SchemaError(f"{what}: missing field {key!r}")
    return record[key]


# -- calibration -------------------------------------------------------------


def parse_calibrations(payload: Any) -> Dict[int, CameraCalibration]:
    if not isinstance(payload, list):
        raise SchemaError("calibration file must hold a JSON array of camera records")
    out: Dict[int, CameraCalibration] = {}
    for i, rec in enumerate(payload):
        what = f"calibration[{i}]"
        cam_id = int(_require(rec, "camera_id", what))
        if cam_id in out:
            raise SchemaError(f"{what}: duplicate camera_id {cam_id}")
        dist = rec.get("distortion")
        if dist is not None and any(float(d) != 0.0 for d in dist):
            raise CalibrationError(f"camera {cam_id}: nonzero lens distortion is not supported")
        calib = CameraCalibration(
            camera_id=cam_id,
            K=_numbers(_require(rec, "K", what), 9, f"{what}.K"),
            R=_numbers(_require(rec, "R", what), 9, f"{what}.R"),
            t=_numbers(_require(rec, "t", what), 3, f"{what}.t"),
        )
        compute_homography(calib)  # reject singular rigs at load time
        out[cam_id] = calib
    return out


def load_calibrations(path: PathLike) -> Dict[int, CameraCalibration]:
    return parse_calibrations(_read(path))


def calibrations_to_json(calibrations: Sequence[CameraCalibration]) -> List[dict]:
    return [
        {
            "camera_id": c.camera_id,
            "K": [float(v) for v in c.K.ravel()],
            "R": [float(v) for v in c.R.ravel()],
            "t": [float(v) for v in c.t],
        }
        for c in calibrations
    ]


def save_calibrations(path: PathLike, calibrations: Sequence[CameraCalibration]) -> None:
    _write(path, calibrations_to_json(calibrations))


# -- detections --------------------------------------------------------------


def _parse_detection(rec: dict, camera_id: int, frame_id: int, what: str) -> PoseDetection:
    kps = _require(rec, "keypoints", what)
    if not isinstance(kps, list) or len(kps) != NUM_KEYPOINTS:
        raise SchemaError(f"{what}: expected {NUM_KEYPOINTS} keypoints")
    keypoints = [_numbers(k, 3, f"{what}.keypoints[{j}]") for j, k in enumerate(kps)]
    desc = rec.get("descriptor")
    if desc is not None:
        desc = _numbers(desc, len(desc) if isinstance(desc, list) else -1, f"{what}.descriptor")
    try:
        return PoseDetection(
            detection_id=int(_require(rec, "detection_id", what)),
            camera_id=camera_id,
            frame_id=frame_id,
            bbox=tuple(_numbers(_require(rec, "bbox", what), 4, f"{what}.bbox")),
            keypoints=keypoints,
            descriptor=desc,
        )
    except ValueError as exc:
        raise SchemaError(f"{what}: {exc}") from exc


def parse_detections(payload: Any) -> List[FrameBundle]:
    frames = _require(payload, "frames", "detections")
    if not isinstance(frames, list):
        raise SchemaError("detections.frames must be an array")
    out = []
    last = None
    for fi, frame in enumerate(frames):
        what = f"frames[{fi}]"
        frame_id = int(_require(frame, "frame_id", what))
        if last is not None and frame_id <= last:
            raise SchemaError(f"{what}: frame ids must increase (got {frame_id} after {last})")
        last = frame_id
        per_cam: Dict[int, Tuple[PoseDetection, ...]] = {}
        for ci, cam in enumerate(_require(frame, "cameras", what)):
            cwhat = f"{what}.cameras[{ci}]"
            cam_id = int(_require(cam, "camera_id", cwhat))
            if cam_id in per_cam:
                raise SchemaError(f"{cwhat}: camera {cam_id} listed twice")
            dets = _require(cam, "detections", cwhat)
            per_cam[cam_id] = tuple(
                _parse_detection(d, cam_id, frame_id, f"{cwhat}.detections[{di}]") for di, d in enumerate(dets)
            )
        out.append(FrameBundle(frame_id=frame_id, detections=per_cam))
    return out


def load_detections(path: PathLike) -> List[FrameBundle]:
    return parse_detections(_read(path))


def detection_to_json(det: PoseDetection) -> dict:
    rec = {
        "detection_id": det.detection_id,
        "bbox": [float(v) for v in det.bbox],
        "keypoints": [[float(v) for v in row] for row in det.keypoints],
    }
    if det.descriptor is not None:
        rec["descriptor"] = [float(v) for v in det.descriptor]
    return rec


def save_detections(path: PathLike, frames: Sequence[FrameBundle]) -> None:
    payload = {
        "frames": [
            {
                "frame_id": f.frame_id,
                "cameras": [
                    {"camera_id": cam, "detections": [detection_to_json(d) for d in f.detections[cam]]}
                    for cam in sorted(f.detections)
                ],
            }
            for f in frames
        ]
    }
    _write(path, payload)


# -- ground truth ------------------------------------------------------------


def parse_ground_truth(payload: Any) -> List[GroundTruthFrame]:
    frames = _require(payload, "frames", "ground truth")
    out = []
    for fi, frame in enumerate(frames):
        what = f"frames[{fi}]"
        anns = []
        for ai, a in enumerate(_require(frame, "annotations", what)):
            awhat = f"{what}.annotations[{ai}]"
            X, Y = _numbers([_require(a, "X", awhat), _require(a, "Y", awhat)], 2, awhat)
            anns.append((int(_require(a, "person_id", awhat)), X, Y))
        try:
            out.append(GroundTruthFrame(int(_require(frame, "frame_id", what)), tuple(anns)))
        except ValueError as exc:
            raise SchemaError(f"{what}: {exc}") from exc
    return out


def load_ground_truth(path: PathLike) -> List[GroundTruthFrame]:
    return parse_ground_truth(_read(path))


def save_ground_truth(path: PathLike, frames: Sequence[GroundTruthFrame]) -> None:
    payload = {
        "frames": [
            {
                "frame_id": f.frame_id,
                "annotations": [{"person_id": pid, "X": X, "Y": Y} for pid, X, Y in f.annotations],
            }
            for f in frames
        ]
    }
    _write(path, payload)


# -- outputs -----------------------------------------------------------------


def fused_to_json(det: FusedDetection) -> dict:
    return {"X": det.X, "Y": det.Y, "contributing": [list(c) for c in det.contributing]}


def save_fused(path: PathLike, results) -> None:
    """Write per-frame fused detections (``results`` from ``run_pipeline``)."""
    payload = {
        "frames": [
            {
                "frame_id": r.frame_id,
                "detections": [fused_to_json(d) for d in r.detections],
                "errors": list(r.errors),
            }
            for r in results
        ]
    }
    _write(path, payload)


def load_fused(path: PathLike) -> Dict[int, List[FusedDetection]]:
    payload = _read(path)
    out = {}
    for fi, frame in enumerate(_require(payload, "frames", "fused detections")):
        what = f"frames[{fi}]"
        dets = []
        for d in _require(frame, "detections", what):
            contributing = tuple(tuple(int(v) for v in c) for c in d.get("contributing", []))
            dets.append(FusedDetection(float(d["X"]), float(d["Y"]), len(contributing), contributing))
        out[int(_require(frame, "frame_id", what))] = dets
    return out


def save_metrics(path: PathLike, report: MetricsReport) -> None:
    _write(path, report.to_dict())


def load_metrics(path: PathLike) -> MetricsReport:
    return MetricsReport(**_read(path))


def save_json(path: PathLike, payload: Any) -> None:
    _write(path, payload)


def load_json(path: PathLike) -> Any:
    return _read(path)
