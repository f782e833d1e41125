"""AlphaPose ``alphapose-results.json`` -> pedfuse detection file.

AlphaPose writes one JSON array per camera. Each record carries ``image_id``
(the frame file name, e.g. ``00000005.png``), ``keypoints`` as a flat list of
17 (x, y, score) triples and ``box`` as ``[x, y, w, h]``. An optional
``descriptor`` array on a record is passed through unchanged.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Mapping

from ..errors import SchemaError
from ..groundpoint import NUM_KEYPOINTS, PoseDetection
from ..io import FrameBundle, save_detections


def frame_id_from_image(image_id) -> int:
    if isinstance(image_id, int):
        return image_id
    stem = Path(str(image_id)).stem
    digits = "".join(ch for ch in stem if ch.isdigit())
    if not digits:
        raise SchemaError(f"cannot derive a frame id from image_id {image_id!r}")
    return int(digits)


def convert_records(records: List[dict], camera_id: int) -> Dict[int, List[PoseDetection]]:
    """Group one camera's AlphaPose records by frame."""
    per_frame: Dict[int, List[PoseDetection]] = {}
    for rec in records:
        frame_id = frame_id_from_image(rec["image_id"])
        flat = [float(v) for v in rec["keypoints"]]
        if len(flat) != 3 * NUM_KEYPOINTS:
            raise SchemaError(f"camera {camera_id}: expected {3 * NUM_KEYPOINTS} keypoint values, got {len(flat)}")
        kps = [flat[i:i + 3] for i in range(0, len(flat), 3)]
        x, y, w, h = (float(v) for v in rec["box"])
        dets = per_frame.setdefault(frame_id, [])
        dets.append(
            PoseDetection(
                detection_id=len(dets),
                camera_id=camera_id,
                frame_id=frame_id,
                bbox=(x, y, x + w, y + h),
                keypoints=kps,
                descriptor=rec.get("descriptor"),
            )
        )
    return per_frame


def convert(inputs: Mapping[int, str], out_path) -> List[FrameBundle]:
    """Merge per-camera AlphaPose files (``{camera_id: path}``) into one detection file."""
    by_frame: Dict[int, Dict[int, tuple]] = {}
    for cam in sorted(inputs):
        with open(inputs[cam], "r", encoding="utf-8") as fh:
            records = json.load(fh)
        for frame_id, dets in convert_records(records, cam).items():
            by_frame.setdefault(frame_id, {})[cam] = tuple(dets)
    frames = []
    for frame_id in sorted(by_frame):
        per_cam = {cam: by_frame[frame_id].get(cam, ()) for cam in sorted(inputs)}
        frames.append(FrameBundle(frame_id, per_cam))
    save_detections(out_path, frames)
    return frames
