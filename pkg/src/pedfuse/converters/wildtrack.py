"""WILDTRACK annotations and calibration -> pedfuse files.

Annotations live in ``annotations_positions/<frame>.json``, each a list of
``{"personID", "positionID", "views"}``. Positions index a 480 x 1440 grid of
2.5 cm cells whose origin is (-3.0 m, -9.0 m), so the area of interest in
world meters is ``-3,-9,9,27``.

Calibration comes from the OpenCV XML files shipped with the dataset
(``intrinsic_zero/*.xml`` and ``extrinsic/*.xml``); extrinsics are in
centimeters and are converted to meters.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from ..evaluation import GroundTruthFrame
from ..geometry import AreaOfInterest, CameraCalibration
from ..io import save_calibrations, save_ground_truth

GRID_WIDTH = 480
GRID_HEIGHT = 1440
CELL = 0.025
ORIGIN = (-3.0, -9.0)
AOI = AreaOfInterest(ORIGIN[0], ORIGIN[1], ORIGIN[0] + GRID_WIDTH * CELL, ORIGIN[1] + GRID_HEIGHT * CELL)


def position_to_world(position_id: int) -> Tuple[float, float]:
    """Grid position id -> (X, Y) in meters."""
    return (
        ORIGIN[0] + CELL * (position_id % GRID_WIDTH),
        ORIGIN[1] + CELL * (position_id // GRID_WIDTH),
    )


def convert_annotations(annotation_dir, out_path) -> List[GroundTruthFrame]:
    frames = []
    for path in sorted(Path(annotation_dir).glob("*.json")):
        with open(path, "r", encoding="utf-8") as fh:
            records = json.load(fh)
        anns = tuple((int(r["personID"]), *position_to_world(int(r["positionID"]))) for r in records)
        frames.append(GroundTruthFrame(int(path.stem), anns))
    frames.sort(key=lambda f: f.frame_id)
    save_ground_truth(out_path, frames)
    return frames


def _numbers(node) -> np.ndarray:
    text = node.find("data").text if node.find("data") is not None else node.text
    return np.array([float(v) for v in text.split()])


def read_camera(camera_id: int, intrinsic_xml, extrinsic_xml) -> CameraCalibration:
    K = _numbers(ET.parse(intrinsic_xml).getroot().find("camera_matrix")).reshape(3, 3)
    ext = ET.parse(extrinsic_xml).getroot()
    rvec = _numbers(ext.find("rvec"))
    tvec = _numbers(ext.find("tvec")) / 100.0
    R = Rotation.from_rotvec(rvec).as_matrix()
    return CameraCalibration(camera_id=camera_id, K=K, R=R, t=tvec)


def convert_calibration(intrinsic_xmls: Sequence[str], extrinsic_xmls: Sequence[str], out_path,
                        first_id: int = 1) -> List[CameraCalibration]:
    """Pair intrinsic and extrinsic files in order; cameras are numbered from ``first_id``."""
    if len(intrinsic_xmls) != len(extrinsic_xmls):
        raise ValueError("need one extrinsic file per intrinsic file")
    calibs = [
        read_camera(first_id + i, a, b)
        for i, (a, b) in enumerate(zip(intrinsic_xmls, extrinsic_xmls))
    ]
    save_calibrations(out_path, calibs)
    return calibs
