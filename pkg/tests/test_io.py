import json

import numpy as np
import pytest

from pedfuse.errors import CalibrationError, SchemaError, SingularCalibration
from pedfuse.io import (
    load_calibrations,
    load_detections,
    load_ground_truth,
    save_calibrations,
    save_detections,
    save_ground_truth,
)

CAM = {"camera_id": 1, "K": [1000, 0, 960, 0, 1000, 540, 0, 0, 1], "R": [1, 0, 0, 0, 1, 0, 0, 0, 1], "t": [0, 0, 5]}


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return p


def det_record(did=0, desc=None):
    rec = {"detection_id": did, "bbox": [0, 0, 10, 20], "keypoints": [[1, 2, 0.5]] * 17}
    if desc is not None:
        rec["descriptor"] = desc
    return rec


def test_calibration_round_trip(tmp_path):
    calibs = load_calibrations(write(tmp_path, "c.json", [CAM]))
    assert list(calibs) == [1]
    np.testing.assert_array_equal(calibs[1].t, [0, 0, 5])
    save_calibrations(tmp_path / "c2.json", list(calibs.values()))
    again = load_calibrations(tmp_path / "c2.json")
    np.testing.assert_array_equal(again[1].K, calibs[1].K)


@pytest.mark.parametrize(
    "payload, exc",
    [
        ({"cameras": []}, SchemaError),
        ([{**CAM, "K": [1, 2, 3]}], SchemaError),
        ([{k: v for k, v in CAM.items() if k != "t"}], SchemaError),
        ([CAM, CAM], SchemaError),
        ([{**CAM, "distortion": [0.1, 0, 0, 0, 0]}], CalibrationError),
        ([{**CAM, "t": [1, 0, 0]}], SingularCalibration),
        ([{**CAM, "R": [2, 0, 0, 0, 1, 0, 0, 0, 1]}], CalibrationError),
    ],
)
def test_calibration_rejections(tmp_path, payload, exc):
    with pytest.raises(exc):
        load_calibrations(write(tmp_path, "c.json", payload))


def test_zero_distortion_accepted(tmp_path):
    assert load_calibrations(write(tmp_path, "c.json", [{**CAM, "distortion": [0, 0, 0, 0, 0]}]))


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_calibrations(p)


def test_detections_round_trip(tmp_path):
    payload = {
        "frames": [
            {"frame_id": 0, "cameras": [{"camera_id": 1, "detections": [det_record(0, [1.0, 0.0])]}]},
            {"frame_id": 5, "cameras": [{"camera_id": 1, "detections": []}, {"camera_id": 2, "detections": [det_record(3)]}]},
        ]
    }
    frames = load_detections(write(tmp_path, "d.json", payload))
    assert [f.frame_id for f in frames] == [0, 5]
    assert frames[0].detections[1][0].descriptor == (1.0, 0.0)
    assert frames[1].detections[2][0].detection_id == 3
    save_detections(tmp_path / "d2.json", frames)
    assert json.loads((tmp_path / "d2.json").read_text()) == payload


@pytest.mark.parametrize(
    "payload",
    [
        {"frames": [{"frame_id": 1, "cameras": []}, {"frame_id": 1, "cameras": []}]},
        {"frames": [{"frame_id": 0, "cameras": [{"camera_id": 1, "detections": [{**det_record(), "keypoints": [[0, 0, 1]] * 16}]}]}]},
        {"frames": [{"frame_id": 0, "cameras": [{"camera_id": 1, "detections": [{**det_record(), "bbox": [5, 0, 5, 3]}]}]}]},
        {"frames": [{"frame_id": 0, "cameras": [{"camera_id": 1, "detections": [{**det_record(), "keypoints": [[0, 0, 2]] * 17}]}]}]},
        {"frames": [{"frame_id": 0}]},
        [],
    ],
)
def test_detection_schema_errors(tmp_path, payload):
    with pytest.raises(SchemaError):
        load_detections(write(tmp_path, "d.json", payload))


def test_ground_truth_round_trip(tmp_path):
    payload = {"frames": [{"frame_id": 0, "annotations": [{"person_id": 3, "X": 1.5, "Y": 2.0}]}]}
    gt = load_ground_truth(write(tmp_path, "g.json", payload))
    assert gt[0].annotations == ((3, 1.5, 2.0),)
    save_ground_truth(tmp_path / "g2.json", gt)
    assert json.loads((tmp_path / "g2.json").read_text()) == payload


def test_ground_truth_duplicate_ids(tmp_path):
    payload = {"frames": [{"frame_id": 0, "annotations": [{"person_id": 3, "X": 1, "Y": 2}, {"person_id": 3, "X": 0, "Y": 0}]}]}
    with pytest.raises(SchemaError):
        load_ground_truth(write(tmp_path, "g.json", payload))
