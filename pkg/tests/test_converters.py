import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from pedfuse.converters import alphapose, wildtrack
from pedfuse.io import load_calibrations, load_detections, load_ground_truth


def ap_record(image_id, x=10.0):
    kps = []
    for k in range(17):
        kps += [x + k, 100.0 + k, 0.9]
    return {"image_id": image_id, "category_id": 1, "keypoints": kps, "score": 2.5, "box": [x, 20.0, 30.0, 120.0]}


def test_alphapose(tmp_path):
    cam1 = tmp_path / "c1.json"
    cam2 = tmp_path / "c2.json"
    cam1.write_text(json.dumps([ap_record("00000000.png"), ap_record("00000000.png", 50), ap_record("00000005.png")]))
    cam2.write_text(json.dumps([ap_record("00000005.png")]))
    out = tmp_path / "dets.json"
    alphapose.convert({1: str(cam1), 2: str(cam2)}, out)
    frames = load_detections(out)
    assert [f.frame_id for f in frames] == [0, 5]
    assert [d.detection_id for d in frames[0].detections[1]] == [0, 1]
    assert frames[0].detections[2] == ()
    assert frames[0].detections[1][0].bbox == (10.0, 20.0, 40.0, 140.0)
    assert frames[1].detections[1][0].keypoints[16].tolist() == [26.0, 116.0, 0.9]


def test_alphapose_bad_keypoints(tmp_path):
    rec = ap_record("1.png")
    rec["keypoints"] = rec["keypoints"][:-3]
    with pytest.raises(Exception):
        alphapose.convert_records([rec], 1)


def test_wildtrack_positions():
    assert wildtrack.position_to_world(0) == (-3.0, -9.0)
    X, Y = wildtrack.position_to_world(479 + 480 * 1439)
    assert X == pytest.approx(8.975) and Y == pytest.approx(26.975)
    assert wildtrack.AOI.as_tuple() == pytest.approx((-3, -9, 9, 27))


def test_wildtrack_annotations(tmp_path):
    d = tmp_path / "annotations_positions"
    d.mkdir()
    (d / "00000005.json").write_text(json.dumps([{"personID": 7, "positionID": 481, "views": []}]))
    (d / "00000000.json").write_text(json.dumps([]))
    wildtrack.convert_annotations(d, tmp_path / "gt.json")
    gt = load_ground_truth(tmp_path / "gt.json")
    assert [g.frame_id for g in gt] == [0, 5]
    pid, X, Y = gt[1].annotations[0]
    assert pid == 7 and X == pytest.approx(-2.975) and Y == pytest.approx(-8.975)


INTRINSIC = """<?xml version="1.0"?>
<opencv_storage>
<camera_matrix type_id="opencv-matrix">
  <rows>3</rows><cols>3</cols><dt>d</dt>
  <data>1700. 0. 960. 0. 1700. 540. 0. 0. 1.</data></camera_matrix>
<distortion_coefficients type_id="opencv-matrix">
  <rows>5</rows><cols>1</cols><dt>d</dt><data>0. 0. 0. 0. 0.</data></distortion_coefficients>
</opencv_storage>
"""

EXTRINSIC = """<?xml version="1.0"?>
<opencv_storage>
<rvec>{r}</rvec>
<tvec>{t}</tvec>
</opencv_storage>
"""


def test_wildtrack_calibration(tmp_path):
    rvec = np.array([1.7, 0.3, -0.2])
    tvec = np.array([-500.0, 120.0, 2000.0])  # centimeters
    (tmp_path / "i.xml").write_text(INTRINSIC)
    (tmp_path / "e.xml").write_text(EXTRINSIC.format(r=" ".join(map(str, rvec)), t=" ".join(map(str, tvec))))
    wildtrack.convert_calibration([tmp_path / "i.xml"], [tmp_path / "e.xml"], tmp_path / "c.json")
    calib = load_calibrations(tmp_path / "c.json")[1]
    np.testing.assert_allclose(calib.t, tvec / 100)
    np.testing.assert_allclose(calib.R, Rotation.from_rotvec(rvec).as_matrix(), atol=1e-12)
    assert calib.K[0, 0] == 1700.0
