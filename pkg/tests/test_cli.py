import json
import xml.etree.ElementTree as ET

import pytest

from pedfuse.cli import main


@pytest.fixture(scope="module")
def scene_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("scene")
    assert main(["synth", "--seed", "1", "--frames", "3", "--out-dir", str(out)]) == 0
    return out


def fuse_args(scene_dir, out, *extra):
    return ["fuse", "--calib", str(scene_dir / "calibration.json"), "--detections",
            str(scene_dir / "detections.json"), "--out", str(out), *extra]


def test_fuse_and_eval(scene_dir, tmp_path, capsys):
    out = tmp_path / "fused.json"
    assert main(fuse_args(scene_dir, out)) == 0
    payload = json.loads(out.read_text())
    assert [f["frame_id"] for f in payload["frames"]] == [0, 1, 2]
    det = payload["frames"][0]["detections"][0]
    assert set(det) == {"X", "Y", "contributing"}
    assert all(len(c) == 2 for c in det["contributing"])

    metrics = tmp_path / "metrics.json"
    assert main(["eval", "--detections", str(out), "--gt", str(scene_dir / "ground_truth.json"),
                 "--out", str(metrics)]) == 0
    report = json.loads(metrics.read_text())
    assert report["MODA"] == 1.0
    assert set(report) == {"TP", "FP", "FN", "GT", "MODA", "MODP", "precision", "recall", "f_score"}
    assert "MODA" in capsys.readouterr().out


def test_fuse_with_gt_and_options(scene_dir, tmp_path):
    metrics = tmp_path / "m.json"
    args = fuse_args(scene_dir, tmp_path / "f.json", "--gt", str(scene_dir / "ground_truth.json"),
                     "--metrics-out", str(metrics), "--groundpoint", "bbox", "--workers", "2",
                     "--aoi", "0,0,12,36", "--ts", "0.5", "--tg", "0.6")
    assert main(args) == 0
    assert json.loads(metrics.read_text())["GT"] == 60


def test_fuse_ah(scene_dir, tmp_path):
    assert main(fuse_args(scene_dir, tmp_path / "f.json", "--fusion", "ah", "--ah-resolution", "0.05")) == 0


def test_fuse_deterministic(scene_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(fuse_args(scene_dir, a)) == 0
    assert main(fuse_args(scene_dir, b, "--workers", "3")) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bad_calibration_exit_code(scene_dir, tmp_path):
    bad = tmp_path / "calib.json"
    bad.write_text(json.dumps([{"camera_id": 1, "K": [1, 0, 0, 0, 1, 0, 0, 0, 1],
                                "R": [1, 0, 0, 0, 1, 0, 0, 0, 1], "t": [1, 0, 0]}]))
    args = ["fuse", "--calib", str(bad), "--detections", str(scene_dir / "detections.json"),
            "--out", str(tmp_path / "o.json")]
    assert main(args) != 0


def test_schema_error_exit_code(scene_dir, tmp_path):
    bad = tmp_path / "d.json"
    bad.write_text('{"frames": [{"frame_id": 0}]}')
    args = ["fuse", "--calib", str(scene_dir / "calibration.json"), "--detections", str(bad),
            "--out", str(tmp_path / "o.json")]
    assert main(args) != 0


def test_plot(scene_dir, tmp_path):
    fused = tmp_path / "f.json"
    main(fuse_args(scene_dir, fused))
    svg = tmp_path / "p.svg"
    assert main(["plot", "--detections", str(fused), "--gt", str(scene_dir / "ground_truth.json"),
                 "--frame", "1", "--out", str(svg)]) == 0
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg")
    assert main(["plot", "--detections", str(fused), "--frame", "99", "--out", str(svg)]) != 0


def test_bad_aoi_flag(scene_dir, tmp_path):
    with pytest.raises(SystemExit):
        main(fuse_args(scene_dir, tmp_path / "f.json", "--aoi", "1,2"))


def test_visibility_polygons(scene_dir, tmp_path):
    vis = tmp_path / "vis.json"
    # camera 1 sees nothing inside this tiny corner polygon
    vis.write_text(json.dumps({"1": [[-1, -1], [-0.5, -1], [-0.5, -0.5]]}))
    metrics = tmp_path / "m.json"
    args = fuse_args(scene_dir, tmp_path / "f.json", "--visibility", str(vis), "--gt",
                     str(scene_dir / "ground_truth.json"), "--metrics-out", str(metrics))
    assert main(args) == 0
    fused = json.loads((tmp_path / "f.json").read_text())
    assert all(c[0] != 1 for f in fused["frames"] for d in f["detections"] for c in d["contributing"])
