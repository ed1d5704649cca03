"""Smoke tests for the wintrack Python bindings.

Runnable two ways:
  python3 tests/python/test_smoke.py      (plain asserts, prints a summary)
  pytest tests/python/test_smoke.py       (each test_* collected normally)

The compiled ``_core`` module must be importable, either through an installed
wheel or via PYTHONPATH pointing at the build tree (ctest sets this up).
"""

import json
import math

import wintrack


def _detection(frame, timestamp, label, x, y, conf=0.8):
    return {
        "frame_index": frame,
        "timestamp": timestamp,
        "class": label,
        "x": x,
        "y": y,
        "z": 0.0,
        "yaw": 0.0,
        "l": 4.0,
        "w": 2.0,
        "h": 1.5,
        "confidence": conf,
    }


def _tiny_scenario():
    return json.dumps(
        {
            "seed": 5,
            "duration_frames": 10,
            "frame_rate_hz": 2.0,
            "class_counts": {"car": 3},
            "position_noise_sigma_m": 0.1,
            "region_min": [0.0, 0.0, 0.0],
            "region_max": [120.0, 120.0, 1.0],
        }
    )


def test_normalize_yaw():
    assert abs(wintrack.normalize_yaw(3.0 * math.pi) - math.pi) < 1e-12
    assert abs(wintrack.normalize_yaw(-math.pi) - math.pi) < 1e-12
    assert abs(wintrack.normalize_yaw(0.25) - 0.25) < 1e-12


def test_dense_counts():
    assert wintrack.dense_counts([2, 2]) == (4, 4, 4)
    assert wintrack.dense_counts([2, 2, 2]) == (6, 12, 20)


def test_skip_increment():
    assert abs(wintrack.skip_increment(0.9, 0.1) - math.log(1.0 / 9.0)) < 1e-12


def test_score_to_probability():
    assert abs(wintrack.score_to_probability(0.0) - 0.5) < 1e-12
    assert abs(wintrack.score_to_probability(2.0) - 0.8807970779778823) < 1e-12


def test_default_config_roundtrip():
    config = json.loads(wintrack.default_config_json())
    assert config["window_length_frames"] == 4
    assert config["max_hypotheses_per_root"] == 200
    assert config["detect_prob"] == 0.9


def test_preset_scenario():
    spec = json.loads(wintrack.preset_occlusion_json())
    assert spec["class_counts"] == {"pedestrian": 5}
    assert len(spec["occlusions"]) == 5


def test_simulate_deterministic():
    scene_a = wintrack.simulate(_tiny_scenario(), "s0")
    scene_b = wintrack.simulate(_tiny_scenario(), "s0")
    assert scene_a["detections"] == scene_b["detections"]
    assert scene_a["ground_truth"] == scene_b["ground_truth"]
    detections = json.loads(scene_a["detections"])
    ground_truth = json.loads(scene_a["ground_truth"])
    assert len(ground_truth) == 3 * 10
    assert len(detections) >= 25  # 30 emissions, no dropout configured
    assert {d["class"] for d in detections} == {"car"}


def test_tracker_step():
    tracker = wintrack.Tracker(wintrack.default_config_json())
    # Two well-separated constant-velocity objects; second frame confirms.
    for frame in range(4):
        t = 0.5 * (frame + 1)
        dets = [
            _detection(frame, t, "car", 10.0 + 2.0 * frame, 10.0),
            _detection(frame, t, "pedestrian", 60.0, 60.0 + 0.5 * frame),
        ]
        outputs = json.loads(tracker.step(frame, t, json.dumps(dets)))
    assert len(outputs) == 2
    labels = sorted(o["class"] for o in outputs)
    assert labels == ["car", "pedestrian"]
    for out in outputs:
        assert 0.0 < out["score"] < 1.0
        assert out["coasted"] is False

    # Frames must advance: stepping the same index again raises.
    try:
        tracker.step(3, 2.0, json.dumps([]))
    except wintrack.TrackerError:
        pass
    else:
        raise AssertionError("expected TrackerError for a repeated frame index")


def test_track_and_evaluate():
    scene = wintrack.simulate(_tiny_scenario(), "s0")
    detections = json.loads(scene["detections"])
    frames = {}
    for det in detections:
        frames.setdefault(det["frame_index"], []).append(det)

    tracker = wintrack.Tracker(wintrack.default_config_json())
    tracks = []
    for frame in sorted(frames):
        batch = frames[frame]
        outputs = tracker.step(frame, batch[0]["timestamp"], json.dumps(batch))
        tracks.extend(json.loads(outputs))

    report = json.loads(
        wintrack.evaluate(json.dumps(tracks), scene["ground_truth"])
    )
    assert report["gt"] == 30
    assert report["matches"] >= 24  # first frame is tentative-only
    assert report["ids"] == 0
    assert 0.0 <= report["amota"] <= 1.0
    assert report["mota"] >= 0.8


def test_solve_assignment():
    problem = {
        "num_rows": 4,
        "columns": [
            {"cost": 3.0, "rows": [0, 1]},
            {"cost": 2.5, "rows": [1, 2]},
            {"cost": 4.0, "rows": [2, 3]},
        ],
    }
    solution = json.loads(wintrack.solve_assignment(json.dumps(problem)))
    assert solution["selected"] == [0, 2]
    assert abs(solution["objective"] - 7.0) < 1e-9
    assert solution["relaxation_was_integral"] is True


def main():
    tests = [
        (name, fn)
        for name, fn in sorted(globals().items())
        if name.startswith("test_") and callable(fn)
    ]
    for name, fn in tests:
        fn()
        print(f"ok {name}")
    print(f"{len(tests)} smoke tests passed")


if __name__ == "__main__":
    main()
