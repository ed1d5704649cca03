"""Sliding-window 3D multi-object tracker (Python bindings).

The heavy lifting lives in the compiled ``_core`` module; this package just
re-exports it. Installed wheels place ``_core`` inside the package, while
in-tree builds put it on ``sys.path`` directly -- both layouts are supported.
"""

try:
    from . import _core
except ImportError:  # in-tree build: _core sits next to the build dir
    import _core  # type: ignore[no-redef]

Tracker = _core.Tracker
TrackerError = _core.TrackerError
normalize_yaw = _core.normalize_yaw
dense_counts = _core.dense_counts
skip_increment = _core.skip_increment
score_to_probability = _core.score_to_probability
default_config_json = _core.default_config_json
preset_occlusion_json = _core.preset_occlusion_json
simulate = _core.simulate
evaluate = _core.evaluate
solve_assignment = _core.solve_assignment

__all__ = [
    "Tracker",
    "TrackerError",
    "normalize_yaw",
    "dense_counts",
    "skip_increment",
    "score_to_probability",
    "default_config_json",
    "preset_occlusion_json",
    "simulate",
    "evaluate",
    "solve_assignment",
]
