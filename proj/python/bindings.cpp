#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

#include "wintrack/assignment.hpp"
#include "wintrack/assoc_graph.hpp"
#include "wintrack/cli_commands.hpp"
#include "wintrack/errors.hpp"
#include "wintrack/io.hpp"
#include "wintrack/metrics.hpp"
#include "wintrack/scenario.hpp"
#include "wintrack/scoring.hpp"
#include "wintrack/tracker.hpp"
#include "wintrack/types.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// The bindings speak JSON strings using the same record schemas as the files,
// so Python callers need no mirrored struct definitions.

json parse_doc(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw wintrack::IoFormatError(std::string(what) + ": " + e.what(), 0);
    }
}

/// step() wrapper holding the tracker plus its config.
class PyTracker {
public:
    explicit PyTracker(const std::string& config_json) {
        wintrack::TrackerConfig config =
            wintrack::config_from_json(parse_doc(config_json, "config"));
        impl_ = std::make_unique<wintrack::SlidingWindowTracker>(config);
    }

    /// detections_json: JSON array of detection records (scene_id optional).
    /// Returns a JSON array string of track records for this frame.
    std::string step(int frame_index, double timestamp, const std::string& detections_json) {
        const json arr = parse_doc(detections_json, "detections");
        if (!arr.is_array()) {
            throw wintrack::IoFormatError("detections must be a JSON array", 0);
        }
        std::vector<wintrack::Detection> detections;
        std::string scene_id = "py";
        bool scene_seen = false;
        for (const json& entry : arr) {
            json obj = entry;
            if (obj.contains("scene_id")) {
                // Output records inherit the scene of the incoming detections
                // so simulate -> Tracker -> evaluate composes without edits.
                if (!scene_seen) scene_id = obj["scene_id"].get<std::string>();
                scene_seen = true;
            } else {
                obj["scene_id"] = scene_id;
            }
            detections.push_back(wintrack::detection_record_from_json(obj, 0).det);
        }
        const std::vector<wintrack::TrackOutput> outputs =
            impl_->step(frame_index, timestamp, std::move(detections));
        json out = json::array();
        for (const wintrack::TrackOutput& o : outputs) {
            wintrack::TrackRecord rec;
            rec.scene_id = scene_id;
            rec.frame_index = frame_index;
            rec.timestamp = timestamp;
            rec.track_id = o.track_id;
            rec.class_label = o.class_label;
            rec.position = o.position;
            rec.yaw = o.yaw;
            rec.size = o.size;
            rec.velocity = o.velocity;
            rec.score = o.score;
            rec.coasted = o.coasted;
            out.push_back(wintrack::track_record_to_json(rec));
        }
        return out.dump();
    }

private:
    std::unique_ptr<wintrack::SlidingWindowTracker> impl_;
};

std::string default_config_json() {
    return wintrack::config_to_json(wintrack::TrackerConfig()).dump(2);
}

std::string preset_occlusion_json() {
    return wintrack::scenario_to_json(wintrack::preset_occlusion_benchmark()).dump(2);
}

py::dict simulate(const std::string& scenario_json, const std::string& scene_id) {
    const wintrack::ScenarioSpec spec =
        wintrack::scenario_from_json(parse_doc(scenario_json, "scenario"));
    const wintrack::GeneratedScene scene = wintrack::generate(spec, scene_id);
    json dets = json::array();
    for (const wintrack::Detection& det : scene.detections) {
        dets.push_back(wintrack::detection_record_to_json({scene_id, det}));
    }
    json gts = json::array();
    for (const wintrack::GroundTruthRecord& rec : scene.ground_truth) {
        gts.push_back(wintrack::ground_truth_to_json(rec));
    }
    py::dict out;
    out["detections"] = dets.dump();
    out["ground_truth"] = gts.dump();
    return out;
}

std::string evaluate_json(const std::string& tracks_json, const std::string& gt_json,
                          double threshold_m, int recall_levels, bool include_coasted) {
    const json tracks_arr = parse_doc(tracks_json, "tracks");
    const json gt_arr = parse_doc(gt_json, "ground_truth");
    if (!tracks_arr.is_array() || !gt_arr.is_array()) {
        throw wintrack::IoFormatError("evaluate expects JSON arrays", 0);
    }
    std::vector<wintrack::TrackRecord> tracks;
    for (const json& obj : tracks_arr) {
        tracks.push_back(wintrack::track_record_from_json(obj, 0));
    }
    std::vector<wintrack::GroundTruthRecord> gt;
    for (const json& obj : gt_arr) {
        gt.push_back(wintrack::ground_truth_from_json(obj, 0));
    }
    wintrack::EvalOptions options;
    options.threshold_m = threshold_m;
    options.recall_levels = recall_levels;
    options.include_coasted = include_coasted;
    const wintrack::MetricsReport report = wintrack::evaluate(tracks, gt, options);
    json doc;
    doc["gt"] = report.gt;
    doc["matches"] = report.matches;
    doc["fp"] = report.fp;
    doc["fn"] = report.fn;
    doc["ids"] = report.ids;
    doc["mota"] = report.mota_value;
    doc["amota"] = report.amota;
    return doc.dump();
}

std::string solve_assignment(const std::string& problem_json) {
    const json doc = parse_doc(problem_json, "problem");
    wintrack::AssignmentProblem problem;
    problem.num_node_rows = doc.at("num_rows").get<int>();
    for (const json& col : doc.at("columns")) {
        problem.cost.push_back(col.at("cost").get<double>());
        problem.column_rows.push_back(col.at("rows").get<std::vector<int>>());
    }
    const wintrack::AssignmentSolution solution = wintrack::solve(problem);
    json out;
    out["selected"] = solution.selected;
    out["objective"] = solution.objective;
    out["relaxation_was_integral"] = solution.relaxation_was_integral;
    return out.dump();
}

py::tuple dense_counts_py(const std::vector<std::int64_t>& layer_sizes) {
    const wintrack::DenseCounts counts = wintrack::dense_counts(layer_sizes);
    return py::make_tuple(counts.order, counts.size, counts.hypothesis_count);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sliding-window 3D multi-object tracker (C++ core)";

    py::register_exception<wintrack::TrackerError>(m, "TrackerError");

    m.def("normalize_yaw", &wintrack::normalize_yaw, py::arg("angle"),
          "Wrap an angle into (-pi, pi]");
    m.def("dense_counts", &dense_counts_py, py::arg("layer_sizes"),
          "(|V|, |E|, |Z|) of the dense association graph over the given frame sizes");
    m.def(
        "skip_increment",
        [](double detect_prob, double false_alarm_prob) {
            return wintrack::skip_increment(detect_prob, false_alarm_prob).conf;
        },
        py::arg("detect_prob"), py::arg("false_alarm_prob"),
        "Log-likelihood-ratio increment of one skipped frame");
    m.def("score_to_probability", &wintrack::score_to_probability,
          py::arg("log_likelihood_ratio"), "Logistic map from track LLR to P(H1 | D)");
    m.def("default_config_json", &default_config_json,
          "The default tracker config as a JSON string");
    m.def("preset_occlusion_json", &preset_occlusion_json,
          "The occlusion benchmark scenario as a JSON string");
    m.def("simulate", &simulate, py::arg("scenario_json"), py::arg("scene_id") = "scene_000",
          "Generate a scene; returns {'detections': ..., 'ground_truth': ...} JSON strings");
    m.def("evaluate", &evaluate_json, py::arg("tracks_json"), py::arg("gt_json"),
          py::arg("threshold_m") = 2.0, py::arg("recall_levels") = 40,
          py::arg("include_coasted") = false,
          "CLEAR-MOT/AMOTA summary over JSON record arrays");
    m.def("solve_assignment", &solve_assignment, py::arg("problem_json"),
          "Solve {'num_rows': R, 'columns': [{'cost': c, 'rows': [...]}]} as a JSON string");

    py::class_<PyTracker>(m, "Tracker")
        .def(py::init<const std::string&>(), py::arg("config_json"))
        .def("step", &PyTracker::step, py::arg("frame_index"), py::arg("timestamp"),
             py::arg("detections_json"),
             "Process one frame; returns this frame's track records as a JSON array string");
}
