#include "wintrack/cli_commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "wintrack/assignment.hpp"
#include "wintrack/errors.hpp"
#include "wintrack/io.hpp"
#include "wintrack/metrics.hpp"
#include "wintrack/tracker.hpp"

namespace wintrack {

using nlohmann::json;

LatencyStats LatencyStats::over(std::vector<double> samples) {
    LatencyStats stats;
    if (samples.empty()) return stats;
    std::sort(samples.begin(), samples.end());
    const auto rank = [&samples](double q) {
        const auto n = static_cast<double>(samples.size());
        auto idx = static_cast<std::size_t>(std::ceil(q * n));
        idx = std::clamp<std::size_t>(idx, 1, samples.size());
        return samples[idx - 1];
    };
    stats.p50_s = rank(0.50);
    stats.p95_s = rank(0.95);
    stats.max_s = samples.back();
    return stats;
}

json RunManifest::to_json() const {
    const LatencyStats stats = LatencyStats::over(latency_seconds);
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["resolved_config"] = resolved_config;
    doc["input_paths"] = input_paths;
    doc["output_path"] = output_path;
    doc["frames"] = frames;
    doc["detections"] = detections;
    doc["tracks_emitted"] = tracks_emitted;
    doc["latency"] = {{"p50_s", stats.p50_s},
                      {"p95_s", stats.p95_s},
                      {"max_s", stats.max_s},
                      {"samples_s", latency_seconds}};
    return doc;
}

namespace {

// frame index -> detections of that frame, in input order.
using SceneFrames = std::map<int, std::vector<Detection>>;

struct SceneRun {
    std::vector<TrackRecord> records;
    std::vector<double> latency_seconds;
    int frames = 0;
};

/// Runs one scene through a fresh tracker. Latency is measured around the
/// step call only. Dump strings, when non-null, get one section per frame.
SceneRun run_scene(const std::string& scene_id, const SceneFrames& frames,
                   const TrackerConfig& config, std::string* graph_dump,
                   std::string* lp_dump) {
    SceneRun run;
    SlidingWindowTracker tracker(config);
    for (const auto& [frame, dets] : frames) {
        const double timestamp = dets.front().timestamp;
        const auto start = std::chrono::steady_clock::now();
        std::vector<TrackOutput> outputs = tracker.step(frame, timestamp, dets);
        const auto stop = std::chrono::steady_clock::now();
        run.latency_seconds.push_back(
            std::chrono::duration<double>(stop - start).count());
        run.frames += 1;
        for (const TrackOutput& out : outputs) {
            TrackRecord rec;
            rec.scene_id = scene_id;
            rec.frame_index = frame;
            rec.timestamp = timestamp;
            rec.track_id = out.track_id;
            rec.class_label = out.class_label;
            rec.position = out.position;
            rec.yaw = out.yaw;
            rec.size = out.size;
            rec.velocity = out.velocity;
            rec.score = out.score;
            rec.coasted = out.coasted;
            run.records.push_back(std::move(rec));
        }
        if (graph_dump != nullptr) {
            *graph_dump += "# scene " + scene_id + " frame " + std::to_string(frame) + "\n";
            *graph_dump += tracker.graph().dump();
            *graph_dump += "\n";
        }
        if (lp_dump != nullptr) {
            *lp_dump += "\\ scene " + scene_id + " frame " + std::to_string(frame) + "\n";
            *lp_dump += to_lp_format(tracker.last_problem());
            *lp_dump += "\n";
        }
    }
    if (tracker.solver_fallbacks() > 0) {
        WINTRACK_LOG(LogLevel::kWarn,
                     "scene " + scene_id + ": solver budget exhausted on " +
                         std::to_string(tracker.solver_fallbacks()) +
                         " frame(s); committed best-known incumbents");
    }
    return run;
}

json metrics_report_to_json(const MetricsReport& report) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["gt"] = report.gt;
    doc["matches"] = report.matches;
    doc["fp"] = report.fp;
    doc["fn"] = report.fn;
    doc["ids"] = report.ids;
    doc["mota"] = report.mota_value;
    doc["amota"] = report.amota;
    json per_class = json::array();
    for (const ClassMetrics& cm : report.per_class) {
        json c;
        c["class"] = cm.class_label;
        c["gt"] = cm.gt;
        c["matches"] = cm.matches;
        c["fp"] = cm.fp;
        c["fn"] = cm.fn;
        c["ids"] = cm.ids;
        c["mota"] = cm.mota_value;
        c["amota"] = cm.amota;
        json sweep = json::array();
        for (const RecallLevel& level : cm.sweep) {
            json l;
            l["recall"] = level.recall;
            l["reachable"] = level.reachable;
            l["score_threshold"] = level.score_threshold;
            l["fp"] = level.fp;
            l["fn"] = level.fn;
            l["ids"] = level.ids;
            l["term"] = level.term;
            sweep.push_back(std::move(l));
        }
        c["sweep"] = std::move(sweep);
        per_class.push_back(std::move(c));
    }
    doc["per_class"] = std::move(per_class);
    return doc;
}

int report_config_violations(const std::vector<ConfigViolation>& violations) {
    for (const ConfigViolation& v : violations) {
        std::cerr << "config error: " << v.field << ": " << v.message << "\n";
    }
    return kExitBadConfig;
}

}  // namespace

std::uint64_t scene_seed(std::uint64_t base_seed, int scene_index) {
    return base_seed + static_cast<std::uint64_t>(scene_index);
}

std::string scene_name(int scene_index) {
    std::ostringstream name;
    name << "scene_" << std::setw(3) << std::setfill('0') << scene_index;
    return name.str();
}

int cmd_track(const TrackOptions& options) {
    // Resolve the config: defaults <- file <- flags.
    TrackerConfig config;
    if (!options.config_path.empty()) {
        try {
            config = load_config(options.config_path);
        } catch (const TrackerError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitBadConfig;
        }
    }
    if (options.window) config.window_length_frames = *options.window;
    if (options.max_hypotheses) config.max_hypotheses_per_root = *options.max_hypotheses;
    const std::vector<ConfigViolation> violations = validate_config(config);
    if (!violations.empty()) return report_config_violations(violations);

    std::vector<DetectionRecord> detections;
    try {
        detections = read_detections(options.detections_path);
    } catch (const TrackerError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitBadInput;
    }
    if (options.max_frame_index) {
        std::erase_if(detections, [&](const DetectionRecord& rec) {
            return rec.det.frame_index > *options.max_frame_index;
        });
    }

    std::map<std::string, SceneFrames> scenes;
    for (DetectionRecord& rec : detections) {
        scenes[rec.scene_id][rec.det.frame_index].push_back(std::move(rec.det));
    }

    RunManifest manifest;
    manifest.resolved_config = config_to_json(config);
    manifest.input_paths = {options.detections_path};
    if (!options.config_path.empty()) manifest.input_paths.push_back(options.config_path);
    manifest.output_path = options.output_path;
    manifest.detections = static_cast<int>(detections.size());

    std::string graph_dump;
    std::string lp_dump;
    std::vector<TrackRecord> all_records;
    for (const auto& [scene_id, frames] : scenes) {
        SceneRun run;
        try {
            run = run_scene(scene_id, frames, config,
                            options.graph_dump_path.empty() ? nullptr : &graph_dump,
                            options.lp_dump_path.empty() ? nullptr : &lp_dump);
        } catch (const TrackerError& e) {
            std::cerr << "input error: scene " << scene_id << ": " << e.what() << "\n";
            return kExitBadInput;
        }
        all_records.insert(all_records.end(), std::make_move_iterator(run.records.begin()),
                           std::make_move_iterator(run.records.end()));
        manifest.latency_seconds.insert(manifest.latency_seconds.end(),
                                        run.latency_seconds.begin(),
                                        run.latency_seconds.end());
        manifest.frames += run.frames;
    }
    manifest.tracks_emitted = static_cast<int>(all_records.size());

    const std::string manifest_path = options.manifest_path.empty()
                                          ? options.output_path + ".manifest.json"
                                          : options.manifest_path;
    try {
        write_tracks(options.output_path, all_records);
        write_json_atomic(manifest_path, manifest.to_json());
        if (!options.graph_dump_path.empty()) {
            write_text_atomic(options.graph_dump_path, graph_dump);
        }
        if (!options.lp_dump_path.empty()) {
            write_text_atomic(options.lp_dump_path, lp_dump);
        }
    } catch (const IoError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitUnwritable;
    }

    const LatencyStats stats = LatencyStats::over(manifest.latency_seconds);
    std::cout << "tracked " << scenes.size() << " scene(s), " << manifest.frames
              << " frame(s), " << manifest.tracks_emitted << " output(s) -> "
              << options.output_path << "\n";
    std::cout << "latency p50 " << stats.p50_s << " s, p95 " << stats.p95_s << " s, max "
              << stats.max_s << " s\n";
    return kExitSuccess;
}

int cmd_eval(const EvalCliOptions& options) {
    std::vector<TrackRecord> tracks;
    std::vector<GroundTruthRecord> gt;
    try {
        tracks = read_tracks(options.tracks_path);
        gt = read_ground_truth(options.gt_path);
    } catch (const TrackerError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitBadInput;
    }

    std::set<std::string> gt_scenes;
    for (const GroundTruthRecord& rec : gt) gt_scenes.insert(rec.scene_id);
    std::set<std::string> unknown;
    for (const TrackRecord& rec : tracks) {
        if (gt_scenes.count(rec.scene_id) == 0) unknown.insert(rec.scene_id);
    }
    if (!unknown.empty()) {
        std::cerr << "scene mismatch: track scenes absent from ground truth:";
        for (const std::string& scene : unknown) std::cerr << " " << scene;
        std::cerr << "\n";
        return kExitSceneMismatch;
    }

    EvalOptions eval_options;
    if (options.threshold_m) eval_options.threshold_m = *options.threshold_m;
    if (options.recall_levels) eval_options.recall_levels = *options.recall_levels;
    eval_options.include_coasted = options.include_coasted;
    eval_options.class_filter = options.classes;

    MetricsReport report;
    try {
        report = evaluate(tracks, gt, eval_options);
    } catch (const TrackerError& e) {
        std::cerr << "eval error: " << e.what() << "\n";
        return kExitBadConfig;
    }
    std::cout << format_report(report);

    const std::string report_path = options.report_path.empty()
                                        ? options.tracks_path + ".report.json"
                                        : options.report_path;
    try {
        write_json_atomic(report_path, metrics_report_to_json(report));
    } catch (const IoError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitUnwritable;
    }
    return kExitSuccess;
}

int cmd_simulate(const SimulateOptions& options) {
    ScenarioSpec spec;
    if (options.use_preset) {
        spec = preset_occlusion_benchmark();
    } else {
        try {
            spec = load_scenario(options.scenario_path);
        } catch (const TrackerError& e) {
            std::cerr << "input error: " << e.what() << "\n";
            return kExitBadInput;
        }
    }
    if (options.frames) spec.duration_frames = *options.frames;
    if (options.seed) spec.seed = *options.seed;
    const std::vector<std::string> problems = spec.validate();
    if (!problems.empty()) {
        for (const std::string& p : problems) std::cerr << "scenario error: " << p << "\n";
        return kExitBadConfig;
    }
    if (options.scenes < 1) {
        std::cerr << "scenario error: scenes must be >= 1\n";
        return kExitBadConfig;
    }

    std::vector<DetectionRecord> detections;
    std::vector<GroundTruthRecord> ground_truth;
    for (int i = 0; i < options.scenes; ++i) {
        ScenarioSpec scene_spec = spec;
        scene_spec.seed = scene_seed(spec.seed, i);
        GeneratedScene scene = generate(scene_spec, scene_name(i));
        for (Detection& det : scene.detections) {
            detections.push_back({scene_name(i), std::move(det)});
        }
        ground_truth.insert(ground_truth.end(),
                            std::make_move_iterator(scene.ground_truth.begin()),
                            std::make_move_iterator(scene.ground_truth.end()));
    }

    namespace fs = std::filesystem;
    const fs::path out_dir(options.out_dir);
    try {
        write_detections(out_dir / "detections.jsonl", detections);
        write_ground_truth(out_dir / "ground_truth.jsonl", ground_truth);
        save_scenario(out_dir / "scenario.json", spec);
    } catch (const IoError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitUnwritable;
    }
    std::cout << "simulated " << options.scenes << " scene(s): " << detections.size()
              << " detections, " << ground_truth.size() << " ground-truth boxes -> "
              << options.out_dir << "\n";
    return kExitSuccess;
}

ScenarioSpec default_bench_scenario() {
    ScenarioSpec spec;
    spec.seed = 20;
    spec.duration_frames = 40;
    spec.frame_rate_hz = 2.0;
    spec.class_counts = {{classes::kCar, 8}, {classes::kPedestrian, 4}};
    spec.position_noise_sigma_m = 0.15;
    spec.dropout_prob = 0.2;
    spec.clutter_rate_per_frame = 2.0;
    spec.region_min = Vec3(0.0, 0.0, 0.0);
    spec.region_max = Vec3(300.0, 300.0, 1.0);
    spec.embedding_dim = 8;
    spec.embedding_angle_sigma_rad = 0.15;
    return spec;
}

int cmd_bench(const BenchOptions& options) {
    ScenarioSpec spec;
    if (options.scenario_path.empty()) {
        spec = default_bench_scenario();
    } else {
        try {
            spec = load_scenario(options.scenario_path);
        } catch (const TrackerError& e) {
            std::cerr << "input error: " << e.what() << "\n";
            return kExitBadInput;
        }
    }
    if (options.seed) spec.seed = *options.seed;
    const std::vector<std::string> problems = spec.validate();
    if (!problems.empty()) {
        for (const std::string& p : problems) std::cerr << "scenario error: " << p << "\n";
        return kExitBadConfig;
    }

    TrackerConfig base_config;
    if (!options.config_path.empty()) {
        try {
            base_config = load_config(options.config_path);
        } catch (const TrackerError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitBadConfig;
        }
    } else {
        // With no explicit config, the clutter-likelihood volume follows the
        // scenario region so scores are on their intended scale.
        base_config.measurement_volume_m3 = spec.volume_m3();
    }
    if (options.windows.empty()) {
        std::cerr << "config error: windows list must not be empty\n";
        return kExitBadConfig;
    }
    if (options.scenes < 1) {
        std::cerr << "config error: scenes must be >= 1\n";
        return kExitBadConfig;
    }
    for (int window : options.windows) {
        TrackerConfig probe = base_config;
        probe.window_length_frames = window;
        const std::vector<ConfigViolation> violations = validate_config(probe);
        if (!violations.empty()) return report_config_violations(violations);
    }

    // The same generated scenes feed every window length.
    struct BenchScene {
        std::string scene_id;
        SceneFrames frames;
        std::vector<GroundTruthRecord> ground_truth;
    };
    std::vector<BenchScene> bench_scenes;
    for (int i = 0; i < options.scenes; ++i) {
        ScenarioSpec scene_spec = spec;
        scene_spec.seed = scene_seed(spec.seed, i);
        GeneratedScene scene = generate(scene_spec, scene_name(i));
        BenchScene bench;
        bench.scene_id = scene_name(i);
        for (Detection& det : scene.detections) {
            bench.frames[det.frame_index].push_back(std::move(det));
        }
        bench.ground_truth = std::move(scene.ground_truth);
        bench_scenes.push_back(std::move(bench));
    }
    std::vector<GroundTruthRecord> all_gt;
    for (const BenchScene& scene : bench_scenes) {
        all_gt.insert(all_gt.end(), scene.ground_truth.begin(), scene.ground_truth.end());
    }

    struct BenchRow {
        int window = 0;
        double amota = 0.0, mota = 0.0;
        std::int64_t fp = 0, fn = 0, ids = 0;
        LatencyStats latency;
    };
    std::vector<BenchRow> rows;
    for (int window : options.windows) {
        TrackerConfig config = base_config;
        config.window_length_frames = window;
        std::vector<TrackRecord> all_records;
        std::vector<double> latencies;
        for (const BenchScene& scene : bench_scenes) {
            SceneRun run = run_scene(scene.scene_id, scene.frames, config, nullptr, nullptr);
            all_records.insert(all_records.end(),
                               std::make_move_iterator(run.records.begin()),
                               std::make_move_iterator(run.records.end()));
            latencies.insert(latencies.end(), run.latency_seconds.begin(),
                             run.latency_seconds.end());
        }
        EvalOptions eval_options;
        eval_options.threshold_m = config.metric_match_threshold_m;
        eval_options.recall_levels = config.recall_levels;
        MetricsReport report = evaluate(all_records, all_gt, eval_options);
        BenchRow row;
        row.window = window;
        row.amota = report.amota;
        row.mota = report.mota_value;
        row.fp = report.fp;
        row.fn = report.fn;
        row.ids = report.ids;
        row.latency = LatencyStats::over(latencies);
        rows.push_back(row);
    }

    // Human-readable table, one row per window length.
    std::cout << std::left << std::setw(10) << "SW Length" << std::right << std::setw(9)
              << "AMOTA" << std::setw(9) << "MOTA" << std::setw(8) << "FP" << std::setw(8)
              << "FN" << std::setw(8) << "IDS" << std::setw(11) << "p50 [s]" << std::setw(11)
              << "p95 [s]" << std::setw(11) << "max [s]" << "\n";
    std::cout << std::string(85, '-') << "\n";
    for (const BenchRow& row : rows) {
        std::cout << std::left << std::setw(10) << row.window << std::right << std::fixed
                  << std::setprecision(4) << std::setw(9) << row.amota << std::setw(9)
                  << row.mota;
        std::cout.unsetf(std::ios::fixed);
        std::cout << std::setw(8) << row.fp << std::setw(8) << row.fn << std::setw(8)
                  << row.ids << std::fixed << std::setprecision(5) << std::setw(11)
                  << row.latency.p50_s << std::setw(11) << row.latency.p95_s << std::setw(11)
                  << row.latency.max_s << "\n";
        std::cout.unsetf(std::ios::fixed);
    }

    std::ostringstream csv;
    csv << "sw_length,amota,mota,fp,fn,ids,latency_p50_s,latency_p95_s,latency_max_s\n";
    csv << std::setprecision(17);
    for (const BenchRow& row : rows) {
        csv << row.window << "," << row.amota << "," << row.mota << "," << row.fp << ","
            << row.fn << "," << row.ids << "," << row.latency.p50_s << ","
            << row.latency.p95_s << "," << row.latency.max_s << "\n";
    }
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["scenario"] = scenario_to_json(spec);
    doc["config"] = config_to_json(base_config);
    doc["scenes"] = options.scenes;
    json rows_json = json::array();
    for (const BenchRow& row : rows) {
        json r;
        r["sw_length"] = row.window;
        r["amota"] = row.amota;
        r["mota"] = row.mota;
        r["fp"] = row.fp;
        r["fn"] = row.fn;
        r["ids"] = row.ids;
        r["latency_p50_s"] = row.latency.p50_s;
        r["latency_p95_s"] = row.latency.p95_s;
        r["latency_max_s"] = row.latency.max_s;
        rows_json.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows_json);

    namespace fs = std::filesystem;
    const fs::path out_dir(options.out_dir);
    try {
        write_text_atomic(out_dir / "bench.csv", csv.str());
        write_json_atomic(out_dir / "bench.json", doc);
    } catch (const IoError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitUnwritable;
    }
    return kExitSuccess;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"wintrack: sliding-window 3D multi-object tracker"};
    app.require_subcommand(1);

    TrackOptions track_options;
    CLI::App* track = app.add_subcommand("track", "Run the tracker over a detection file");
    track->add_option("--detections", track_options.detections_path,
                      "Detection file (JSONL)")->required();
    track->add_option("--config", track_options.config_path, "Tracker config (JSON)");
    track->add_option("--output", track_options.output_path,
                      "Track output file (JSONL)")->required();
    track->add_option("--manifest", track_options.manifest_path,
                      "Run manifest path (default: <output>.manifest.json)");
    track->add_option("--graph-dump", track_options.graph_dump_path,
                      "Write the association graph per frame to this file");
    track->add_option("--lp-dump", track_options.lp_dump_path,
                      "Write each frame's assignment LP to this file");
    track->add_option("--window", track_options.window, "Override window length T");
    track->add_option("--max-hypotheses", track_options.max_hypotheses,
                      "Override the per-root hypothesis cap M");
    track->add_option("--max-frame-index", track_options.max_frame_index,
                      "Ignore input frames beyond this index");

    EvalCliOptions eval_options;
    CLI::App* eval = app.add_subcommand("eval", "Score a track file against ground truth");
    eval->add_option("--tracks", eval_options.tracks_path, "Track file (JSONL)")->required();
    eval->add_option("--gt", eval_options.gt_path, "Ground-truth file (JSONL)")->required();
    eval->add_option("--report", eval_options.report_path,
                     "Report JSON path (default: <tracks>.report.json)");
    eval->add_option("--threshold", eval_options.threshold_m,
                     "Match threshold on 2D center distance, meters");
    eval->add_option("--recall-levels", eval_options.recall_levels,
                     "Number of recall levels in the AMOTA sweep");
    eval->add_flag("--include-coasted", eval_options.include_coasted,
                   "Score coasted (predicted-only) outputs too");
    eval->add_option("--classes", eval_options.classes,
                     "Restrict evaluation to these class labels");

    SimulateOptions sim_options;
    std::string preset_name;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
    CLI::Option* sim_scenario =
        simulate->add_option("--scenario", sim_options.scenario_path, "Scenario spec (JSON)");
    CLI::Option* sim_preset =
        simulate->add_option("--preset", preset_name, "Built-in scenario preset")
            ->check(CLI::IsMember({"occlusion"}));
    sim_scenario->excludes(sim_preset);
    sim_preset->excludes(sim_scenario);
    simulate->add_option("--out", sim_options.out_dir, "Output directory")->required();
    simulate->add_option("--frames", sim_options.frames, "Override duration_frames");
    simulate->add_option("--seed", sim_options.seed, "Override the base seed");
    simulate->add_option("--scenes", sim_options.scenes, "Number of scenes to generate");

    BenchOptions bench_options;
    CLI::App* bench = app.add_subcommand("bench", "Window-length ablation benchmark");
    bench->add_option("--scenario", bench_options.scenario_path,
                      "Scenario spec (JSON); omit for the built-in benchmark");
    bench->add_option("--config", bench_options.config_path, "Tracker config (JSON)");
    bench->add_option("--out", bench_options.out_dir, "Output directory")->required();
    bench->add_option("--windows", bench_options.windows,
                      "Window lengths to sweep (comma separated)")
        ->delimiter(',');
    bench->add_option("--scenes", bench_options.scenes, "Scenes per window length");
    bench->add_option("--seed", bench_options.seed, "Override the base seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (track->parsed()) return cmd_track(track_options);
        if (eval->parsed()) return cmd_eval(eval_options);
        if (simulate->parsed()) {
            sim_options.use_preset = !preset_name.empty();
            if (!sim_options.use_preset && sim_options.scenario_path.empty()) {
                std::cerr << "simulate needs --scenario or --preset\n";
                return kExitBadInput;
            }
            return cmd_simulate(sim_options);
        }
        if (bench->parsed()) return cmd_bench(bench_options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace wintrack
