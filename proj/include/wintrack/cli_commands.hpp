#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wintrack/scenario.hpp"

namespace wintrack {

// Exit codes shared by every subcommand.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;        // unexpected internal error
inline constexpr int kExitBadInput = 2;       // unreadable or malformed input data
inline constexpr int kExitBadConfig = 3;      // config/scenario constraint violations
inline constexpr int kExitSceneMismatch = 4;  // eval track scenes absent from gt
inline constexpr int kExitUnwritable = 5;     // cannot write an output file

struct LatencyStats {
    double p50_s = 0.0;
    double p95_s = 0.0;
    double max_s = 0.0;

    /// Nearest-rank percentiles over the samples (zeros when empty).
    static LatencyStats over(std::vector<double> samples);
};

/// Written alongside every tracking run: the resolved config, the inputs, and
/// per-frame wall-clock latency around the track-step call only.
struct RunManifest {
    nlohmann::json resolved_config;
    std::vector<std::string> input_paths;
    std::string output_path;
    std::vector<double> latency_seconds;  // one sample per processed frame
    int frames = 0;
    int detections = 0;
    int tracks_emitted = 0;

    nlohmann::json to_json() const;
};

struct TrackOptions {
    std::string detections_path;
    std::string config_path;     // empty = library defaults
    std::string output_path;
    std::string manifest_path;   // empty = <output_path>.manifest.json
    std::string graph_dump_path; // empty = no dump
    std::string lp_dump_path;    // empty = no dump
    std::optional<int> window;          // overrides window_length_frames
    std::optional<int> max_hypotheses;  // overrides max_hypotheses_per_root
    std::optional<int> max_frame_index; // drop input frames beyond this index
};
int cmd_track(const TrackOptions& options);

struct EvalCliOptions {
    std::string tracks_path;
    std::string gt_path;
    std::string report_path;  // empty = <tracks_path>.report.json
    std::optional<double> threshold_m;
    std::optional<int> recall_levels;
    bool include_coasted = false;
    std::vector<std::string> classes;  // empty = all
};
int cmd_eval(const EvalCliOptions& options);

struct SimulateOptions {
    std::string scenario_path;  // empty when use_preset is set
    std::string out_dir;
    bool use_preset = false;    // preset_occlusion_benchmark()
    std::optional<int> frames;
    std::optional<std::uint64_t> seed;
    int scenes = 1;             // scene ids scene_000, scene_001, ...
};
int cmd_simulate(const SimulateOptions& options);

struct BenchOptions {
    std::string scenario_path;  // empty = default_bench_scenario()
    std::string config_path;    // empty = library defaults
    std::string out_dir;
    std::vector<int> windows = {2, 3, 4, 5};
    int scenes = 20;
    std::optional<std::uint64_t> seed;
};
int cmd_bench(const BenchOptions& options);

/// The scenario cmd_bench falls back to: mixed traffic with dropouts and
/// clutter, sized so window length visibly moves IDS and AMOTA.
ScenarioSpec default_bench_scenario();

/// Scene seed derivation for multi-scene generation; scene_index starts at 0.
std::uint64_t scene_seed(std::uint64_t base_seed, int scene_index);
std::string scene_name(int scene_index);

/// Full argv entry point used by the wintrack binary.
int run_cli(int argc, char** argv);

}  // namespace wintrack
