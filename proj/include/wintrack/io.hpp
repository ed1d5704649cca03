#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "wintrack/config.hpp"
#include "wintrack/metrics.hpp"
#include "wintrack/scenario.hpp"
#include "wintrack/types.hpp"

namespace wintrack {

/// Version stamped into every file this library writes; readers reject others.
inline constexpr int kFormatVersion = 1;

/// A detection plus the scene it belongs to (detections from many scenes can
/// share one file; the tracker runs them independently).
struct DetectionRecord {
    std::string scene_id;
    Detection det;
};

// ---------------------------------------------------------------------------
// Logging. One knob: the WINTRACK_LOG environment variable, one of
// error|warn|info|debug (default warn). Lines go to stderr.
enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level();
void log_line(LogLevel level, const std::string& message);

#define WINTRACK_LOG(level, message)                               \
    do {                                                           \
        if (static_cast<int>(level) <= static_cast<int>(::wintrack::log_level())) \
            ::wintrack::log_line(level, message);                  \
    } while (0)

// ---------------------------------------------------------------------------
// Atomic file writes: content lands in <path>.tmp first and is renamed over
// the target only once fully written, so readers never observe partial files.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Record files: newline-delimited JSON, one object per line, preceded by a
// header line {"format_version": 1, "kind": "<kind>"}. Keys are written in
// sorted order so equal data produces byte-identical files.
std::vector<DetectionRecord> read_detections(const std::filesystem::path& path);
std::vector<GroundTruthRecord> read_ground_truth(const std::filesystem::path& path);
std::vector<TrackRecord> read_tracks(const std::filesystem::path& path);

void write_detections(const std::filesystem::path& path,
                      const std::vector<DetectionRecord>& records);
void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthRecord>& records);
void write_tracks(const std::filesystem::path& path,
                  const std::vector<TrackRecord>& records);

// Per-record converters behind the files above (also used by the bindings).
// The *_from_json forms throw IoFormatError citing `line` on bad fields;
// detection parsing leaves detection_id untouched (callers assign it).
nlohmann::json detection_record_to_json(const DetectionRecord& rec);
DetectionRecord detection_record_from_json(const nlohmann::json& obj, int line);
nlohmann::json ground_truth_to_json(const GroundTruthRecord& rec);
GroundTruthRecord ground_truth_from_json(const nlohmann::json& obj, int line);
nlohmann::json track_record_to_json(const TrackRecord& rec);
TrackRecord track_record_from_json(const nlohmann::json& obj, int line);

// ---------------------------------------------------------------------------
// Config and scenario documents: single JSON objects. Loading starts from the
// defaults and overrides the keys present; unknown keys are an error.
nlohmann::json config_to_json(const TrackerConfig& config);
TrackerConfig config_from_json(const nlohmann::json& doc);
TrackerConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const TrackerConfig& config);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& doc);
ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const ScenarioSpec& spec);

}  // namespace wintrack
