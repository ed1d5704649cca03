#include "wintrack/io.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "wintrack/errors.hpp"

namespace wintrack {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Logging

LogLevel log_level() {
    static const LogLevel cached = [] {
        const char* raw = std::getenv("WINTRACK_LOG");
        if (raw == nullptr) return LogLevel::kWarn;
        const std::string value(raw);
        if (value == "error") return LogLevel::kError;
        if (value == "warn") return LogLevel::kWarn;
        if (value == "info") return LogLevel::kInfo;
        if (value == "debug") return LogLevel::kDebug;
        return LogLevel::kWarn;
    }();
    return cached;
}

void log_line(LogLevel level, const std::string& message) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "[wintrack] " << names[static_cast<int>(level)] << ": " << message
              << std::endl;
}

// ---------------------------------------------------------------------------
// Atomic writes

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move " + tmp.string() + " into place: " + path.string());
    }
}

void write_json_atomic(const std::filesystem::path& path, const json& doc) {
    write_text_atomic(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Shared JSON helpers

namespace {

const json& require(const json& obj, const char* key, int line) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw IoFormatError(std::string("missing field '") + key + "'", line);
    }
    return *it;
}

double get_double(const json& obj, const char* key, int line) {
    const json& v = require(obj, key, line);
    if (!v.is_number()) {
        throw IoFormatError(std::string("field '") + key + "' must be a number", line);
    }
    return v.get<double>();
}

std::int64_t get_int(const json& obj, const char* key, int line) {
    const json& v = require(obj, key, line);
    if (!v.is_number_integer()) {
        throw IoFormatError(std::string("field '") + key + "' must be an integer", line);
    }
    return v.get<std::int64_t>();
}

std::string get_string(const json& obj, const char* key, int line) {
    const json& v = require(obj, key, line);
    if (!v.is_string()) {
        throw IoFormatError(std::string("field '") + key + "' must be a string", line);
    }
    return v.get<std::string>();
}

json parse_line(const std::string& text, int line) {
    try {
        json obj = json::parse(text);
        if (!obj.is_object()) throw IoFormatError("record is not a JSON object", line);
        return obj;
    } catch (const json::parse_error& e) {
        throw IoFormatError(std::string("invalid JSON: ") + e.what(), line);
    }
}

/// Streams the non-empty lines of a record file, checks the header, and hands
/// each record line to `consume(parsed_object, line_number)`.
template <typename Fn>
void read_record_file(const std::filesystem::path& path, const char* kind, Fn&& consume) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::string text;
    int line = 0;
    bool saw_header = false;
    while (std::getline(in, text)) {
        line += 1;
        if (text.empty()) continue;
        json obj = parse_line(text, line);
        if (!saw_header) {
            const auto version = get_int(obj, "format_version", line);
            if (version != kFormatVersion) {
                throw IoFormatError("unsupported format_version " + std::to_string(version),
                                    line);
            }
            if (get_string(obj, "kind", line) != kind) {
                throw IoFormatError(std::string("expected kind '") + kind + "', got '" +
                                        get_string(obj, "kind", line) + "'",
                                    line);
            }
            saw_header = true;
            continue;
        }
        consume(obj, line);
    }
    if (!saw_header) throw IoFormatError("missing header line", 1);
}

void box_to_json(json& obj, const Vec3& position, double yaw, const Vec3& size) {
    obj["x"] = position.x();
    obj["y"] = position.y();
    obj["z"] = position.z();
    obj["yaw"] = yaw;
    obj["l"] = size.x();
    obj["w"] = size.y();
    obj["h"] = size.z();
}

void box_from_json(const json& obj, int line, Vec3& position, double& yaw, Vec3& size) {
    position = Vec3(get_double(obj, "x", line), get_double(obj, "y", line),
                    get_double(obj, "z", line));
    yaw = get_double(obj, "yaw", line);
    size = Vec3(get_double(obj, "l", line), get_double(obj, "w", line),
                get_double(obj, "h", line));
}

std::string header_line(const char* kind) {
    json header;
    header["format_version"] = kFormatVersion;
    header["kind"] = kind;
    return header.dump();
}

}  // namespace

// ---------------------------------------------------------------------------
// Detections

DetectionRecord detection_record_from_json(const json& obj, int line) {
    DetectionRecord rec;
    rec.scene_id = get_string(obj, "scene_id", line);
    Detection& det = rec.det;
    det.frame_index = static_cast<int>(get_int(obj, "frame_index", line));
    det.timestamp = get_double(obj, "timestamp", line);
    det.class_label = get_string(obj, "class", line);
    box_from_json(obj, line, det.position, det.yaw, det.size);
    const bool has_vx = obj.contains("vx");
    if (has_vx != obj.contains("vy") || has_vx != obj.contains("vz")) {
        throw IoFormatError("vx/vy/vz must be given together", line);
    }
    if (has_vx) {
        det.velocity = Vec3(get_double(obj, "vx", line), get_double(obj, "vy", line),
                            get_double(obj, "vz", line));
    }
    det.confidence = get_double(obj, "confidence", line);
    if (obj.contains("embedding")) {
        const json& arr = obj["embedding"];
        if (!arr.is_array() || arr.empty()) {
            throw IoFormatError("embedding must be a non-empty array", line);
        }
        Eigen::VectorXd emb(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number()) {
                throw IoFormatError("embedding entries must be numbers", line);
            }
            emb[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
        }
        det.embedding = std::move(emb);
    }
    const std::vector<std::string> problems = det.validate();
    if (!problems.empty()) throw IoFormatError(problems.front(), line);
    return rec;
}

std::vector<DetectionRecord> read_detections(const std::filesystem::path& path) {
    std::vector<DetectionRecord> records;
    std::map<std::string, std::int64_t> next_id;  // per-scene id assignment
    read_record_file(path, "detections", [&records, &next_id](const json& obj, int line) {
        DetectionRecord rec = detection_record_from_json(obj, line);
        rec.det.detection_id = next_id[rec.scene_id]++;
        records.push_back(std::move(rec));
    });
    return records;
}

json detection_record_to_json(const DetectionRecord& rec) {
    json obj;
    obj["scene_id"] = rec.scene_id;
    obj["frame_index"] = rec.det.frame_index;
    obj["timestamp"] = rec.det.timestamp;
    obj["class"] = rec.det.class_label;
    box_to_json(obj, rec.det.position, rec.det.yaw, rec.det.size);
    if (rec.det.velocity) {
        obj["vx"] = rec.det.velocity->x();
        obj["vy"] = rec.det.velocity->y();
        obj["vz"] = rec.det.velocity->z();
    }
    obj["confidence"] = rec.det.confidence;
    if (rec.det.embedding) {
        json arr = json::array();
        for (Eigen::Index i = 0; i < rec.det.embedding->size(); ++i) {
            arr.push_back((*rec.det.embedding)[i]);
        }
        obj["embedding"] = std::move(arr);
    }
    return obj;
}

void write_detections(const std::filesystem::path& path,
                      const std::vector<DetectionRecord>& records) {
    std::ostringstream out;
    out << header_line("detections") << "\n";
    for (const DetectionRecord& rec : records) {
        out << detection_record_to_json(rec).dump() << "\n";
    }
    write_text_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Ground truth

GroundTruthRecord ground_truth_from_json(const json& obj, int line) {
    GroundTruthRecord rec;
    rec.scene_id = get_string(obj, "scene_id", line);
    rec.frame_index = static_cast<int>(get_int(obj, "frame_index", line));
    rec.timestamp = get_double(obj, "timestamp", line);
    rec.gt_track_id = get_int(obj, "gt_track_id", line);
    rec.class_label = get_string(obj, "class", line);
    box_from_json(obj, line, rec.position, rec.yaw, rec.size);
    return rec;
}

std::vector<GroundTruthRecord> read_ground_truth(const std::filesystem::path& path) {
    std::vector<GroundTruthRecord> records;
    read_record_file(path, "ground_truth", [&records](const json& obj, int line) {
        records.push_back(ground_truth_from_json(obj, line));
    });
    return records;
}

json ground_truth_to_json(const GroundTruthRecord& rec) {
    json obj;
    obj["scene_id"] = rec.scene_id;
    obj["frame_index"] = rec.frame_index;
    obj["timestamp"] = rec.timestamp;
    obj["gt_track_id"] = rec.gt_track_id;
    obj["class"] = rec.class_label;
    box_to_json(obj, rec.position, rec.yaw, rec.size);
    return obj;
}

void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthRecord>& records) {
    std::ostringstream out;
    out << header_line("ground_truth") << "\n";
    for (const GroundTruthRecord& rec : records) {
        out << ground_truth_to_json(rec).dump() << "\n";
    }
    write_text_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// Track outputs

TrackRecord track_record_from_json(const json& obj, int line) {
    TrackRecord rec;
    rec.scene_id = get_string(obj, "scene_id", line);
    rec.frame_index = static_cast<int>(get_int(obj, "frame_index", line));
    rec.timestamp = get_double(obj, "timestamp", line);
    rec.track_id = get_int(obj, "track_id", line);
    rec.class_label = get_string(obj, "class", line);
    box_from_json(obj, line, rec.position, rec.yaw, rec.size);
    rec.velocity = Vec3(get_double(obj, "vx", line), get_double(obj, "vy", line),
                        get_double(obj, "vz", line));
    rec.score = get_double(obj, "score", line);
    const json& coasted = require(obj, "coasted", line);
    if (!coasted.is_boolean()) {
        throw IoFormatError("field 'coasted' must be a boolean", line);
    }
    rec.coasted = coasted.get<bool>();
    return rec;
}

std::vector<TrackRecord> read_tracks(const std::filesystem::path& path) {
    std::vector<TrackRecord> records;
    read_record_file(path, "tracks", [&records](const json& obj, int line) {
        records.push_back(track_record_from_json(obj, line));
    });
    return records;
}

json track_record_to_json(const TrackRecord& rec) {
    json obj;
    obj["scene_id"] = rec.scene_id;
    obj["frame_index"] = rec.frame_index;
    obj["timestamp"] = rec.timestamp;
    obj["track_id"] = rec.track_id;
    obj["class"] = rec.class_label;
    box_to_json(obj, rec.position, rec.yaw, rec.size);
    obj["vx"] = rec.velocity.x();
    obj["vy"] = rec.velocity.y();
    obj["vz"] = rec.velocity.z();
    obj["score"] = rec.score;
    obj["coasted"] = rec.coasted;
    return obj;
}

void write_tracks(const std::filesystem::path& path,
                  const std::vector<TrackRecord>& records) {
    std::ostringstream out;
    out << header_line("tracks") << "\n";
    for (const TrackRecord& rec : records) out << track_record_to_json(rec).dump() << "\n";
    write_text_atomic(path, out.str());
}

// ---------------------------------------------------------------------------
// TrackerConfig document

namespace {

Eigen::VectorXd vector_from_json(const json& arr, const char* key) {
    if (!arr.is_array()) {
        throw IoFormatError(std::string("'") + key + "' must be an array", 0);
    }
    Eigen::VectorXd out(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            throw IoFormatError(std::string("'") + key + "' entries must be numbers", 0);
        }
        out[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return out;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& known,
                         const char* what) {
    for (const auto& [key, value] : doc.items()) {
        if (known.count(key) == 0) {
            throw IoFormatError(std::string("unknown ") + what + " key '" + key + "'", 0);
        }
    }
}

}  // namespace

json config_to_json(const TrackerConfig& config) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["window_length_frames"] = config.window_length_frames;
    doc["dormant_horizon_frames"] = config.dormant_horizon_frames;
    doc["max_hypotheses_per_root"] = config.max_hypotheses_per_root;
    doc["process_noise_diag"] = vector_to_json(config.process_noise_diag);
    doc["measurement_noise_diag"] = vector_to_json(config.measurement_noise_diag);
    doc["measurement_volume_m3"] = config.measurement_volume_m3;
    doc["detect_prob"] = config.detect_prob;
    doc["false_alarm_prob"] = config.false_alarm_prob;
    doc["velocity_limit_mps"] = json(config.velocity_limit_mps);
    doc["distance_cap_m"] = config.distance_cap_m;
    doc["init_hits"] = config.init_hits;
    doc["delete_misses"] = config.delete_misses;
    doc["metric_match_threshold_m"] = config.metric_match_threshold_m;
    doc["recall_levels"] = config.recall_levels;
    doc["observation_mode"] = to_string(config.observation_mode);
    doc["initial_velocity_sigma_mps"] = config.initial_velocity_sigma_mps;
    return doc;
}

TrackerConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw IoFormatError("config must be a JSON object", 0);
    static const std::set<std::string> known = {
        "format_version",         "window_length_frames",     "dormant_horizon_frames",
        "max_hypotheses_per_root", "process_noise_diag",      "measurement_noise_diag",
        "measurement_volume_m3",  "detect_prob",              "false_alarm_prob",
        "velocity_limit_mps",     "distance_cap_m",           "init_hits",
        "delete_misses",          "metric_match_threshold_m", "recall_levels",
        "observation_mode",       "initial_velocity_sigma_mps"};
    reject_unknown_keys(doc, known, "config");
    TrackerConfig config;
    const auto get_i = [&doc](const char* key, int fallback) {
        return doc.contains(key) ? static_cast<int>(get_int(doc, key, 0)) : fallback;
    };
    const auto get_d = [&doc](const char* key, double fallback) {
        return doc.contains(key) ? get_double(doc, key, 0) : fallback;
    };
    config.window_length_frames = get_i("window_length_frames", config.window_length_frames);
    config.dormant_horizon_frames =
        get_i("dormant_horizon_frames", config.dormant_horizon_frames);
    config.max_hypotheses_per_root =
        get_i("max_hypotheses_per_root", config.max_hypotheses_per_root);
    if (doc.contains("process_noise_diag")) {
        config.process_noise_diag =
            vector_from_json(doc["process_noise_diag"], "process_noise_diag");
    }
    if (doc.contains("measurement_noise_diag")) {
        config.measurement_noise_diag =
            vector_from_json(doc["measurement_noise_diag"], "measurement_noise_diag");
    }
    config.measurement_volume_m3 = get_d("measurement_volume_m3", config.measurement_volume_m3);
    config.detect_prob = get_d("detect_prob", config.detect_prob);
    config.false_alarm_prob = get_d("false_alarm_prob", config.false_alarm_prob);
    if (doc.contains("velocity_limit_mps")) {
        const json& limits = doc["velocity_limit_mps"];
        if (!limits.is_object()) {
            throw IoFormatError("'velocity_limit_mps' must be an object", 0);
        }
        config.velocity_limit_mps.clear();
        for (const auto& [cls, v] : limits.items()) {
            if (!v.is_number()) {
                throw IoFormatError("'velocity_limit_mps' values must be numbers", 0);
            }
            config.velocity_limit_mps[cls] = v.get<double>();
        }
    }
    config.distance_cap_m = get_d("distance_cap_m", config.distance_cap_m);
    config.init_hits = get_i("init_hits", config.init_hits);
    config.delete_misses = get_i("delete_misses", config.delete_misses);
    config.metric_match_threshold_m =
        get_d("metric_match_threshold_m", config.metric_match_threshold_m);
    config.recall_levels = get_i("recall_levels", config.recall_levels);
    if (doc.contains("observation_mode")) {
        try {
            config.observation_mode =
                observation_mode_from_string(get_string(doc, "observation_mode", 0));
        } catch (const InvalidValueError& e) {
            throw IoFormatError(e.what(), 0);
        }
    }
    config.initial_velocity_sigma_mps =
        get_d("initial_velocity_sigma_mps", config.initial_velocity_sigma_mps);
    return config;
}

TrackerConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw IoFormatError(std::string("invalid JSON: ") + e.what(), 0);
    }
    return config_from_json(doc);
}

void save_config(const std::filesystem::path& path, const TrackerConfig& config) {
    write_json_atomic(path, config_to_json(config));
}

// ---------------------------------------------------------------------------
// ScenarioSpec document

json scenario_to_json(const ScenarioSpec& spec) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["seed"] = spec.seed;
    doc["duration_frames"] = spec.duration_frames;
    doc["frame_rate_hz"] = spec.frame_rate_hz;
    doc["class_counts"] = json(spec.class_counts);
    doc["spawn_cluster_radius_m"] = spec.spawn_cluster_radius_m;
    doc["turn_every_frames"] = spec.turn_every_frames;
    doc["turn_angle_rad"] = spec.turn_angle_rad;
    doc["position_noise_sigma_m"] = spec.position_noise_sigma_m;
    doc["dropout_prob"] = spec.dropout_prob;
    doc["clutter_rate_per_frame"] = spec.clutter_rate_per_frame;
    doc["region_min"] = {spec.region_min.x(), spec.region_min.y(), spec.region_min.z()};
    doc["region_max"] = {spec.region_max.x(), spec.region_max.y(), spec.region_max.z()};
    json occs = json::array();
    for (const OcclusionInterval& occ : spec.occlusions) {
        json o;
        o["object_index"] = occ.object_index;
        o["start_frame"] = occ.start_frame;
        o["length_frames"] = occ.length_frames;
        occs.push_back(std::move(o));
    }
    doc["occlusions"] = std::move(occs);
    doc["embedding_dim"] = spec.embedding_dim;
    doc["embedding_angle_sigma_rad"] = spec.embedding_angle_sigma_rad;
    doc["true_confidence_mean"] = spec.true_confidence_mean;
    doc["true_confidence_sigma"] = spec.true_confidence_sigma;
    doc["clutter_confidence_mean"] = spec.clutter_confidence_mean;
    doc["clutter_confidence_sigma"] = spec.clutter_confidence_sigma;
    doc["emit_velocity"] = spec.emit_velocity;
    return doc;
}

ScenarioSpec scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw IoFormatError("scenario must be a JSON object", 0);
    static const std::set<std::string> known = {
        "format_version",          "seed",
        "duration_frames",         "frame_rate_hz",
        "class_counts",            "spawn_cluster_radius_m",
        "turn_every_frames",       "turn_angle_rad",
        "position_noise_sigma_m",  "dropout_prob",
        "clutter_rate_per_frame",  "region_min",
        "region_max",              "occlusions",
        "embedding_dim",           "embedding_angle_sigma_rad",
        "true_confidence_mean",    "true_confidence_sigma",
        "clutter_confidence_mean", "clutter_confidence_sigma",
        "emit_velocity"};
    reject_unknown_keys(doc, known, "scenario");
    ScenarioSpec spec;
    const auto get_i = [&doc](const char* key, int fallback) {
        return doc.contains(key) ? static_cast<int>(get_int(doc, key, 0)) : fallback;
    };
    const auto get_d = [&doc](const char* key, double fallback) {
        return doc.contains(key) ? get_double(doc, key, 0) : fallback;
    };
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_integer() && !s.is_number_unsigned()) {
            throw IoFormatError("'seed' must be an integer", 0);
        }
        spec.seed = s.get<std::uint64_t>();
    }
    spec.duration_frames = get_i("duration_frames", spec.duration_frames);
    spec.frame_rate_hz = get_d("frame_rate_hz", spec.frame_rate_hz);
    if (doc.contains("class_counts")) {
        const json& counts = doc["class_counts"];
        if (!counts.is_object()) throw IoFormatError("'class_counts' must be an object", 0);
        spec.class_counts.clear();
        for (const auto& [cls, v] : counts.items()) {
            if (!v.is_number_integer()) {
                throw IoFormatError("'class_counts' values must be integers", 0);
            }
            spec.class_counts[cls] = v.get<int>();
        }
    }
    spec.spawn_cluster_radius_m = get_d("spawn_cluster_radius_m", spec.spawn_cluster_radius_m);
    spec.turn_every_frames = get_i("turn_every_frames", spec.turn_every_frames);
    spec.turn_angle_rad = get_d("turn_angle_rad", spec.turn_angle_rad);
    spec.position_noise_sigma_m = get_d("position_noise_sigma_m", spec.position_noise_sigma_m);
    spec.dropout_prob = get_d("dropout_prob", spec.dropout_prob);
    spec.clutter_rate_per_frame = get_d("clutter_rate_per_frame", spec.clutter_rate_per_frame);
    const auto read_corner = [&doc](const char* key, Vec3& out) {
        if (!doc.contains(key)) return;
        const json& arr = doc[key];
        if (!arr.is_array() || arr.size() != 3 || !arr[0].is_number() ||
            !arr[1].is_number() || !arr[2].is_number()) {
            throw IoFormatError(std::string("'") + key + "' must be an array of 3 numbers", 0);
        }
        out = Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
    };
    read_corner("region_min", spec.region_min);
    read_corner("region_max", spec.region_max);
    if (doc.contains("occlusions")) {
        const json& occs = doc["occlusions"];
        if (!occs.is_array()) throw IoFormatError("'occlusions' must be an array", 0);
        spec.occlusions.clear();
        for (const json& o : occs) {
            if (!o.is_object()) throw IoFormatError("occlusion entries must be objects", 0);
            OcclusionInterval occ;
            occ.object_index = static_cast<int>(get_int(o, "object_index", 0));
            occ.start_frame = static_cast<int>(get_int(o, "start_frame", 0));
            occ.length_frames = static_cast<int>(get_int(o, "length_frames", 0));
            spec.occlusions.push_back(occ);
        }
    }
    spec.embedding_dim = get_i("embedding_dim", spec.embedding_dim);
    spec.embedding_angle_sigma_rad =
        get_d("embedding_angle_sigma_rad", spec.embedding_angle_sigma_rad);
    spec.true_confidence_mean = get_d("true_confidence_mean", spec.true_confidence_mean);
    spec.true_confidence_sigma = get_d("true_confidence_sigma", spec.true_confidence_sigma);
    spec.clutter_confidence_mean = get_d("clutter_confidence_mean", spec.clutter_confidence_mean);
    spec.clutter_confidence_sigma =
        get_d("clutter_confidence_sigma", spec.clutter_confidence_sigma);
    if (doc.contains("emit_velocity")) {
        const json& v = doc["emit_velocity"];
        if (!v.is_boolean()) throw IoFormatError("'emit_velocity' must be a boolean", 0);
        spec.emit_velocity = v.get<bool>();
    }
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw IoFormatError(std::string("invalid JSON: ") + e.what(), 0);
    }
    return scenario_from_json(doc);
}

void save_scenario(const std::filesystem::path& path, const ScenarioSpec& spec) {
    write_json_atomic(path, scenario_to_json(spec));
}

}  // namespace wintrack
