#pragma once

#include "breathkit/synthesis.hpp"
#include "breathkit/transcript.hpp"
#include "breathkit/types.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace breathkit::io {

namespace fs = std::filesystem;

// JSON forms. Parsing throws ValidationError naming the offending field.
nlohmann::json to_json(const Waveform& w);
Waveform waveform_from_json(const nlohmann::json& j, const std::string& origin = "waveform");

nlohmann::json to_json(const FrameSequence& f);
FrameSequence frames_from_json(const nlohmann::json& j, const std::string& origin = "frames");

nlohmann::json to_json(const IeInterval& ie);
IeInterval interval_from_json(const nlohmann::json& j, const std::string& origin = "interval");

nlohmann::json to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j,
                                const std::string& origin = "transcript");

nlohmann::json to_json(const DetectorConfig& c);
DetectorConfig detector_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SynthConfig& c);

// Files ----------------------------------------------------------------------

std::string read_text(const fs::path& path);

/// Writes to a temporary sibling and renames it over `path`, so readers never
/// observe a partial file.
void atomic_write(const fs::path& path, const std::string& content);

/// `.json` selects the JSON document, anything else the `time_s,value` CSV.
Waveform read_waveform(const fs::path& path);
std::string format_waveform_csv(const Waveform& w);
void write_waveform(const fs::path& path, const Waveform& w,
                    std::optional<std::pair<Eigen::Index, Eigen::Index>> interior = {});

FrameSequence read_frames(const fs::path& path);
void write_frames(const fs::path& path, const FrameSequence& f);

Transcript read_transcript(const fs::path& path);
void write_transcript(const fs::path& path, const Transcript& t);

/// CSV with header `start_s,end_s,source`.
std::vector<IeInterval> parse_intervals_csv(const std::string& text, const std::string& origin);
std::vector<IeInterval> read_intervals(const fs::path& path);
std::string format_intervals_csv(const std::vector<IeInterval>& intervals);
void write_intervals(const fs::path& path, const std::vector<IeInterval>& intervals);

/// TOML keys mirror the struct field names; unknown keys are rejected.
/// A `[detector]` or `[synth]` table is used when present, otherwise the root.
DetectorConfig read_detector_config(const fs::path& path);
SynthConfig read_synth_config(const fs::path& path);
DetectorConfig parse_detector_config(const std::string& toml_text, const std::string& origin);
SynthConfig parse_synth_config(const std::string& toml_text, const std::string& origin);

std::string sha256_hex(const std::string& bytes);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

} // namespace breathkit::io
