#include "breathkit/io.hpp"

#include "breathkit/errors.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace breathkit::io {

using nlohmann::json;

std::string format_double(double v)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& origin)
{
  if (!j.is_object()) throw ValidationError(origin, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(origin + "." + key, "missing field");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(origin + "." + key, "has the wrong type");
  }
}

double parse_number(const std::string& text, const std::string& where)
{
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last)
    throw ValidationError(where, "'" + text + "' is not a number");
  return v;
}

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(std::string s)
{
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && s[b] == ' ') ++b;
  return s.substr(b);
}

std::vector<std::string> lines_of(const std::string& text)
{
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(strip(line));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

json parse_json(const std::string& text, const std::string& origin)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin, std::string("malformed JSON (") + e.what() + ")");
  }
}

} // namespace

// JSON ------------------------------------------------------------------------

json to_json(const Waveform& w)
{
  return json{{"label", w.label()},
              {"sample_rate_hz", w.sample_rate_hz()},
              {"samples", std::vector<double>(w.samples().begin(), w.samples().end())}};
}

Waveform waveform_from_json(const json& j, const std::string& origin)
{
  const auto samples = field<std::vector<double>>(j, "samples", origin);
  const auto rate = field<double>(j, "sample_rate_hz", origin);
  const auto label = j.contains("label") ? field<std::string>(j, "label", origin)
                                         : std::string("waveform");
  return Waveform(Eigen::Map<const Eigen::VectorXd>(samples.data(),
                                                    static_cast<Eigen::Index>(samples.size())),
                  rate, label);
}

json to_json(const FrameSequence& f)
{
  json frames = json::array();
  for (Eigen::Index p = 0; p < f.frame_count(); ++p)
    frames.push_back(std::vector<double>(f.frames().col(p).begin(), f.frames().col(p).end()));
  return json{{"sample_rate_hz", f.sample_rate_hz()},
              {"K", f.frame_length()},
              {"S", f.hop()},
              {"frames", std::move(frames)}};
}

FrameSequence frames_from_json(const json& j, const std::string& origin)
{
  const auto rate = field<double>(j, "sample_rate_hz", origin);
  const auto K = field<long long>(j, "K", origin);
  const auto S = field<long long>(j, "S", origin);
  const auto frames = field<std::vector<std::vector<double>>>(j, "frames", origin);
  if (K <= 0) throw ValidationError(origin + ".K", "must be positive");
  if (frames.empty()) throw ValidationError(origin + ".frames", "at least one frame is required");
  Eigen::MatrixXd m(K, static_cast<Eigen::Index>(frames.size()));
  for (std::size_t p = 0; p < frames.size(); ++p) {
    if (static_cast<long long>(frames[p].size()) != K)
      throw ValidationError(origin + ".frames[" + std::to_string(p) + "]",
                            "has " + std::to_string(frames[p].size()) +
                                " entries, expected K=" + std::to_string(K));
    m.col(static_cast<Eigen::Index>(p)) =
        Eigen::Map<const Eigen::VectorXd>(frames[p].data(), K);
  }
  return FrameSequence(std::move(m), S, rate);
}

json to_json(const IeInterval& ie)
{
  return json{{"start_s", ie.start_s()},
              {"end_s", ie.end_s()},
              {"source", std::string(to_string(ie.source()))}};
}

IeInterval interval_from_json(const json& j, const std::string& origin)
{
  return IeInterval(field<double>(j, "start_s", origin), field<double>(j, "end_s", origin),
                    ie_source_from_string(field<std::string>(j, "source", origin)));
}

json to_json(const Transcript& t)
{
  json words = json::array();
  for (const auto& w : t.words())
    words.push_back({{"word", w.text()}, {"start", w.start_s()}, {"end", w.end_s()}});
  return json{{"audio_duration_s", t.audio_duration_s()}, {"words", std::move(words)}};
}

Transcript transcript_from_json(const json& j, const std::string& origin)
{
  const auto duration = field<double>(j, "audio_duration_s", origin);
  const auto words_json = field<json>(j, "words", origin);
  if (!words_json.is_array()) throw ValidationError(origin + ".words", "expected an array");
  std::vector<TimedWord> words;
  for (std::size_t i = 0; i < words_json.size(); ++i) {
    const std::string where = origin + ".words[" + std::to_string(i) + "]";
    try {
      words.emplace_back(field<std::string>(words_json[i], "word", where),
                         field<double>(words_json[i], "start", where),
                         field<double>(words_json[i], "end", where));
    } catch (const ValidationError& e) {
      if (e.field().rfind(origin, 0) == 0) throw;
      throw ValidationError(where + "." + e.field(), e.message());
    }
  }
  return Transcript(std::move(words), duration);
}

json to_json(const DetectorConfig& c)
{
  return json{{"filter_order", c.filter_order},
              {"band_low_hz", c.band_low_hz},
              {"band_high_hz", c.band_high_hz},
              {"min_separation_s", c.min_separation_s},
              {"prominence_threshold", c.prominence_threshold},
              {"pause_threshold_s", c.pause_threshold_s},
              {"orientation",
               c.orientation == IeOrientation::min_to_max ? "min_to_max" : "max_to_min"},
              {"refine_on_input", c.refine_on_input}};
}

DetectorConfig detector_config_from_json(const json& j)
{
  DetectorConfig c;
  const std::string o = "detector";
  c.filter_order = field<int>(j, "filter_order", o);
  c.band_low_hz = field<double>(j, "band_low_hz", o);
  c.band_high_hz = field<double>(j, "band_high_hz", o);
  c.min_separation_s = field<double>(j, "min_separation_s", o);
  c.prominence_threshold = field<double>(j, "prominence_threshold", o);
  c.pause_threshold_s = field<double>(j, "pause_threshold_s", o);
  const auto orientation = field<std::string>(j, "orientation", o);
  if (orientation == "min_to_max")
    c.orientation = IeOrientation::min_to_max;
  else if (orientation == "max_to_min")
    c.orientation = IeOrientation::max_to_min;
  else
    throw ValidationError("detector.orientation", "must be min_to_max or max_to_min");
  c.refine_on_input = field<bool>(j, "refine_on_input", o);
  c.validate();
  return c;
}

json to_json(const SynthConfig& c)
{
  return json{{"duration_s", c.duration_s},
              {"sample_rate_hz", c.sample_rate_hz},
              {"speech_resp_rate_hz", c.speech_resp_rate_hz},
              {"ie_duration_mean_s", c.ie_duration_mean_s},
              {"ie_duration_jitter_s", c.ie_duration_jitter_s},
              {"first_ie_offset_s", c.first_ie_offset_s},
              {"amplitude", c.amplitude},
              {"drift_per_s", c.drift_per_s},
              {"noise_sigma", c.noise_sigma},
              {"seed", c.seed},
              {"grammatical_fraction", c.grammatical_fraction},
              {"word_duration_s", c.word_duration_s},
              {"word_gap_s", c.word_gap_s},
              {"spurious_stop_rate_hz", c.spurious_stop_rate_hz},
              {"spurious_gap_min_s", c.spurious_gap_min_s},
              {"spurious_gap_max_s", c.spurious_gap_max_s}};
}

// Files -----------------------------------------------------------------------

std::string read_text(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return ss.str();
}

void atomic_write(const fs::path& path, const std::string& content)
{
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

Waveform read_waveform(const fs::path& path)
{
  const std::string text = read_text(path);
  const std::string origin = path.string();
  if (path.extension() == ".json") return waveform_from_json(parse_json(text, origin), origin);

  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "time_s,value")
    throw ValidationError(origin + ":1", "expected header 'time_s,value'");
  std::vector<double> times, values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = origin + ":" + std::to_string(i + 1);
    const auto cells = split_csv(lines[i]);
    if (cells.size() != 2) throw ValidationError(where, "expected 2 columns");
    times.push_back(parse_number(cells[0], where + " time_s"));
    values.push_back(parse_number(cells[1], where + " value"));
  }
  if (values.size() < 2)
    throw ValidationError(origin, "a CSV waveform needs at least two rows to fix its sample rate");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw ValidationError(origin + " time_s", "times must increase");
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times.front() + dt * static_cast<double>(i);
    if (std::abs(times[i] - expected) > 1e-6)
      throw ValidationError(origin + ":" + std::to_string(i + 2) + " time_s",
                            "sample times are not uniform within 1e-6 s");
  }
  double rate = 1.0 / dt;
  // printed times carry rounding; 1/0.02 should read back as 50 Hz
  if (std::abs(rate - std::round(rate)) < 1e-6 * rate) rate = std::round(rate);
  return Waveform(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                    static_cast<Eigen::Index>(values.size())),
                  rate, path.stem().string());
}

std::string format_waveform_csv(const Waveform& w)
{
  std::string out = "time_s,value\n";
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    out += format_double(w.time_of(i));
    out += ',';
    out += format_double(w.samples()(i));
    out += '\n';
  }
  return out;
}

void write_waveform(const fs::path& path, const Waveform& w,
                    std::optional<std::pair<Eigen::Index, Eigen::Index>> interior)
{
  if (path.extension() == ".json") {
    json j = to_json(w);
    if (interior) j["interior"] = {interior->first, interior->second};
    atomic_write(path, j.dump() + "\n");
  } else {
    atomic_write(path, format_waveform_csv(w));
  }
}

FrameSequence read_frames(const fs::path& path)
{
  return frames_from_json(parse_json(read_text(path), path.string()), path.string());
}

void write_frames(const fs::path& path, const FrameSequence& f)
{
  atomic_write(path, to_json(f).dump() + "\n");
}

Transcript read_transcript(const fs::path& path)
{
  return transcript_from_json(parse_json(read_text(path), path.string()), path.string());
}

void write_transcript(const fs::path& path, const Transcript& t)
{
  atomic_write(path, to_json(t).dump(1) + "\n");
}

std::vector<IeInterval> parse_intervals_csv(const std::string& text, const std::string& origin)
{
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != "start_s,end_s,source")
    throw ValidationError(origin + ":1", "expected header 'start_s,end_s,source'");
  std::vector<IeInterval> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = origin + ":" + std::to_string(i + 1);
    const auto cells = split_csv(lines[i]);
    if (cells.size() != 3) throw ValidationError(where, "expected 3 columns");
    try {
      out.emplace_back(parse_number(cells[0], where + " start_s"),
                       parse_number(cells[1], where + " end_s"),
                       ie_source_from_string(strip(cells[2])));
    } catch (const ValidationError& e) {
      if (e.field().rfind(origin, 0) == 0) throw;
      throw ValidationError(where + " " + e.field(), e.message());
    }
  }
  return out;
}

std::vector<IeInterval> read_intervals(const fs::path& path)
{
  return parse_intervals_csv(read_text(path), path.string());
}

std::string format_intervals_csv(const std::vector<IeInterval>& intervals)
{
  std::string out = "start_s,end_s,source\n";
  for (const auto& ie : intervals) {
    out += format_double(ie.start_s());
    out += ',';
    out += format_double(ie.end_s());
    out += ',';
    out += to_string(ie.source());
    out += '\n';
  }
  return out;
}

void write_intervals(const fs::path& path, const std::vector<IeInterval>& intervals)
{
  atomic_write(path, format_intervals_csv(intervals));
}

// TOML ------------------------------------------------------------------------

namespace {

toml::table parse_toml(const std::string& text, const std::string& origin,
                       const char* section)
{
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "malformed TOML: " << e.description();
    throw ValidationError(origin + ":" + std::to_string(e.source().begin.line), msg.str());
  }
  if (auto* sub = root[section].as_table()) return *sub;
  return root;
}

using Setter = std::function<void(const toml::node&, const std::string&)>;

template <typename T> Setter setter(T& target)
{
  return [&target](const toml::node& node, const std::string& where) {
    std::optional<T> v;
    if constexpr (std::is_same_v<T, double>) {
      v = node.value<double>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (node.is_boolean()) v = node.value<bool>();
    } else {
      if (node.is_integer()) v = static_cast<T>(*node.value<std::int64_t>());
    }
    if (!v) throw ValidationError(where, "has the wrong type");
    target = *v;
  };
}

void apply_table(const toml::table& table, const std::map<std::string, Setter>& setters,
                 const std::string& origin)
{
  for (const auto& [key, node] : table) {
    const std::string name(key.str());
    const auto it = setters.find(name);
    if (it == setters.end()) {
      if (node.is_table()) continue; // other sections in a shared file
      throw ValidationError(origin + " " + name, "unknown configuration key");
    }
    it->second(node, origin + " " + name);
  }
}

} // namespace

DetectorConfig parse_detector_config(const std::string& text, const std::string& origin)
{
  const auto table = parse_toml(text, origin, "detector");
  DetectorConfig c;
  std::string orientation = "min_to_max";
  std::map<std::string, Setter> setters{
      {"filter_order", setter(c.filter_order)},
      {"band_low_hz", setter(c.band_low_hz)},
      {"band_high_hz", setter(c.band_high_hz)},
      {"min_separation_s", setter(c.min_separation_s)},
      {"prominence_threshold", setter(c.prominence_threshold)},
      {"pause_threshold_s", setter(c.pause_threshold_s)},
      {"refine_on_input", setter(c.refine_on_input)},
      {"orientation",
       [&](const toml::node& node, const std::string& where) {
         const auto s = node.value<std::string>();
         if (!s || (*s != "min_to_max" && *s != "max_to_min"))
           throw ValidationError(where, "must be \"min_to_max\" or \"max_to_min\"");
         orientation = *s;
       }},
  };
  apply_table(table, setters, origin);
  c.orientation =
      orientation == "min_to_max" ? IeOrientation::min_to_max : IeOrientation::max_to_min;
  c.validate();
  return c;
}

SynthConfig parse_synth_config(const std::string& text, const std::string& origin)
{
  const auto table = parse_toml(text, origin, "synth");
  SynthConfig c;
  std::map<std::string, Setter> setters{
      {"duration_s", setter(c.duration_s)},
      {"sample_rate_hz", setter(c.sample_rate_hz)},
      {"speech_resp_rate_hz", setter(c.speech_resp_rate_hz)},
      {"ie_duration_mean_s", setter(c.ie_duration_mean_s)},
      {"ie_duration_jitter_s", setter(c.ie_duration_jitter_s)},
      {"first_ie_offset_s", setter(c.first_ie_offset_s)},
      {"amplitude", setter(c.amplitude)},
      {"drift_per_s", setter(c.drift_per_s)},
      {"noise_sigma", setter(c.noise_sigma)},
      {"seed", setter(c.seed)},
      {"grammatical_fraction", setter(c.grammatical_fraction)},
      {"word_duration_s", setter(c.word_duration_s)},
      {"word_gap_s", setter(c.word_gap_s)},
      {"spurious_stop_rate_hz", setter(c.spurious_stop_rate_hz)},
      {"spurious_gap_min_s", setter(c.spurious_gap_min_s)},
      {"spurious_gap_max_s", setter(c.spurious_gap_max_s)},
  };
  apply_table(table, setters, origin);
  return c;
}

DetectorConfig read_detector_config(const fs::path& path)
{
  return parse_detector_config(read_text(path), path.string());
}

SynthConfig read_synth_config(const fs::path& path)
{
  return parse_synth_config(read_text(path), path.string());
}

std::string sha256_hex(const std::string& bytes)
{
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

} // namespace breathkit::io
