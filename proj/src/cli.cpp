#include "breathkit/cli.hpp"

#include "breathkit/detection.hpp"
#include "breathkit/errors.hpp"
#include "breathkit/evaluation.hpp"
#include "breathkit/io.hpp"
#include "breathkit/synthesis.hpp"
#include "breathkit/transcript.hpp"
#include "breathkit/version.hpp"
#include "breathkit/vrbola.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace breathkit::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Stages every output next to its destination, then renames them all, so a
// failing command leaves no partial result behind.
void commit_outputs(const std::vector<std::pair<fs::path, std::string>>& outputs)
{
  std::random_device rd;
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& [tmp, dest] : staged) fs::remove(tmp, ec);
  };
  try {
    for (const auto& [dest, content] : outputs) {
      fs::path tmp = dest;
      tmp += ".tmp" + std::to_string(rd());
      staged.emplace_back(tmp, dest);
      io::atomic_write(tmp, content);
    }
  } catch (...) {
    cleanup();
    throw;
  }
  for (const auto& [tmp, dest] : staged) {
    std::error_code ec;
    fs::rename(tmp, dest, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot move output into place at '" + dest.string() + "'");
    }
  }
}

template <typename T> void override_if(const std::optional<T>& flag, T& target)
{
  if (flag) target = *flag;
}

// detect ----------------------------------------------------------------------

struct DetectArgs
{
  std::string waveform;
  std::string output;
  std::string config;
  std::string stats;
  std::string source = "belt";
  std::optional<int> filter_order;
  std::optional<double> band_low, band_high, min_separation, prominence;
  std::optional<std::string> orientation;
  bool no_refine = false;
};

ordered_json stats_json(const BreathingStats& stats)
{
  ordered_json j;
  j["n_events"] = stats.n_events;
  j["breathing_rate_hz"] =
      stats.breathing_rate_hz ? ordered_json(*stats.breathing_rate_hz) : ordered_json(nullptr);
  j["ie_durations_s"] = stats.ie_durations_s;
  return j;
}

int cmd_detect(const DetectArgs& a, std::ostream& out)
{
  DetectorConfig cfg = a.config.empty() ? DetectorConfig{} : io::read_detector_config(a.config);
  override_if(a.filter_order, cfg.filter_order);
  override_if(a.band_low, cfg.band_low_hz);
  override_if(a.band_high, cfg.band_high_hz);
  override_if(a.min_separation, cfg.min_separation_s);
  override_if(a.prominence, cfg.prominence_threshold);
  if (a.orientation) {
    if (*a.orientation == "min_to_max")
      cfg.orientation = IeOrientation::min_to_max;
    else if (*a.orientation == "max_to_min")
      cfg.orientation = IeOrientation::max_to_min;
    else
      throw ValidationError("--orientation", "must be min_to_max or max_to_min");
  }
  if (a.no_refine) cfg.refine_on_input = false;

  const Waveform w = io::read_waveform(a.waveform);
  const auto result = detect_ies(w, cfg, ie_source_from_string(a.source));

  std::vector<std::pair<fs::path, std::string>> outputs{
      {a.output, io::format_intervals_csv(result.events)}};
  ordered_json stats = stats_json(result.stats);
  if (!a.stats.empty()) {
    ordered_json doc;
    doc["tool"] = "breathkit";
    doc["version"] = kVersion;
    doc["input"] = a.waveform;
    doc["config"] = io::to_json(cfg);
    doc["stats"] = stats;
    outputs.emplace_back(a.stats, doc.dump(2) + "\n");
  }
  commit_outputs(outputs);

  out << "detected " << result.stats.n_events << " inspiration events";
  if (result.stats.breathing_rate_hz)
    out << ", breathing rate " << std::setprecision(4) << *result.stats.breathing_rate_hz
        << " Hz";
  out << "\n";
  return kExitOk;
}

// reconstruct -----------------------------------------------------------------

struct ReconstructArgs
{
  std::string frames;
  std::string output;
  std::string mode = "ola";
  std::string window = "squared_sine";
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out)
{
  const FrameSequence frames = io::read_frames(a.frames);
  std::string content;
  const bool as_json = fs::path(a.output).extension() == ".json";
  if (a.mode == "ola") {
    const WindowSpec spec{window_shape_from_string(a.window), frames.frame_length(),
                          frames.hop()};
    const auto rec = overlap_add(frames, spec);
    if (as_json) {
      auto j = io::to_json(rec.waveform);
      j["interior"] = {rec.interior_begin, rec.interior_end};
      content = j.dump() + "\n";
    } else {
      content = io::format_waveform_csv(rec.waveform);
    }
    out << "overlap-add: " << rec.waveform.size() << " samples, interior ["
        << rec.interior_begin << ", " << rec.interior_end << ")\n";
  } else if (a.mode == "concat") {
    const Waveform w = concatenate(frames);
    content = as_json ? io::to_json(w).dump() + "\n" : io::format_waveform_csv(w);
    out << "concatenate: " << w.size() << " samples\n";
  } else {
    throw ValidationError("--mode", "must be ola or concat");
  }
  commit_outputs({{a.output, content}});
  return kExitOk;
}

// eval ------------------------------------------------------------------------

struct EvalArgs
{
  std::vector<std::string> pairs;
  std::string manifest;
  std::string output;
  std::string plot_prefix;
  std::string gaps = "interior";
  double slack = 0.0;
  double bin_width = 0.05;
};

ordered_json counts_json(const ConfusionCounts& c)
{
  return ordered_json{{"tp", c.tp}, {"tn", c.tn}, {"fp", c.fp}, {"fn", c.fn}};
}

ordered_json metrics_json(const MetricSet& m)
{
  auto val = [](const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  return ordered_json{{"sensitivity", val(m.sensitivity)},
                      {"specificity", val(m.specificity)},
                      {"f1", val(m.f1)}};
}

ordered_json display_json(const MetricSet& m)
{
  return ordered_json{{"sensitivity", format_metric(m.sensitivity)},
                      {"specificity", format_metric(m.specificity)},
                      {"f1", format_metric(m.f1)}};
}

ordered_json histogram_json(const DurationHistogram& h)
{
  return ordered_json{{"bin_start_s", h.bin_start_s},
                      {"bin_width_s", h.bin_width_s},
                      {"bin_counts", h.bin_counts}};
}

struct Recording
{
  std::string name;
  std::string estimates_path, truth_path;
  std::vector<IeInterval> estimates, truth;
  std::string estimates_digest, truth_digest;
};

Recording load_recording(const std::string& est_path, const std::string& truth_path)
{
  Recording r;
  r.name = fs::path(est_path).stem().string();
  r.estimates_path = est_path;
  r.truth_path = truth_path;
  const std::string est_text = io::read_text(est_path);
  const std::string truth_text = io::read_text(truth_path);
  r.estimates = io::parse_intervals_csv(est_text, est_path);
  r.truth = io::parse_intervals_csv(truth_text, truth_path);
  require_sorted_disjoint(r.estimates, est_path);
  require_sorted_disjoint(r.truth, truth_path);
  r.estimates_digest = io::sha256_hex(est_text);
  r.truth_digest = io::sha256_hex(truth_text);
  return r;
}

std::string metrics_line(const std::string& name, const ConfusionCounts& c)
{
  const auto m = metrics(c);
  std::ostringstream os;
  os << name << ": tp=" << c.tp << " tn=" << c.tn << " fp=" << c.fp << " fn=" << c.fn
     << "  sensitivity " << format_metric(m.sensitivity) << "  specificity "
     << format_metric(m.specificity) << "  F1 " << format_metric(m.f1);
  return os.str();
}

int cmd_eval(const EvalArgs& a, std::ostream& out)
{
  std::vector<std::pair<std::string, std::string>> inputs;
  if (a.pairs.size() % 2 != 0)
    throw ValidationError("inputs", "expected estimate/truth file pairs");
  for (std::size_t i = 0; i < a.pairs.size(); i += 2)
    inputs.emplace_back(a.pairs[i], a.pairs[i + 1]);
  if (!a.manifest.empty()) {
    std::istringstream lines(io::read_text(a.manifest));
    std::string line;
    int line_no = 0;
    const fs::path base = fs::path(a.manifest).parent_path();
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      std::istringstream fields(line);
      std::string est, truth, extra;
      if (!(fields >> est >> truth) || (fields >> extra))
        throw ValidationError(a.manifest + ":" + std::to_string(line_no),
                              "expected '<estimates> <truth>'");
      auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (base / p).string();
      };
      inputs.emplace_back(resolve(est), resolve(truth));
    }
  }
  if (inputs.empty()) throw ValidationError("inputs", "no estimate/truth pairs given");

  ScoreOptions options;
  options.overlap_slack_s = a.slack;
  if (a.gaps == "interior")
    options.gaps = GapUniverse::interior;
  else if (a.gaps == "with_outer")
    options.gaps = GapUniverse::with_outer;
  else
    throw ValidationError("--gaps", "must be interior or with_outer");

  std::vector<Recording> recordings;
  for (const auto& [est, truth] : inputs) recordings.push_back(load_recording(est, truth));

  ordered_json report;
  report["tool"] = "breathkit";
  report["version"] = kVersion;
  report["config"] = {{"overlap_slack_s", options.overlap_slack_s},
                      {"gap_universe", a.gaps},
                      {"bin_width_s", a.bin_width}};
  report["inputs"] = ordered_json::array();
  report["recordings"] = ordered_json::array();

  ConfusionCounts corpus;
  std::vector<IeInterval> all_truth, all_estimates;
  std::string overlay = "recording,kind,start_s,end_s,matched\n";
  for (const auto& r : recordings) {
    const auto counts = score(r.estimates, r.truth, options);
    corpus += counts;
    report["inputs"].push_back({{"estimates", r.estimates_path},
                                {"estimates_sha256", r.estimates_digest},
                                {"truth", r.truth_path},
                                {"truth_sha256", r.truth_digest}});
    ordered_json rec;
    rec["name"] = r.name;
    rec["counts"] = counts_json(counts);
    rec["metrics"] = metrics_json(metrics(counts));
    rec["display"] = display_json(metrics(counts));
    rec["histograms"] = {{"truth", histogram_json(duration_histogram(r.truth, a.bin_width))},
                         {"estimates",
                          histogram_json(duration_histogram(r.estimates, a.bin_width))}};
    report["recordings"].push_back(std::move(rec));
    all_truth.insert(all_truth.end(), r.truth.begin(), r.truth.end());
    all_estimates.insert(all_estimates.end(), r.estimates.begin(), r.estimates.end());

    if (!a.plot_prefix.empty()) {
      auto emit = [&](const char* kind, const std::vector<IeInterval>& mine,
                      const std::vector<IeInterval>& other) {
        for (const auto& ie : mine) {
          bool matched = false;
          for (const auto& o : other) matched = matched || intervals_touch(ie, o, a.slack);
          overlay += r.name + "," + kind + "," + io::format_double(ie.start_s()) + "," +
                     io::format_double(ie.end_s()) + "," + (matched ? "1" : "0") + "\n";
        }
      };
      emit("truth", r.truth, r.estimates);
      emit("estimate", r.estimates, r.truth);
    }
  }

  const auto truth_hist = duration_histogram(all_truth, a.bin_width);
  const auto est_hist = duration_histogram(all_estimates, a.bin_width);
  report["corpus"] = {{"counts", counts_json(corpus)},
                      {"metrics", metrics_json(metrics(corpus))},
                      {"display", display_json(metrics(corpus))},
                      {"histograms",
                       {{"truth", histogram_json(truth_hist)},
                        {"estimates", histogram_json(est_hist)}}}};

  std::vector<std::pair<fs::path, std::string>> outputs{{a.output, report.dump(2) + "\n"}};
  if (!a.plot_prefix.empty()) {
    std::string hist = "bin_start_s,bin_end_s,truth_count,estimate_count\n";
    const std::size_t bins = std::max(truth_hist.bin_counts.size(), est_hist.bin_counts.size());
    for (std::size_t b = 0; b < bins; ++b) {
      const auto count = [b](const DurationHistogram& h) {
        return b < h.bin_counts.size() ? h.bin_counts[b] : std::size_t{0};
      };
      hist += io::format_double(static_cast<double>(b) * a.bin_width) + "," +
              io::format_double(static_cast<double>(b + 1) * a.bin_width) + "," +
              std::to_string(count(truth_hist)) + "," + std::to_string(count(est_hist)) + "\n";
    }
    outputs.emplace_back(a.plot_prefix + "_histogram.csv", hist);
    outputs.emplace_back(a.plot_prefix + "_overlay.csv", overlay);
  }
  commit_outputs(outputs);

  if (recordings.size() > 1)
    for (const auto& r : recordings)
      out << metrics_line(r.name, score(r.estimates, r.truth, options)) << "\n";
  out << metrics_line("corpus", corpus) << "\n";
  return kExitOk;
}

// synth -----------------------------------------------------------------------

struct SynthArgs
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string prefix;
  std::string waveform_ext = ".csv";
  std::optional<double> duration, rate, noise, drift, grammatical_fraction, spurious_stop_rate;
};

int cmd_synth(const SynthArgs& a, std::ostream& out)
{
  SynthConfig cfg = a.config.empty() ? SynthConfig{} : io::read_synth_config(a.config);
  if (!a.seed) throw ValidationError("--seed", "a seed is required");
  cfg.seed = *a.seed;
  override_if(a.duration, cfg.duration_s);
  override_if(a.rate, cfg.speech_resp_rate_hz);
  override_if(a.noise, cfg.noise_sigma);
  override_if(a.drift, cfg.drift_per_s);
  override_if(a.grammatical_fraction, cfg.grammatical_fraction);
  override_if(a.spurious_stop_rate, cfg.spurious_stop_rate_hz);
  cfg.validate();

  const auto belt = synth_breathing(cfg);
  const auto transcript = synth_transcript(belt.truth, cfg);

  const std::string wave_path = a.prefix + "_belt" + a.waveform_ext;
  const std::string wave_content = a.waveform_ext == ".json"
                                       ? io::to_json(belt.waveform).dump() + "\n"
                                       : io::format_waveform_csv(belt.waveform);
  commit_outputs({{wave_path, wave_content},
                  {a.prefix + "_truth.csv", io::format_intervals_csv(belt.truth)},
                  {a.prefix + "_transcript.json", io::to_json(transcript).dump(1) + "\n"}});
  out << "wrote " << wave_path << ", " << a.prefix << "_truth.csv (" << belt.truth.size()
      << " IEs), " << a.prefix << "_transcript.json (" << transcript.words().size()
      << " words)\n";
  return kExitOk;
}

// transcribe-ies --------------------------------------------------------------

struct TranscribeArgs
{
  std::string transcript;
  std::string output;
  std::string method;
  std::string config;
  std::optional<double> pause_threshold;
  std::string stop_marks{kDefaultStopMarks};
};

int cmd_transcribe_ies(const TranscribeArgs& a, std::ostream& out)
{
  DetectorConfig cfg = a.config.empty() ? DetectorConfig{} : io::read_detector_config(a.config);
  override_if(a.pause_threshold, cfg.pause_threshold_s);
  cfg.validate();
  const Transcript t = io::read_transcript(a.transcript);
  std::vector<IeInterval> ies;
  if (a.method == "word")
    ies = asr_word_ies(t, cfg.pause_threshold_s);
  else if (a.method == "punct")
    ies = asr_punct_ies(t, a.stop_marks);
  else
    throw ValidationError("--method", "must be word or punct");
  commit_outputs({{a.output, io::format_intervals_csv(ies)}});
  out << a.method << ": " << ies.size() << " IE candidates\n";
  return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Breathing-waveform analysis: inspiration-event detection, overlap-add "
               "reconstruction, transcript methods and scoring",
               "breathkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  DetectArgs detect;
  auto* d = app.add_subcommand("detect", "Detect inspiration events in a belt/VRB waveform");
  d->add_option("waveform", detect.waveform, "Waveform file (.csv or .json)")->required();
  d->add_option("-o,--output", detect.output, "Intervals CSV to write")->required();
  d->add_option("-c,--config", detect.config, "Detector TOML config");
  d->add_option("--stats", detect.stats, "Write breathing statistics JSON here");
  d->add_option("--source", detect.source, "Source tag for the intervals (belt, vrb, vrbola)");
  d->add_option("--filter-order", detect.filter_order);
  d->add_option("--band-low", detect.band_low, "Lower band edge, Hz");
  d->add_option("--band-high", detect.band_high, "Upper band edge, Hz");
  d->add_option("--min-separation", detect.min_separation, "Seconds");
  d->add_option("--prominence", detect.prominence, "Normalised prominence threshold");
  d->add_option("--orientation", detect.orientation, "min_to_max or max_to_min");
  d->add_flag("--no-refine", detect.no_refine,
              "Report extremum times of the filtered signal without refinement");

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct", "Rebuild a waveform from framewise outputs");
  r->add_option("frames", rec.frames, "Frames JSON")->required();
  r->add_option("-o,--output", rec.output, "Waveform file to write")->required();
  r->add_option("--mode", rec.mode, "ola (overlap-add) or concat");
  r->add_option("--window", rec.window, "squared_sine or rectangular");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score estimated IEs against ground truth");
  e->add_option("pairs", eval.pairs, "Alternating estimates/truth interval files");
  e->add_option("--manifest", eval.manifest, "File of '<estimates> <truth>' lines");
  e->add_option("-o,--output", eval.output, "Report JSON to write")->required();
  e->add_option("--emit-plot-data", eval.plot_prefix,
                "Write <prefix>_histogram.csv and <prefix>_overlay.csv");
  e->add_option("--gaps", eval.gaps, "True-negative regions: interior or with_outer");
  e->add_option("--slack", eval.slack, "Overlap slack in seconds");
  e->add_option("--bin-width", eval.bin_width, "Histogram bin width in seconds");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic belt waveform, truth and transcript");
  s->add_option("-c,--config", synth.config, "Synthesis TOML config");
  s->add_option("--seed", synth.seed, "Random seed")->required();
  s->add_option("--out-prefix", synth.prefix, "Output path prefix")->required();
  s->add_option("--waveform-ext", synth.waveform_ext, ".csv or .json");
  s->add_option("--duration", synth.duration, "Seconds");
  s->add_option("--rate", synth.rate, "Breathing rate during speech, Hz");
  s->add_option("--noise", synth.noise, "Gaussian noise sigma");
  s->add_option("--drift", synth.drift, "Linear drift per second");
  s->add_option("--grammatical-fraction", synth.grammatical_fraction);
  s->add_option("--spurious-stop-rate", synth.spurious_stop_rate, "Hz");

  TranscribeArgs tr;
  auto* t = app.add_subcommand("transcribe-ies", "IE candidates from a time-aligned transcript");
  t->add_option("transcript", tr.transcript, "Transcript JSON")->required();
  t->add_option("-o,--output", tr.output, "Intervals CSV to write")->required();
  t->add_option("--method", tr.method, "word or punct")->required();
  t->add_option("-c,--config", tr.config, "Detector TOML config");
  t->add_option("--pause-threshold", tr.pause_threshold, "Seconds");
  t->add_option("--stop-marks", tr.stop_marks, "Characters that end a clause");

  std::vector<std::string> storage{"breathkit"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*d) return cmd_detect(detect, out);
    if (*r) return cmd_reconstruct(rec, out);
    if (*e) return cmd_eval(eval, out);
    if (*s) return cmd_synth(synth, out);
    if (*t) return cmd_transcribe_ies(tr, out);
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const IoError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitNumerical;
  }
  return kExitValidation;
}

} // namespace breathkit::cli
