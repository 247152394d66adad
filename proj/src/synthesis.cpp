#include "breathkit/synthesis.hpp"

#include "breathkit/errors.hpp"
#include "breathkit/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace breathkit {

void SynthConfig::validate() const
{
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be positive");
  };
  positive(duration_s, "duration_s");
  positive(sample_rate_hz, "sample_rate_hz");
  positive(speech_resp_rate_hz, "speech_resp_rate_hz");
  positive(ie_duration_mean_s, "ie_duration_mean_s");
  positive(amplitude, "amplitude");
  positive(word_duration_s, "word_duration_s");
  positive(word_gap_s, "word_gap_s");
  if (!(ie_duration_jitter_s >= 0.0 && ie_duration_jitter_s < ie_duration_mean_s))
    throw ValidationError("ie_duration_jitter_s", "must lie in [0, ie_duration_mean_s)");
  if (!(ie_duration_mean_s + ie_duration_jitter_s < 1.0 / speech_resp_rate_hz))
    throw ValidationError("ie_duration_mean_s", "inspiration longer than the breathing period");
  if (!std::isfinite(drift_per_s)) throw ValidationError("drift_per_s", "must be finite");
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma", "must be >= 0");
  if (!(grammatical_fraction >= 0.0 && grammatical_fraction <= 1.0))
    throw ValidationError("grammatical_fraction", "must lie in [0, 1]");
  if (!(spurious_stop_rate_hz >= 0.0))
    throw ValidationError("spurious_stop_rate_hz", "must be >= 0");
  if (!(spurious_gap_min_s > 0.0 && spurious_gap_max_s >= spurious_gap_min_s))
    throw ValidationError("spurious_gap_max_s", "need 0 < spurious_gap_min_s <= spurious_gap_max_s");
  if (duration_s < 2.0 / speech_resp_rate_hz)
    throw ValidationError("duration_s", "must cover at least two breathing cycles");
  const double period = 1.0 / speech_resp_rate_hz;
  if (first_ie_offset_s >= period)
    throw ValidationError("first_ie_offset_s", "must be shorter than one breathing period");
}

namespace {

// Separate deterministic streams for the waveform and the transcript.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt)
{
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

constexpr std::array<const char*, 24> kLexicon{
    "when", "the",   "sunlight", "strikes",  "raindrops", "in",
    "air",  "they",  "act",      "as",       "prism",     "and",
    "form", "a",     "rainbow",  "division", "of",        "white",
    "light","into",  "many",     "beautiful","colors",    "project"};

} // namespace

SynthBreathing synth_breathing(const SynthConfig& cfg)
{
  cfg.validate();
  const double period = 1.0 / cfg.speech_resp_rate_hz;
  const double offset = cfg.first_ie_offset_s >= 0.0 ? cfg.first_ie_offset_s : period / 2.0;
  auto rng = stream(cfg.seed, 1);
  std::uniform_real_distribution<double> jitter(-cfg.ie_duration_jitter_s,
                                                cfg.ie_duration_jitter_s);

  std::vector<IeInterval> truth;
  for (int k = 0;; ++k) {
    const double start = offset + k * period;
    const double d = cfg.ie_duration_mean_s + jitter(rng);
    if (start + d > cfg.duration_s) break;
    truth.emplace_back(start, start + d, IeSource::synthetic);
  }

  const auto n = static_cast<Eigen::Index>(std::floor(cfg.duration_s * cfg.sample_rate_hz));
  Eigen::VectorXd x(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double low = -cfg.amplitude / 2.0;
  const double high = cfg.amplitude / 2.0;

  std::size_t next = 0; // first IE starting after t
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / cfg.sample_rate_hz;
    while (next < truth.size() && truth[next].start_s() <= t) ++next;
    double v;
    if (next > 0 && t <= truth[next - 1].end_s()) {
      const auto& ie = truth[next - 1];
      const double u = (t - ie.start_s()) / ie.duration_s();
      v = low + (high - low) * (0.5 - 0.5 * std::cos(std::numbers::pi * u));
    } else {
      // linear fall from the last peak to the next onset
      const double peak_t = next > 0 ? truth[next - 1].end_s()
                                     : truth.front().start_s() - period + cfg.ie_duration_mean_s;
      const double onset_t = next < truth.size() ? truth[next].start_s()
                                                 : truth.back().start_s() + period;
      v = high - (high - low) * (t - peak_t) / (onset_t - peak_t);
    }
    x(i) = v + cfg.drift_per_s * t;
  }
  if (cfg.noise_sigma > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) x(i) += cfg.noise_sigma * gauss(rng);

  return {Waveform(std::move(x), cfg.sample_rate_hz, "synthetic_belt"), std::move(truth)};
}

Transcript synth_transcript(const std::vector<IeInterval>& truth, const SynthConfig& cfg)
{
  cfg.validate();
  require_sorted_disjoint(truth, "truth");
  auto rng = stream(cfg.seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_word(0, kLexicon.size() - 1);
  auto stop_mark = [&] { return unit(rng) < 0.5 ? std::string(".") : std::string(","); };

  std::vector<TimedWord> words;

  // Lays words over [from, to]; the last word ends exactly at `to`.
  // `close_with_stop` punctuates that last word.
  auto fill = [&](double from, double to, bool close_with_stop) {
    const double span = to - from;
    if (!(span > 0.0)) return;
    const auto n_words = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround((span + cfg.word_gap_s) /
                                                (cfg.word_duration_s + cfg.word_gap_s))));
    const std::size_t n_gaps = n_words - 1;

    std::poisson_distribution<std::size_t> arrivals(cfg.spurious_stop_rate_hz * span);
    std::size_t n_spurious = cfg.spurious_stop_rate_hz > 0.0 ? arrivals(rng) : 0;
    n_spurious = std::min(n_spurious, n_gaps);

    std::vector<bool> spurious(n_gaps, false);
    std::vector<double> gap(n_gaps);
    std::vector<std::size_t> order(n_gaps);
    for (std::size_t g = 0; g < n_gaps; ++g) order[g] = g;
    std::shuffle(order.begin(), order.end(), rng);
    double fixed = 0.0;
    for (std::size_t k = 0; k < n_spurious; ++k) {
      const double len = cfg.spurious_gap_min_s +
                         (cfg.spurious_gap_max_s - cfg.spurious_gap_min_s) * unit(rng);
      if (fixed + len > 0.5 * span) break;
      spurious[order[k]] = true;
      gap[order[k]] = len;
      fixed += len;
    }

    std::vector<double> word_len(n_words);
    double flexible = 0.0;
    for (auto& w : word_len) flexible += (w = cfg.word_duration_s * (0.7 + 0.6 * unit(rng)));
    for (std::size_t g = 0; g < n_gaps; ++g)
      if (!spurious[g]) flexible += (gap[g] = cfg.word_gap_s * (0.75 + 0.5 * unit(rng)));
    const double scale = (span - fixed) / flexible;

    double t = from;
    for (std::size_t w = 0; w < n_words; ++w) {
      const bool last = w + 1 == n_words;
      const double end = last ? to : t + word_len[w] * scale;
      std::string text = kLexicon[pick_word(rng)];
      if ((last && close_with_stop) || (!last && spurious[w])) text += stop_mark();
      words.emplace_back(std::move(text), t, end);
      if (!last) t = end + (spurious[w] ? gap[w] : gap[w] * scale);
    }
  };

  double cursor = 0.0;
  for (const auto& ie : truth) {
    const bool grammatical = unit(rng) < cfg.grammatical_fraction;
    fill(cursor, ie.start_s(), grammatical);
    cursor = ie.end_s();
  }
  fill(cursor, cfg.duration_s, false);
  return Transcript(std::move(words), cfg.duration_s);
}

} // namespace breathkit
