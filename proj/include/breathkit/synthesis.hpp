#pragma once

#include "breathkit/transcript.hpp"
#include "breathkit/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace breathkit {

/// Parameters of the synthetic speech-breathing generator. Defaults give a
/// 0.1 Hz speaking breath rhythm with 225 ms inspirations.
struct SynthConfig
{
  double duration_s = 120.0;
  double sample_rate_hz = 50.0;
  double speech_resp_rate_hz = 0.1;
  double ie_duration_mean_s = 0.225;
  double ie_duration_jitter_s = 0.02; // uniform half-width
  double first_ie_offset_s = -1.0;    // negative: half a breathing period
  double amplitude = 1.0;
  double drift_per_s = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  double grammatical_fraction = 1.0;
  double word_duration_s = 0.30;
  double word_gap_s = 0.08;
  double spurious_stop_rate_hz = 0.0;
  double spurious_gap_min_s = 0.10;
  double spurious_gap_max_s = 0.40;

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const SynthConfig&) const = default;
};

struct SynthBreathing
{
  Waveform waveform;
  std::vector<IeInterval> truth;
};

/// Sawtooth-like belt signal: raised-cosine rise over each planted IE, linear
/// fall until the next one, plus linear drift and white Gaussian noise. The
/// returned intervals are the exact planted rises.
SynthBreathing synth_breathing(const SynthConfig& config);

/// Words fill the time outside the planted IEs. Each IE gap follows a
/// punctuated word with probability `grammatical_fraction`; extra punctuated
/// pauses that hold no IE arrive as a Poisson process at
/// `spurious_stop_rate_hz`.
Transcript synth_transcript(const std::vector<IeInterval>& truth, const SynthConfig& config);

} // namespace breathkit
