#pragma once

#include "breathkit/extrema.hpp"
#include "breathkit/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace breathkit {

struct BreathingStats
{
  std::optional<double> breathing_rate_hz; // absent with fewer than two maxima
  std::size_t n_events = 0;
  std::vector<double> ie_durations_s;
};

struct Detection
{
  std::vector<IeInterval> events;
  BreathingStats stats;
  std::vector<Extremum> extrema; // on the filtered signal
};

/// 1 / mean spacing of successive maxima.
std::optional<double> breathing_rate(std::span<const double> maxima_times_s);

/// Band-pass the signal, pick alternating extrema and pair each opening
/// extremum with the next one of the opposite kind. Belt and reconstructed
/// signals go through this same path.
Detection detect_ies(const Waveform& signal, const DetectorConfig& config,
                     IeSource source = IeSource::belt);

} // namespace breathkit
