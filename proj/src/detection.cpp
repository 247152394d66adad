#include "breathkit/detection.hpp"

#include "breathkit/bandpass.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace breathkit {

std::optional<double> breathing_rate(std::span<const double> maxima_times_s)
{
  if (maxima_times_s.size() < 2) return std::nullopt;
  const double span = maxima_times_s.back() - maxima_times_s.front();
  const double mean_gap = span / static_cast<double>(maxima_times_s.size() - 1);
  if (!(mean_gap > 0.0)) return std::nullopt;
  return 1.0 / mean_gap;
}

namespace {

// Returns the first index of the extreme value in [lo, hi].
Eigen::Index arg_extreme(const Eigen::VectorXd& x, Eigen::Index lo, Eigen::Index hi,
                         bool want_max)
{
  Eigen::Index best = lo;
  for (Eigen::Index i = lo + 1; i <= hi; ++i)
    if (want_max ? x(i) > x(best) : x(i) < x(best)) best = i;
  return best;
}

// White-noise standard deviation from the median absolute third difference.
// Third differences cancel locally quadratic signal, so smooth breathing
// curvature is not mistaken for noise; the median ignores the kinks.
double noise_sigma(const Eigen::VectorXd& x)
{
  if (x.size() < 4) return 0.0;
  std::vector<double> d(static_cast<std::size_t>(x.size() - 3));
  for (Eigen::Index i = 0; i + 3 < x.size(); ++i)
    d[static_cast<std::size_t>(i)] = std::abs(x(i + 3) - 3.0 * x(i + 2) + 3.0 * x(i + 1) - x(i));
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return 1.4826 * *mid / std::sqrt(20.0);
}

// Noise standard deviations within which a sample counts as level with the
// bottom or top of a rise.
constexpr double kRiseTolerance = 2.0;

// The rise inside [lo, hi] of `y`: from the last sample still within `tol`
// of the bottom to the first sample within `tol` of the top. Noise on the
// slow flanks would otherwise drag a plain argmin/argmax away from the rise.
std::pair<Eigen::Index, Eigen::Index> locate_rise(const Eigen::VectorXd& y, Eigen::Index lo,
                                                  Eigen::Index hi, double tol)
{
  const Eigen::Index bottom = arg_extreme(y, lo, hi, false);
  const Eigen::Index top = arg_extreme(y, bottom, hi, true);
  Eigen::Index end = bottom;
  while (y(end) < y(top) - tol) ++end;
  Eigen::Index start = end;
  while (start > bottom && y(start) > y(bottom) + tol) --start;
  if (end > start) return {start, end};
  return {bottom, top};
}

} // namespace

Detection detect_ies(const Waveform& signal, const DetectorConfig& config,
                     IeSource source)
{
  config.validate(signal.sample_rate_hz());
  const auto filter =
      design_butterworth_bandpass(config.filter_order, config.band_low_hz,
                                  config.band_high_hz, signal.sample_rate_hz());
  const Waveform filtered = filtfilt(filter, signal);

  Detection out;
  const Eigen::VectorXd& raw = signal.samples();
  const double raw_range = raw.maxCoeff() - raw.minCoeff();
  const Eigen::VectorXd& smooth = filtered.samples();
  const double filtered_range = smooth.maxCoeff() - smooth.minCoeff();
  // rounding residue of a constant input is not a breathing signal
  if (!(raw_range > 0.0) || !(filtered_range > 1e-9 * raw_range)) return out;

  out.extrema =
      find_extrema(filtered, config.min_separation_s, config.prominence_threshold);

  const bool rising = config.orientation == IeOrientation::min_to_max;
  const Eigen::VectorXd oriented = rising ? raw : Eigen::VectorXd(-raw);
  const double tol = kRiseTolerance * noise_sigma(raw);
  const ExtremumKind opening = rising ? ExtremumKind::minimum : ExtremumKind::maximum;

  std::vector<double> maxima_times;
  for (const auto& e : out.extrema)
    if (e.kind == ExtremumKind::maximum) maxima_times.push_back(e.time_s);

  for (std::size_t k = 0; k + 1 < out.extrema.size(); ++k) {
    const Extremum& first = out.extrema[k];
    const Extremum& second = out.extrema[k + 1];
    if (first.kind != opening) continue;

    Eigen::Index start = first.index;
    Eigen::Index end = second.index;
    if (config.refine_on_input) {
      const auto [s, e] = locate_rise(oriented, first.index, second.index, tol);
      if (e > s) {
        start = s;
        end = e;
      }
    }
    out.events.emplace_back(signal.time_of(start), signal.time_of(end), source);
  }

  out.stats.breathing_rate_hz = breathing_rate(maxima_times);
  out.stats.n_events = out.events.size();
  for (const auto& ie : out.events) out.stats.ie_durations_s.push_back(ie.duration_s());
  return out;
}

} // namespace breathkit
