#pragma once

#include "breathkit/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace breathkit {

struct ConfusionCounts
{
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept
  {
    tp += other.tp;
    tn += other.tn;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) noexcept
  {
    return a += b;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Each metric is absent when its denominator is zero.
struct MetricSet
{
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> f1;
};

/// Regions that can earn a true negative.
enum class GapUniverse {
  interior,   // between consecutive truth IEs
  with_outer, // also before the first and after the last truth IE
};

struct ScoreOptions
{
  double overlap_slack_s = 0.0;
  GapUniverse gaps = GapUniverse::interior;
};

/// Closed-interval intersection, widened by `slack_s` on each side.
inline bool intervals_touch(const IeInterval& a, const IeInterval& b,
                            double slack_s = 0.0) noexcept
{
  return a.start_s() <= b.end_s() + slack_s && b.start_s() <= a.end_s() + slack_s;
}

/// Throws ValidationError unless the intervals are sorted and pairwise
/// disjoint (touching endpoints count as overlap).
void require_sorted_disjoint(std::span<const IeInterval> intervals, const std::string& name);

/// Truth-centric confusion counts.
///
/// A truth IE is a true positive when any estimate shares at least one
/// instant with it (closed intervals, widened by the slack), otherwise a
/// false negative. An estimate touching no truth IE is a false positive; an
/// estimate touching several truth IEs is counted once. Every gap in the
/// universe holding no false-positive estimate is a true negative.
ConfusionCounts score(std::span<const IeInterval> estimates,
                      std::span<const IeInterval> truth, const ScoreOptions& options = {});

MetricSet metrics(const ConfusionCounts& counts);

/// Two decimals, for display; "n/a" when absent.
std::string format_metric(const std::optional<double>& value);

struct DurationHistogram
{
  double bin_width_s = 0.0;
  double bin_start_s = 0.0;
  std::vector<std::size_t> bin_counts;

  std::size_t total() const noexcept;
  /// Index of the fullest bin (lowest on ties); absent for an empty histogram.
  std::optional<std::size_t> mode_bin() const noexcept;
};

/// Duration d lands in bin floor(d / width); bins run from 0 up to the
/// longest duration.
DurationHistogram duration_histogram(std::span<const IeInterval> intervals,
                                     double bin_width_s);

} // namespace breathkit
