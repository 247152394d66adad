#include "breathkit/evaluation.hpp"

#include "breathkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace breathkit {

void require_sorted_disjoint(std::span<const IeInterval> intervals, const std::string& name)
{
  for (std::size_t i = 1; i < intervals.size(); ++i)
    if (!(intervals[i].start_s() > intervals[i - 1].end_s()))
      throw ValidationError(name + "[" + std::to_string(i) + "]",
                            "intervals must be sorted and must not overlap");
}

ConfusionCounts score(std::span<const IeInterval> estimates,
                      std::span<const IeInterval> truth, const ScoreOptions& options)
{
  require_sorted_disjoint(estimates, "estimates");
  require_sorted_disjoint(truth, "truth");
  if (!(options.overlap_slack_s >= 0.0))
    throw ValidationError("overlap_slack_s", "must be >= 0");

  const double slack = options.overlap_slack_s;
  const std::size_t n_truth = truth.size();
  std::vector<bool> detected(n_truth, false);
  // region r lies before truth[r]; region n_truth lies after the last one
  std::vector<bool> region_dirty(n_truth + 1, false);

  ConfusionCounts counts;
  for (const auto& est : estimates) {
    auto first = std::partition_point(truth.begin(), truth.end(), [&](const IeInterval& t) {
      return t.end_s() + slack < est.start_s();
    });
    bool hit = false;
    for (auto it = first; it != truth.end() && it->start_s() <= est.end_s() + slack; ++it) {
      detected[static_cast<std::size_t>(it - truth.begin())] = true;
      hit = true;
    }
    if (!hit) {
      ++counts.fp;
      region_dirty[static_cast<std::size_t>(first - truth.begin())] = true;
    }
  }

  counts.tp = static_cast<std::size_t>(std::count(detected.begin(), detected.end(), true));
  counts.fn = n_truth - counts.tp;

  const bool outer = options.gaps == GapUniverse::with_outer;
  for (std::size_t r = 0; r <= n_truth; ++r) {
    const bool interior = r > 0 && r < n_truth;
    if ((interior || outer) && !region_dirty[r]) ++counts.tn;
  }
  return counts;
}

MetricSet metrics(const ConfusionCounts& c)
{
  auto ratio = [](double num, double den) -> std::optional<double> {
    if (den == 0.0) return std::nullopt;
    return num / den;
  };
  const auto tp = static_cast<double>(c.tp);
  const auto tn = static_cast<double>(c.tn);
  const auto fp = static_cast<double>(c.fp);
  const auto fn = static_cast<double>(c.fn);
  return {ratio(tp, tp + fn), ratio(tn, tn + fp), ratio(2.0 * tp, 2.0 * tp + fp + fn)};
}

std::string format_metric(const std::optional<double>& value)
{
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *value);
  return buf;
}

std::size_t DurationHistogram::total() const noexcept
{
  std::size_t sum = 0;
  for (auto c : bin_counts) sum += c;
  return sum;
}

std::optional<std::size_t> DurationHistogram::mode_bin() const noexcept
{
  if (total() == 0) return std::nullopt;
  return static_cast<std::size_t>(
      std::max_element(bin_counts.begin(), bin_counts.end()) - bin_counts.begin());
}

DurationHistogram duration_histogram(std::span<const IeInterval> intervals,
                                     double bin_width_s)
{
  if (!(bin_width_s > 0.0)) throw ValidationError("bin_width_s", "must be > 0");
  DurationHistogram h;
  h.bin_width_s = bin_width_s;
  // 0.20 / 0.05 evaluates just below 4 in binary floating point
  auto bin_of = [&](double d) {
    return static_cast<std::size_t>(std::floor(d / bin_width_s + 1e-9));
  };
  for (const auto& ie : intervals) {
    const std::size_t b = bin_of(ie.duration_s());
    if (b >= h.bin_counts.size()) h.bin_counts.resize(b + 1, 0);
    ++h.bin_counts[b];
  }
  return h;
}

} // namespace breathkit
