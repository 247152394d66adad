#include "breathkit/extrema.hpp"

#include "breathkit/errors.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <limits>
#include <map>

namespace breathkit {

namespace {

// Sparse table answering range-minimum queries in O(1).
class RangeMin
{
public:
  explicit RangeMin(const Eigen::Ref<const Eigen::VectorXd>& x)
  {
    const auto n = static_cast<std::size_t>(x.size());
    levels_.emplace_back(x.data(), x.data() + n);
    for (std::size_t width = 2; width <= n; width *= 2) {
      const auto& prev = levels_.back();
      std::vector<double> next(n - width + 1);
      for (std::size_t i = 0; i < next.size(); ++i)
        next[i] = std::min(prev[i], prev[i + width / 2]);
      levels_.push_back(std::move(next));
    }
  }

  // Minimum over the closed range [lo, hi].
  double query(std::size_t lo, std::size_t hi) const
  {
    const std::size_t len = hi - lo + 1;
    const auto level = static_cast<std::size_t>(std::bit_width(len) - 1);
    const std::size_t width = std::size_t{1} << level;
    return std::min(levels_[level][lo], levels_[level][hi + 1 - width]);
  }

private:
  std::vector<std::vector<double>> levels_;
};

// Nearest index on each side holding a strictly greater value, or -1 / n.
void nearest_greater(const Eigen::Ref<const Eigen::VectorXd>& x,
                     std::vector<Eigen::Index>& left, std::vector<Eigen::Index>& right)
{
  const Eigen::Index n = x.size();
  left.assign(n, -1);
  right.assign(n, n);
  std::vector<Eigen::Index> stack;
  for (Eigen::Index i = 0; i < n; ++i) {
    while (!stack.empty() && x(stack.back()) <= x(i)) stack.pop_back();
    if (!stack.empty()) left[i] = stack.back();
    stack.push_back(i);
  }
  stack.clear();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    while (!stack.empty() && x(stack.back()) <= x(i)) stack.pop_back();
    if (!stack.empty()) right[i] = stack.back();
    stack.push_back(i);
  }
}

struct Candidate
{
  Eigen::Index index;
  double prominence;
};

std::vector<Candidate> select_separated(std::vector<Candidate> candidates,
                                        double min_separation_samples)
{
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& l, const Candidate& r) {
                     if (l.prominence != r.prominence) return l.prominence > r.prominence;
                     return l.index < r.index;
                   });
  std::map<Eigen::Index, double> accepted;
  for (const auto& c : candidates) {
    const auto above = accepted.lower_bound(c.index);
    bool too_close = false;
    if (above != accepted.end() &&
        static_cast<double>(above->first - c.index) < min_separation_samples)
      too_close = true;
    if (above != accepted.begin() &&
        static_cast<double>(c.index - std::prev(above)->first) < min_separation_samples)
      too_close = true;
    if (!too_close) accepted.emplace(c.index, c.prominence);
  }
  std::vector<Candidate> kept;
  for (const auto& [index, prominence] : accepted) kept.push_back({index, prominence});
  return kept;
}

} // namespace

std::vector<Eigen::Index> local_maxima(const Eigen::Ref<const Eigen::VectorXd>& x)
{
  std::vector<Eigen::Index> peaks;
  const Eigen::Index n = x.size();
  Eigen::Index i = 1;
  while (i < n - 1) {
    if (x(i - 1) < x(i)) {
      Eigen::Index run_end = i;
      while (run_end + 1 < n - 1 && x(run_end + 1) == x(i)) ++run_end;
      if (run_end + 1 < n && x(run_end + 1) < x(i)) peaks.push_back((i + run_end) / 2);
      i = run_end + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}

std::vector<double> peak_prominences(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const std::vector<Eigen::Index>& peaks)
{
  std::vector<double> out;
  out.reserve(peaks.size());
  if (peaks.empty()) return out;

  const Eigen::Index n = x.size();
  const RangeMin range_min(x);
  const double global_min = x.minCoeff();
  std::vector<Eigen::Index> left, right;
  nearest_greater(x, left, right);

  for (Eigen::Index p : peaks) {
    const bool has_left = left[p] >= 0;
    const bool has_right = right[p] < n;
    double base = global_min;
    if (has_left || has_right) {
      base = -std::numeric_limits<double>::infinity();
      if (has_left)
        base = std::max(base, range_min.query(static_cast<std::size_t>(left[p]),
                                              static_cast<std::size_t>(p)));
      if (has_right)
        base = std::max(base, range_min.query(static_cast<std::size_t>(p),
                                              static_cast<std::size_t>(right[p])));
    }
    out.push_back(x(p) - base);
  }
  return out;
}

std::vector<Extremum> find_extrema(const Waveform& signal, double min_separation_s,
                                   double prominence_threshold)
{
  if (signal.size() < 3)
    throw ValidationError("samples", "find_extrema needs at least 3 samples");
  if (!(min_separation_s >= 0.0))
    throw ValidationError("min_separation_s", "must be >= 0");
  if (!(prominence_threshold > 0.0 && prominence_threshold <= 1.0))
    throw ValidationError("prominence_threshold", "must lie in (0, 1]");

  const Eigen::VectorXd& x = signal.samples();
  const double range = x.maxCoeff() - x.minCoeff();
  if (!(range > 0.0)) return {};

  const double min_separation_samples = min_separation_s * signal.sample_rate_hz();
  std::vector<Extremum> merged;

  for (ExtremumKind kind : {ExtremumKind::maximum, ExtremumKind::minimum}) {
    const Eigen::VectorXd oriented = kind == ExtremumKind::maximum ? x : Eigen::VectorXd(-x);
    const auto peaks = local_maxima(oriented);
    const auto prominences = peak_prominences(oriented, peaks);

    std::vector<Candidate> candidates;
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      const double normalized = std::clamp(prominences[k] / range, 0.0, 1.0);
      if (normalized >= prominence_threshold) candidates.push_back({peaks[k], normalized});
    }
    for (const auto& c : select_separated(std::move(candidates), min_separation_samples))
      merged.push_back({c.index, signal.time_of(c.index), kind, x(c.index), c.prominence});
  }

  std::sort(merged.begin(), merged.end(),
            [](const Extremum& l, const Extremum& r) { return l.index < r.index; });

  auto more_extreme = [](const Extremum& a, const Extremum& b) {
    return a.kind == ExtremumKind::maximum ? a.value > b.value : a.value < b.value;
  };
  std::vector<Extremum> alternating;
  for (const auto& e : merged) {
    if (!alternating.empty() && alternating.back().kind == e.kind) {
      if (more_extreme(e, alternating.back())) alternating.back() = e;
    } else {
      alternating.push_back(e);
    }
  }
  return alternating;
}

} // namespace breathkit
