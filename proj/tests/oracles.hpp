#pragma once

// Brute-force references used only by the tests. Nothing here calls into the
// library code paths it is compared against.

#include "breathkit/evaluation.hpp"
#include "breathkit/extrema.hpp"
#include "breathkit/transcript.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// |H(f)| of the Butterworth band-pass evaluated through its analog
/// definition: prewarp the digital frequency, map band-pass to low-pass with
/// nu = (W^2 - W0^2) / (W * B), and use |H_lp|^2 = 1 / (1 + nu^(2N)).
inline double analog_bandpass_magnitude(double f, int order, double low, double high, double fs)
{
  const double pi = std::numbers::pi;
  auto warp = [&](double hz) { return 2.0 * fs * std::tan(pi * hz / fs); };
  const double wl = warp(low), wh = warp(high);
  const double w0sq = wl * wh;
  const double bw = wh - wl;
  const double w = warp(f);
  if (w == 0.0) return 0.0;
  const double nu = (w * w - w0sq) / (w * bw);
  return 1.0 / std::sqrt(1.0 + std::pow(nu * nu, order));
}

struct Peak
{
  long index;
  double prominence;
};

// Interior local maxima with plateaus at their middle, found by expanding
// every sample into its run of equal values.
inline std::vector<long> naive_maxima(const std::vector<double>& x)
{
  std::vector<long> out;
  const long n = static_cast<long>(x.size());
  for (long i = 0; i < n; ++i) {
    long lo = i, hi = i;
    while (lo > 0 && x[lo - 1] == x[i]) --lo;
    while (hi < n - 1 && x[hi + 1] == x[i]) ++hi;
    if (lo == 0 || hi == n - 1) continue;
    if (x[lo - 1] < x[i] && x[hi + 1] < x[i] && i == (lo + hi) / 2) out.push_back(i);
  }
  return out;
}

inline double naive_prominence(const std::vector<double>& x, long p)
{
  const long n = static_cast<long>(x.size());
  double left_min = x[p], right_min = x[p];
  bool left_higher = false, right_higher = false;
  for (long i = p - 1; i >= 0; --i) {
    if (x[i] > x[p]) {
      left_higher = true;
      break;
    }
    left_min = std::min(left_min, x[i]);
  }
  for (long i = p + 1; i < n; ++i) {
    if (x[i] > x[p]) {
      right_higher = true;
      break;
    }
    right_min = std::min(right_min, x[i]);
  }
  if (!left_higher && !right_higher) return x[p] - *std::min_element(x.begin(), x.end());
  double base = -INFINITY;
  if (left_higher) base = std::max(base, left_min);
  if (right_higher) base = std::max(base, right_min);
  return x[p] - base;
}

struct NaiveExtremum
{
  long index;
  bool is_max;
};

inline std::vector<NaiveExtremum> brute_extrema(const std::vector<double>& x, double fs,
                                                double min_sep_s, double threshold)
{
  const double hi = *std::max_element(x.begin(), x.end());
  const double lo = *std::min_element(x.begin(), x.end());
  const double range = hi - lo;
  if (!(range > 0.0)) return {};
  std::vector<NaiveExtremum> all;
  for (bool is_max : {true, false}) {
    std::vector<double> y = x;
    if (!is_max)
      for (auto& v : y) v = -v;
    std::vector<Peak> cands;
    for (long p : naive_maxima(y)) {
      const double prom = std::clamp(naive_prominence(y, p) / range, 0.0, 1.0);
      if (prom >= threshold) cands.push_back({p, prom});
    }
    // selection sort by (prominence desc, index asc), O(n^2)
    std::vector<long> accepted;
    std::vector<bool> used(cands.size(), false);
    for (std::size_t round = 0; round < cands.size(); ++round) {
      std::size_t best = cands.size();
      for (std::size_t k = 0; k < cands.size(); ++k) {
        if (used[k]) continue;
        if (best == cands.size() || cands[k].prominence > cands[best].prominence ||
            (cands[k].prominence == cands[best].prominence && cands[k].index < cands[best].index))
          best = k;
      }
      used[best] = true;
      bool ok = true;
      for (long a : accepted)
        if (static_cast<double>(std::abs(a - cands[best].index)) < min_sep_s * fs) ok = false;
      if (ok) accepted.push_back(cands[best].index);
    }
    for (long a : accepted) all.push_back({a, is_max});
  }
  std::sort(all.begin(), all.end(),
            [](const NaiveExtremum& a, const NaiveExtremum& b) { return a.index < b.index; });
  std::vector<NaiveExtremum> out;
  for (const auto& e : all) {
    if (!out.empty() && out.back().is_max == e.is_max) {
      const double cur = x[out.back().index], cand = x[e.index];
      if (e.is_max ? cand > cur : cand < cur) out.back() = e;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

struct Counts
{
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

/// Interval-by-interval application of the scoring rules.
inline Counts brute_score(const std::vector<breathkit::IeInterval>& est,
                          const std::vector<breathkit::IeInterval>& truth, bool with_outer,
                          double slack = 0.0)
{
  auto touch = [slack](const breathkit::IeInterval& a, const breathkit::IeInterval& b) {
    return !(a.end_s() + slack < b.start_s() || b.end_s() + slack < a.start_s());
  };
  Counts c;
  for (const auto& t : truth) {
    bool hit = false;
    for (const auto& e : est) hit = hit || touch(e, t);
    (hit ? c.tp : c.fn)++;
  }
  std::vector<const breathkit::IeInterval*> unmatched;
  for (const auto& e : est) {
    bool hit = false;
    for (const auto& t : truth) hit = hit || touch(e, t);
    if (!hit) {
      ++c.fp;
      unmatched.push_back(&e);
    }
  }
  // regions as open (lo, hi) time spans
  std::vector<std::pair<double, double>> regions;
  for (std::size_t i = 0; i + 1 < truth.size(); ++i)
    regions.emplace_back(truth[i].end_s(), truth[i + 1].start_s());
  if (with_outer) {
    if (truth.empty()) {
      regions.emplace_back(-INFINITY, INFINITY);
    } else {
      regions.emplace_back(-INFINITY, truth.front().start_s());
      regions.emplace_back(truth.back().end_s(), INFINITY);
    }
  }
  for (const auto& [lo, hi] : regions) {
    bool clean = true;
    for (const auto* e : unmatched)
      if (e->end_s() > lo && e->start_s() < hi) clean = false;
    if (clean) ++c.tn;
  }
  return c;
}

inline std::vector<std::pair<double, double>> brute_word_gaps(const breathkit::Transcript& t,
                                                              double threshold)
{
  std::vector<std::pair<double, double>> out;
  const auto& w = t.words();
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      if (j == i + 1 && w[j].start_s() - w[i].end_s() > threshold + 1e-9)
        out.emplace_back(w[i].end_s(), w[j].start_s());
  return out;
}

inline std::vector<std::pair<double, double>> brute_punct_gaps(const breathkit::Transcript& t,
                                                               const std::string& marks)
{
  std::vector<std::pair<double, double>> out;
  const auto& w = t.words();
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const char last = w[i].text()[w[i].text().size() - 1];
    bool stop = false;
    for (char m : marks) stop = stop || m == last;
    if (stop && w[i + 1].start_s() - w[i].end_s() > 0.0)
      out.emplace_back(w[i].end_s(), w[i + 1].start_s());
  }
  return out;
}

/// Sorted, disjoint intervals with quantised endpoints so that touching and
/// shared endpoints occur often.
inline std::vector<breathkit::IeInterval> random_intervals(std::mt19937_64& rng, std::size_t max_n,
                                                           breathkit::IeSource source)
{
  std::uniform_int_distribution<std::size_t> count(0, max_n);
  std::uniform_int_distribution<int> step(1, 6);
  std::vector<breathkit::IeInterval> out;
  const std::size_t n = count(rng);
  double t = 0.5 * step(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double start = t;
    const double end = start + 0.5 * step(rng);
    out.emplace_back(start, end, source);
    t = end + 0.5 * step(rng);
  }
  return out;
}

inline breathkit::Transcript random_transcript(std::mt19937_64& rng, std::size_t n_words)
{
  static const char* texts[] = {"the", "rainbow", "is.", "a", "division,", "of", "light;",
                                "into", "many", "colors?", "Dr.", "yes!", "note:"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(texts) - 1);
  // millisecond grid, so 150 ms gaps and zero gaps happen
  std::uniform_int_distribution<int> dur_ms(50, 400);
  std::uniform_int_distribution<int> gap_ms(0, 300);
  std::vector<breathkit::TimedWord> words;
  int t = 0;
  for (std::size_t i = 0; i < n_words; ++i) {
    const int start = t;
    const int end = start + dur_ms(rng);
    int gap = gap_ms(rng);
    if (gap % 7 == 0) gap = 150;
    words.emplace_back(texts[pick(rng)], start / 1000.0, end / 1000.0);
    t = end + gap;
  }
  return breathkit::Transcript(std::move(words), t / 1000.0 + 1.0);
}

} // namespace oracle
