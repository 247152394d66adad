#pragma once

#include "breathkit/types.hpp"

#include <Eigen/Core>

#include <vector>

namespace breathkit {

enum class ExtremumKind { minimum, maximum };

struct Extremum
{
  Eigen::Index index = 0;
  double time_s = 0.0;
  ExtremumKind kind = ExtremumKind::maximum;
  double value = 0.0;
  double prominence_normalized = 0.0;

  bool operator==(const Extremum&) const = default;
};

/// Interior local maxima. A plateau of equal samples counts once, at its
/// middle index (left of centre for even runs).
std::vector<Eigen::Index> local_maxima(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Topographic prominence of each peak: height above the higher of the two
/// key saddles, where a side that reaches the signal edge without meeting
/// higher ground contributes no saddle. A peak with no higher ground on
/// either side measures down to the global minimum.
std::vector<double> peak_prominences(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const std::vector<Eigen::Index>& peaks);

/// Alternating minima and maxima whose prominence, normalised by the signal's
/// range, reaches `prominence_threshold` and whose same-kind neighbours are at
/// least `min_separation_s` apart.
///
/// Candidates are taken greedily by descending prominence (ties: lower index)
/// and rejected when closer than the separation to an accepted extremum of the
/// same kind. Runs of consecutive same-kind survivors are then collapsed to
/// the most extreme value (ties: earlier index).
std::vector<Extremum> find_extrema(const Waveform& signal, double min_separation_s,
                                   double prominence_threshold);

} // namespace breathkit
