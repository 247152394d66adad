#pragma once

#include "breathkit/types.hpp"

#include <Eigen/Core>

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace breathkit {

/// Second-order section with normalized leading denominator coefficient:
///   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
template <typename Scalar> struct Biquad
{
  Scalar b0{}, b1{}, b2{};
  Scalar a1{}, a2{};
};

struct FilterDesign
{
  int order = 0;
  double low_hz = 0.0;
  double high_hz = 0.0;
  double sample_rate_hz = 0.0;
};

/// Cascade of stable second-order sections. Immutable after construction.
class FilterCascade
{
public:
  FilterCascade(std::vector<Biquad<double>> sections, FilterDesign design);

  const std::vector<Biquad<double>>& sections() const noexcept { return sections_; }
  const FilterDesign& design() const noexcept { return design_; }
  /// Number of delay elements across the cascade (two per section).
  Eigen::Index state_length() const noexcept
  {
    return 2 * static_cast<Eigen::Index>(sections_.size());
  }

private:
  std::vector<Biquad<double>> sections_;
  FilterDesign design_;
};

/// Butterworth band-pass: analog prototype of the given order, low-pass to
/// band-pass transform, then bilinear transform with both edges prewarped.
/// The result has 2*order poles grouped into `order` sections.
FilterCascade design_butterworth_bandpass(int order, double low_hz, double high_hz,
                                          double sample_rate_hz);

std::complex<double> frequency_response(const FilterCascade& filter, double freq_hz);

inline double magnitude_response(const FilterCascade& filter, double freq_hz)
{
  return std::abs(frequency_response(filter, freq_hz));
}

/// Moduli of the poles of one section.
std::vector<double> pole_radii(const Biquad<double>& section);

/// Samples of odd reflection added at each end by filtfilt.
inline Eigen::Index filtfilt_pad_length(const FilterCascade& filter)
{
  return 3 * filter.state_length();
}

/// Zero-phase forward-backward filtering. The signal is extended by odd
/// reflection, every section starts from its steady-state response to the
/// first sample of each pass, and the pads are dropped afterwards. The
/// forward-backward pass is averaged with its time-reversed counterpart so
/// that reversing the input reverses the output exactly.
Eigen::VectorXd filtfilt(const FilterCascade& filter,
                         const Eigen::Ref<const Eigen::VectorXd>& input);

/// Checks that the design rate matches the waveform's rate.
Waveform filtfilt(const FilterCascade& filter, const Waveform& input);

/// Coefficients as a JSON document with 17 significant digits.
std::string dump_coefficients(const FilterCascade& filter);

// Scalar-generic kernels ----------------------------------------------------

/// Direct-form II transposed state, two delays per section.
template <typename Scalar> using SosState = std::vector<std::array<Scalar, 2>>;

/// Runs `x` through the cascade in place, updating `state`.
template <typename Scalar, typename Derived>
void sosfilt_inplace(const std::vector<Biquad<Scalar>>& sections,
                     Eigen::MatrixBase<Derived>& x, SosState<Scalar>& state)
{
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const auto& q = sections[s];
    Scalar z0 = state[s][0];
    Scalar z1 = state[s][1];
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const Scalar in = x(i);
      const Scalar out = q.b0 * in + z0;
      z0 = q.b1 * in - q.a1 * out + z1;
      z1 = q.b2 * in - q.a2 * out;
      x(i) = out;
    }
    state[s] = {z0, z1};
  }
}

/// Per-section state reached after an infinitely long unit step, with each
/// section scaled by the DC gain of the sections before it.
template <typename Scalar>
SosState<Scalar> sos_steady_state(const std::vector<Biquad<Scalar>>& sections)
{
  SosState<Scalar> zi(sections.size());
  Scalar scale{1};
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const auto& q = sections[s];
    const Scalar gain = (q.b0 + q.b1 + q.b2) / (Scalar{1} + q.a1 + q.a2);
    const Scalar z1 = q.b2 - q.a2 * gain;
    const Scalar z0 = q.b1 - q.a1 * gain + z1;
    zi[s] = {scale * z0, scale * z1};
    scale *= gain;
  }
  return zi;
}

} // namespace breathkit
