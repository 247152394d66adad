#pragma once

#include "breathkit/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace breathkit {

enum class WindowShape { squared_sine, rectangular };

std::string_view to_string(WindowShape shape) noexcept;
WindowShape window_shape_from_string(std::string_view name);

struct WindowSpec
{
  WindowShape shape = WindowShape::squared_sine;
  Eigen::Index length = 256;
  Eigen::Index hop = 128;
};

/// w(k) = sin^2(pi k / K) for the squared sine; its copies shifted by K/2
/// sum to one.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> make_window(WindowShape shape, Eigen::Index length)
{
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(length);
  for (Eigen::Index k = 0; k < length; ++k) {
    if (shape == WindowShape::rectangular) {
      w(k) = Scalar{1};
    } else {
      const Scalar s = std::sin(std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(length));
      w(k) = s * s;
    }
  }
  return w;
}

/// Largest |sum_m w(r + m*hop) - 1| over the hop residues r, i.e. the
/// deviation from unity of the fully overlapped window sum.
template <typename Derived>
typename Derived::Scalar cola_deviation(const Eigen::MatrixBase<Derived>& window,
                                        Eigen::Index hop)
{
  using Scalar = typename Derived::Scalar;
  Scalar worst{0};
  for (Eigen::Index r = 0; r < hop; ++r) {
    Scalar sum{0};
    for (Eigen::Index k = r; k < window.size(); k += hop) sum += window(k);
    worst = std::max(worst, std::abs(sum - Scalar{1}));
  }
  return worst;
}

/// Weighted overlap-add of P frames into (P-1)*hop + K samples:
///   out(p*hop + k) += w(k) * frames(k, p)
template <typename Derived, typename WindowDerived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
overlap_add_frames(const Eigen::MatrixBase<Derived>& frames,
                   const Eigen::MatrixBase<WindowDerived>& window, Eigen::Index hop)
{
  using Vector = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index K = frames.rows();
  const Eigen::Index P = frames.cols();
  Vector out = Vector::Zero((P - 1) * hop + K);
  for (Eigen::Index p = 0; p < P; ++p)
    out.segment(p * hop, K) += frames.col(p).cwiseProduct(window);
  return out;
}

/// Overlap-added waveform. Samples outside [interior_begin, interior_end)
/// lack full window coverage and are left unnormalised.
struct Reconstruction
{
  Waveform waveform;
  Eigen::Index interior_begin = 0;
  Eigen::Index interior_end = 0;
};

inline constexpr double kColaTolerance = 1e-6;

Reconstruction overlap_add(const FrameSequence& frames, const WindowSpec& window);

/// Joins non-overlapping frames end to end; requires hop == K.
Waveform concatenate(const FrameSequence& frames);

enum class NoiseProfile {
  triangular, // 0 at the frame centre, full sigma at both edges
  flat,
};

/// Stand-in for the neural frame model: frame p is reference[p*S, p*S + K)
/// plus zero-mean Gaussian noise whose standard deviation follows `profile`.
FrameSequence mock_frame_predictor(const Waveform& reference, Eigen::Index K,
                                   Eigen::Index S, double boundary_noise_sigma,
                                   std::uint64_t seed,
                                   NoiseProfile profile = NoiseProfile::triangular);

} // namespace breathkit
