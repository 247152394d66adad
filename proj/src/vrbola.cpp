#include "breathkit/vrbola.hpp"

#include "breathkit/errors.hpp"

#include <random>
#include <string>

namespace breathkit {

std::string_view to_string(WindowShape shape) noexcept
{
  return shape == WindowShape::rectangular ? "rectangular" : "squared_sine";
}

WindowShape window_shape_from_string(std::string_view name)
{
  if (name == "squared_sine") return WindowShape::squared_sine;
  if (name == "rectangular") return WindowShape::rectangular;
  throw ValidationError("window", "unknown window shape '" + std::string(name) + "'");
}

Reconstruction overlap_add(const FrameSequence& frames, const WindowSpec& spec)
{
  const Eigen::Index K = frames.frame_length();
  const Eigen::Index S = frames.hop();
  if (spec.length != K)
    throw ValidationError("window.length", "window length " + std::to_string(spec.length) +
                                               " does not match frame length K=" +
                                               std::to_string(K));
  if (spec.hop != S)
    throw ValidationError("window.hop", "window hop " + std::to_string(spec.hop) +
                                            " does not match frame hop S=" +
                                            std::to_string(S));

  const Eigen::VectorXd w = make_window(spec.shape, K);
  const double deviation = cola_deviation(w, S);
  if (deviation > kColaTolerance)
    throw NumericalError(std::string(to_string(spec.shape)) + " window with K=" +
                         std::to_string(K) + ", S=" + std::to_string(S) +
                         " is not constant overlap-add (deviation " +
                         std::to_string(deviation) + ")");

  Eigen::VectorXd out = overlap_add_frames(frames.frames(), w, S);
  const Eigen::Index edge = K - S;
  const Eigen::Index n = out.size();
  Reconstruction r{Waveform(std::move(out), frames.sample_rate_hz(), "overlap_add"), 0, 0};
  r.interior_begin = std::min(edge, n);
  r.interior_end = std::max(r.interior_begin, n - edge);
  return r;
}

Waveform concatenate(const FrameSequence& frames)
{
  if (frames.hop() != frames.frame_length())
    throw ValidationError("S", "concatenation needs hop S equal to frame length K (S=" +
                                   std::to_string(frames.hop()) + ", K=" +
                                   std::to_string(frames.frame_length()) + ")");
  const Eigen::MatrixXd& m = frames.frames();
  // column-major storage already lays frames end to end
  Eigen::VectorXd joined = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  return Waveform(std::move(joined), frames.sample_rate_hz(), "concatenate");
}

FrameSequence mock_frame_predictor(const Waveform& reference, Eigen::Index K,
                                   Eigen::Index S, double boundary_noise_sigma,
                                   std::uint64_t seed, NoiseProfile profile)
{
  if (K <= 0) throw ValidationError("K", "frame length must be positive");
  if (S <= 0 || S > K) throw ValidationError("S", "hop must satisfy 0 < S <= K");
  if (!(boundary_noise_sigma >= 0.0))
    throw ValidationError("boundary_noise_sigma", "must be >= 0");
  if (reference.size() < K)
    throw ValidationError("reference", "reference has " + std::to_string(reference.size()) +
                                           " samples, shorter than one frame (K=" +
                                           std::to_string(K) + ")");

  const Eigen::Index P = (reference.size() - K) / S + 1;
  Eigen::VectorXd noise_std(K);
  const double centre = static_cast<double>(K - 1) / 2.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    const double ramp = centre > 0.0 ? std::abs(static_cast<double>(k) - centre) / centre : 0.0;
    noise_std(k) = boundary_noise_sigma * (profile == NoiseProfile::triangular ? ramp : 1.0);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd frames(K, P);
  for (Eigen::Index p = 0; p < P; ++p) {
    frames.col(p) = reference.samples().segment(p * S, K);
    if (boundary_noise_sigma > 0.0)
      for (Eigen::Index k = 0; k < K; ++k) frames(k, p) += noise_std(k) * gauss(rng);
  }
  return FrameSequence(std::move(frames), S, reference.sample_rate_hz());
}

} // namespace breathkit
