#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace breathkit {

/// Uniformly sampled respiratory signal. Immutable after construction.
class Waveform
{
public:
  Waveform(Eigen::VectorXd samples, double sample_rate_hz,
           std::string label = "waveform");

  const Eigen::VectorXd& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  const std::string& label() const noexcept { return label_; }

  Eigen::Index size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept
  {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }
  double time_of(Eigen::Index index) const noexcept
  {
    return static_cast<double>(index) / sample_rate_hz_;
  }
  /// Seconds to sample index, round-half-up.
  Eigen::Index index_of(double seconds) const noexcept;

  Waveform with_samples(Eigen::VectorXd samples) const;

  bool operator==(const Waveform& other) const;

private:
  Eigen::VectorXd samples_;
  double sample_rate_hz_;
  std::string label_;
};

/// Framewise model outputs. Column p of frames() holds b_p(0..K-1).
class FrameSequence
{
public:
  FrameSequence(Eigen::MatrixXd frames, Eigen::Index hop, double sample_rate_hz);

  const Eigen::MatrixXd& frames() const noexcept { return frames_; }
  Eigen::Index frame_length() const noexcept { return frames_.rows(); }
  Eigen::Index frame_count() const noexcept { return frames_.cols(); }
  Eigen::Index hop() const noexcept { return hop_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }

  bool operator==(const FrameSequence& other) const;

private:
  Eigen::MatrixXd frames_;
  Eigen::Index hop_;
  double sample_rate_hz_;
};

enum class IeSource { belt, vrb, vrbola, asr_word, asr_punct, synthetic };

std::string_view to_string(IeSource source) noexcept;
IeSource ie_source_from_string(std::string_view name);

/// One inspiration event as a closed time interval, start < end.
class IeInterval
{
public:
  IeInterval(double start_s, double end_s, IeSource source);

  double start_s() const noexcept { return start_s_; }
  double end_s() const noexcept { return end_s_; }
  double duration_s() const noexcept { return end_s_ - start_s_; }
  IeSource source() const noexcept { return source_; }

  bool operator==(const IeInterval&) const = default;

private:
  double start_s_;
  double end_s_;
  IeSource source_;
};

/// Which extremum opens an inspiration event. The belt rises during
/// inspiration, so the default pairs a minimum with the following maximum.
enum class IeOrientation { min_to_max, max_to_min };

struct DetectorConfig
{
  int filter_order = 3;
  double band_low_hz = 0.08;
  double band_high_hz = 1.0;
  double min_separation_s = 1.0;
  double prominence_threshold = 0.8;
  double pause_threshold_s = 0.150;
  IeOrientation orientation = IeOrientation::min_to_max;
  // Re-locate each paired extremum on the unfiltered input, inside the window
  // spanned by the filtered pair. The band-pass smears a ~0.2 s rise to ~1 s.
  bool refine_on_input = true;

  /// Throws ValidationError naming the first offending field. Band edges are
  /// checked against Nyquist only when a sample rate is given.
  void validate(std::optional<double> sample_rate_hz = std::nullopt) const;

  bool operator==(const DetectorConfig&) const = default;
};

} // namespace breathkit
