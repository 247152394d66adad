#include "breathkit/types.hpp"

#include "breathkit/errors.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace breathkit {

Waveform::Waveform(Eigen::VectorXd samples, double sample_rate_hz, std::string label)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz),
      label_(std::move(label))
{
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
    throw ValidationError("sample_rate_hz", "must be a positive finite number");
  if (samples_.size() < 1)
    throw ValidationError("samples", "waveform needs at least one sample");
  if (!samples_.allFinite())
    throw ValidationError("samples", "all samples must be finite");
}

Eigen::Index Waveform::index_of(double seconds) const noexcept
{
  return static_cast<Eigen::Index>(std::floor(seconds * sample_rate_hz_ + 0.5));
}

Waveform Waveform::with_samples(Eigen::VectorXd samples) const
{
  return Waveform(std::move(samples), sample_rate_hz_, label_);
}

bool Waveform::operator==(const Waveform& other) const
{
  return sample_rate_hz_ == other.sample_rate_hz_ && label_ == other.label_ &&
         samples_.size() == other.samples_.size() && samples_ == other.samples_;
}

FrameSequence::FrameSequence(Eigen::MatrixXd frames, Eigen::Index hop,
                             double sample_rate_hz)
    : frames_(std::move(frames)), hop_(hop), sample_rate_hz_(sample_rate_hz)
{
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
    throw ValidationError("sample_rate_hz", "must be a positive finite number");
  if (frames_.rows() < 1)
    throw ValidationError("K", "frame length must be positive");
  if (frames_.cols() < 1)
    throw ValidationError("frames", "at least one frame is required");
  if (hop_ <= 0 || hop_ > frames_.rows())
    throw ValidationError("S", "hop must satisfy 0 < S <= K");
  if (!frames_.allFinite())
    throw ValidationError("frames", "all frame entries must be finite");
}

bool FrameSequence::operator==(const FrameSequence& other) const
{
  return hop_ == other.hop_ && sample_rate_hz_ == other.sample_rate_hz_ &&
         frames_.rows() == other.frames_.rows() &&
         frames_.cols() == other.frames_.cols() && frames_ == other.frames_;
}

namespace {
constexpr std::array<std::pair<IeSource, std::string_view>, 6> kSourceNames{{
    {IeSource::belt, "belt"},
    {IeSource::vrb, "vrb"},
    {IeSource::vrbola, "vrbola"},
    {IeSource::asr_word, "asr_word"},
    {IeSource::asr_punct, "asr_punct"},
    {IeSource::synthetic, "synthetic"},
}};
}

std::string_view to_string(IeSource source) noexcept
{
  for (const auto& [value, name] : kSourceNames)
    if (value == source) return name;
  return "unknown";
}

IeSource ie_source_from_string(std::string_view name)
{
  for (const auto& [value, known] : kSourceNames)
    if (known == name) return value;
  throw ValidationError("source", "unknown interval source '" + std::string(name) + "'");
}

IeInterval::IeInterval(double start_s, double end_s, IeSource source)
    : start_s_(start_s), end_s_(end_s), source_(source)
{
  if (!std::isfinite(start_s_)) throw ValidationError("start_s", "must be finite");
  if (!std::isfinite(end_s_)) throw ValidationError("end_s", "must be finite");
  if (!(start_s_ < end_s_))
    throw ValidationError("end_s", "interval end must be strictly after its start");
}

void DetectorConfig::validate(std::optional<double> sample_rate_hz) const
{
  if (filter_order < 1) throw ValidationError("filter_order", "must be >= 1");
  if (!(band_low_hz > 0.0)) throw ValidationError("band_low_hz", "must be > 0");
  if (!(band_high_hz > band_low_hz))
    throw ValidationError("band_high_hz", "must exceed band_low_hz");
  if (sample_rate_hz && !(band_high_hz < *sample_rate_hz / 2.0))
    throw ValidationError("band_high_hz", "must lie below the Nyquist frequency");
  if (!(min_separation_s >= 0.0))
    throw ValidationError("min_separation_s", "must be >= 0");
  if (!(prominence_threshold > 0.0 && prominence_threshold <= 1.0))
    throw ValidationError("prominence_threshold", "must lie in (0, 1]");
  if (!(pause_threshold_s > 0.0))
    throw ValidationError("pause_threshold_s", "must be > 0");
}

} // namespace breathkit
