#include "breathkit/transcript.hpp"

#include "breathkit/errors.hpp"

#include <cmath>

namespace breathkit {

TimedWord::TimedWord(std::string text, double start_s, double end_s)
    : text_(std::move(text)), start_s_(start_s), end_s_(end_s)
{
  if (text_.empty()) throw ValidationError("word", "word text must not be empty");
  if (!std::isfinite(start_s_)) throw ValidationError("start", "must be finite");
  if (!std::isfinite(end_s_)) throw ValidationError("end", "must be finite");
  if (end_s_ < start_s_)
    throw ValidationError("end", "word '" + text_ + "' ends before it starts");
}

Transcript::Transcript(std::vector<TimedWord> words, double audio_duration_s)
    : words_(std::move(words)), audio_duration_s_(audio_duration_s)
{
  if (!std::isfinite(audio_duration_s_) || audio_duration_s_ < 0.0)
    throw ValidationError("audio_duration_s", "must be a non-negative finite number");
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (i > 0 && words_[i].start_s() < words_[i - 1].start_s())
      throw ValidationError("words[" + std::to_string(i) + "].start",
                            "words must be sorted by start time");
    if (words_[i].end_s() > audio_duration_s_)
      throw ValidationError("words[" + std::to_string(i) + "].end",
                            "word ends after the audio duration");
  }
}

std::vector<IeInterval> asr_word_ies(const Transcript& transcript, double pause_threshold_s)
{
  if (!(pause_threshold_s > 0.0))
    throw ValidationError("pause_threshold_s", "must be > 0");
  std::vector<IeInterval> out;
  const auto& words = transcript.words();
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    const double gap_start = words[i].end_s();
    const double gap_end = words[i + 1].start_s();
    if (gap_end - gap_start > pause_threshold_s + kTimeEpsilon)
      out.emplace_back(gap_start, gap_end, IeSource::asr_word);
  }
  return out;
}

std::vector<IeInterval> asr_punct_ies(const Transcript& transcript,
                                      std::string_view stop_marks)
{
  if (stop_marks.empty()) throw ValidationError("stop_marks", "must not be empty");
  std::vector<IeInterval> out;
  const auto& words = transcript.words();
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (stop_marks.find(words[i].text().back()) == std::string_view::npos) continue;
    const double gap_start = words[i].end_s();
    const double gap_end = words[i + 1].start_s();
    if (gap_end > gap_start) out.emplace_back(gap_start, gap_end, IeSource::asr_punct);
  }
  return out;
}

} // namespace breathkit
