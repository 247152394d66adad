#pragma once

#include "breathkit/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace breathkit {

/// A word from a time-aligned transcript; trailing punctuation stays in `text`.
class TimedWord
{
public:
  TimedWord(std::string text, double start_s, double end_s);

  const std::string& text() const noexcept { return text_; }
  double start_s() const noexcept { return start_s_; }
  double end_s() const noexcept { return end_s_; }

  bool operator==(const TimedWord&) const = default;

private:
  std::string text_;
  double start_s_;
  double end_s_;
};

class Transcript
{
public:
  Transcript(std::vector<TimedWord> words, double audio_duration_s);

  const std::vector<TimedWord>& words() const noexcept { return words_; }
  double audio_duration_s() const noexcept { return audio_duration_s_; }

  bool operator==(const Transcript&) const = default;

private:
  std::vector<TimedWord> words_;
  double audio_duration_s_;
};

inline constexpr std::string_view kDefaultStopMarks = ".,;:?!";

/// Pauses within this many seconds of the threshold count as equal to it, so
/// a 0.150 s pause written as 2.00 -> 2.15 is not "longer than 150 ms".
inline constexpr double kTimeEpsilon = 1e-9;

/// Every word-to-word pause strictly longer than the threshold (beyond kTimeEpsilon).
std::vector<IeInterval> asr_word_ies(const Transcript& transcript, double pause_threshold_s);

/// The pause after each word whose last character is a stop mark, ending at
/// the start of the next word. Stops without a successor or without a
/// positive pause produce nothing. Only the final character is inspected, so
/// abbreviations such as "Dr." count as stops.
std::vector<IeInterval> asr_punct_ies(const Transcript& transcript,
                                      std::string_view stop_marks = kDefaultStopMarks);

} // namespace breathkit
