#include "breathkit/detection.hpp"
#include "breathkit/errors.hpp"
#include "breathkit/evaluation.hpp"
#include "breathkit/synthesis.hpp"

#include "doctest.h"

using namespace breathkit;

namespace {

SynthConfig quiet(std::uint64_t seed)
{
  SynthConfig c;
  c.seed = seed;
  return c;
}

} // namespace

TEST_CASE("default construction: 12 inspirations, 10 s apart")
{
  const auto s = synth_breathing(quiet(1));
  REQUIRE(s.truth.size() == 12);
  CHECK(s.waveform.size() == 6000);
  CHECK(s.waveform.sample_rate_hz() == 50.0);
  for (std::size_t i = 0; i < s.truth.size(); ++i) {
    CHECK(s.truth[i].duration_s() >= 0.205 - 1e-12);
    CHECK(s.truth[i].duration_s() <= 0.245 + 1e-12);
    CHECK(s.truth[i].source() == IeSource::synthetic);
    if (i > 0) CHECK(s.truth[i].start_s() - s.truth[i - 1].start_s() == doctest::Approx(10.0));
  }
  CHECK(s.truth.front().start_s() == 5.0);
}

TEST_CASE("same seed, same output")
{
  SynthConfig c = quiet(7);
  c.noise_sigma = 0.05;
  c.drift_per_s = 0.01;
  c.grammatical_fraction = 0.5;
  c.spurious_stop_rate_hz = 0.05;
  const auto a = synth_breathing(c);
  const auto b = synth_breathing(c);
  CHECK(a.waveform == b.waveform);
  CHECK(a.truth == b.truth);
  CHECK(synth_transcript(a.truth, c) == synth_transcript(b.truth, c));
  c.seed = 8;
  CHECK_FALSE(synth_breathing(c).waveform == a.waveform);
}

TEST_CASE("planted intervals are strictly rising on the noiseless waveform")
{
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SynthConfig c = quiet(seed);
    c.drift_per_s = -0.004;
    c.sample_rate_hz = 200.0;
    const auto s = synth_breathing(c);
    const auto& x = s.waveform.samples();
    for (const auto& ie : s.truth) {
      const auto lo = static_cast<Eigen::Index>(std::ceil(ie.start_s() * 200.0));
      const auto hi = static_cast<Eigen::Index>(std::floor(ie.end_s() * 200.0));
      REQUIRE(hi > lo);
      for (Eigen::Index i = lo + 1; i <= hi; ++i) CHECK(x(i) > x(i - 1));
    }
  }
}

TEST_CASE("transcript respects the planted inspirations")
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig c = quiet(seed);
    c.grammatical_fraction = 0.5;
    c.spurious_stop_rate_hz = 0.1;
    const auto s = synth_breathing(c);
    const auto t = synth_transcript(s.truth, c);
    CHECK(t.audio_duration_s() == c.duration_s);
    CHECK(t.words().size() > 100);
    for (const auto& w : t.words()) {
      CHECK(w.end_s() > w.start_s());
      for (const auto& ie : s.truth)
        CHECK((w.end_s() <= ie.start_s() || w.start_s() >= ie.end_s()));
    }
    // every IE sits in a word gap exactly
    const auto word = asr_word_ies(t, 0.150);
    const auto c_word = score(word, s.truth);
    CHECK(c_word.tp == s.truth.size());
  }
}

TEST_CASE("grammatical fraction extremes")
{
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig c = quiet(seed);
    const auto s = synth_breathing(c);
    c.grammatical_fraction = 1.0;
    const auto all = score(asr_punct_ies(synth_transcript(s.truth, c)), s.truth);
    CHECK(all.fn == 0);
    CHECK(all.fp == 0);
    c.grammatical_fraction = 0.0;
    c.spurious_stop_rate_hz = 0.05;
    const auto none = score(asr_punct_ies(synth_transcript(s.truth, c)), s.truth);
    CHECK(none.tp == 0);
  }
}

TEST_CASE("partial grammaticality with spurious stops")
{
  ConfusionCounts total;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SynthConfig c = quiet(seed);
    c.grammatical_fraction = 0.57;
    c.spurious_stop_rate_hz = 0.031;
    const auto s = synth_breathing(c);
    total += score(asr_punct_ies(synth_transcript(s.truth, c)), s.truth);
  }
  const auto m = metrics(total);
  CHECK(*m.sensitivity == doctest::Approx(0.57).epsilon(0.05 / 0.57));
  CHECK(*m.specificity == doctest::Approx(0.70).epsilon(0.05 / 0.70));
}

TEST_CASE("detector recovers the planted inspirations")
{
  ConfusionCounts total;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthConfig c = quiet(seed);
    c.noise_sigma = 0.02;
    const auto s = synth_breathing(c);
    total += score(detect_ies(s.waveform, DetectorConfig{}).events, s.truth);
  }
  CHECK(*metrics(total).f1 >= 0.95);
}

TEST_CASE("invalid configurations")
{
  auto bad = [](auto mutate, const std::string& field) {
    SynthConfig c;
    mutate(c);
    try {
      c.validate();
      FAIL("accepted an invalid " << field);
    } catch (const ValidationError& e) {
      CHECK(e.field() == field);
    }
  };
  bad([](SynthConfig& c) { c.duration_s = 15.0; }, "duration_s");
  bad([](SynthConfig& c) { c.sample_rate_hz = 0.0; }, "sample_rate_hz");
  bad([](SynthConfig& c) { c.grammatical_fraction = 1.5; }, "grammatical_fraction");
  bad([](SynthConfig& c) { c.noise_sigma = -1.0; }, "noise_sigma");
  bad([](SynthConfig& c) { c.ie_duration_jitter_s = 0.3; }, "ie_duration_jitter_s");
  bad([](SynthConfig& c) { c.spurious_stop_rate_hz = -0.1; }, "spurious_stop_rate_hz");
  CHECK_THROWS_AS(synth_breathing([] {
                    SynthConfig c;
                    c.duration_s = 10.0;
                    return c;
                  }()),
                  ValidationError);
}
