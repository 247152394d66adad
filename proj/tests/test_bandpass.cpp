#include "breathkit/bandpass.hpp"
#include "breathkit/errors.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace breathkit;

namespace {

constexpr double kFs = 50.0;

FilterCascade default_filter() { return design_butterworth_bandpass(3, 0.08, 1.0, kFs); }

Eigen::VectorXd sine(double freq, double seconds, double fs = kFs, double amp = 1.0)
{
  const auto n = static_cast<Eigen::Index>(seconds * fs);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x(i) = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs);
  return x;
}

Eigen::VectorXd random_signal(std::mt19937_64& rng, Eigen::Index n)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

} // namespace

TEST_CASE("design: structure and stability")
{
  const auto f = default_filter();
  CHECK(f.sections().size() == 3); // 6 poles for a third-order prototype
  CHECK(f.state_length() == 6);
  for (const auto& q : f.sections())
    for (double r : pole_radii(q)) CHECK(r < 1.0);
  CHECK(f.design().order == 3);
  CHECK(f.design().sample_rate_hz == kFs);
}

TEST_CASE("design: zeros at DC and Nyquist are exact")
{
  const auto f = default_filter();
  CHECK(magnitude_response(f, 0.0) == 0.0);
  CHECK(magnitude_response(f, 25.0) == 0.0);
}

TEST_CASE("design: passband centre is unity")
{
  const auto f = default_filter();
  const double centre = std::sqrt(0.08 * 1.0);
  CHECK(magnitude_response(f, centre) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("design: response equals the prewarped analog prototype")
{
  for (int order : {1, 2, 3, 4, 5}) {
    for (auto [lo, hi, fs] : {std::tuple{0.08, 1.0, 50.0}, std::tuple{0.5, 4.0, 100.0},
                              std::tuple{1.0, 3.0, 16.0}}) {
      const auto f = design_butterworth_bandpass(order, lo, hi, fs);
      CHECK(f.sections().size() == static_cast<std::size_t>(order));
      for (double freq = 0.01; freq < fs / 2.0; freq *= 1.17) {
        const double expected = oracle::analog_bandpass_magnitude(freq, order, lo, hi, fs);
        CHECK(magnitude_response(f, freq) == doctest::Approx(expected).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("design: -3 dB at both band edges")
{
  const auto f = default_filter();
  CHECK(magnitude_response(f, 0.08) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(magnitude_response(f, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("design: invalid band edges are rejected")
{
  CHECK_THROWS_AS(design_butterworth_bandpass(3, 0.0, 1.0, kFs), ValidationError);
  CHECK_THROWS_AS(design_butterworth_bandpass(3, 1.0, 0.5, kFs), ValidationError);
  CHECK_THROWS_AS(design_butterworth_bandpass(3, 0.1, 25.0, kFs), ValidationError);
  CHECK_THROWS_AS(design_butterworth_bandpass(0, 0.1, 1.0, kFs), ValidationError);
  try {
    design_butterworth_bandpass(3, 0.08, 30.0, kFs);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "band_high_hz");
  }
}

TEST_CASE("design: failure when poles collapse onto the unit circle")
{
  // a 1e-13 Hz edge at 1 kHz puts poles within rounding of z = 1
  CHECK_THROWS_AS(design_butterworth_bandpass(12, 1e-13, 2e-13, 1000.0), NumericalError);
}

TEST_CASE("filtfilt: zero in, zero out")
{
  const auto y = filtfilt(default_filter(), Eigen::VectorXd(Eigen::VectorXd::Zero(1000)));
  CHECK(y.size() == 1000);
  CHECK(y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("filtfilt: 0.3 Hz sine keeps phase and gains |H|^2")
{
  const auto f = default_filter();
  const Waveform in(sine(0.3, 120.0), kFs, "sine");
  const Waveform out = filtfilt(f, in);
  REQUIRE(out.size() == in.size());
  CHECK(out.sample_rate_hz() == kFs);

  const Eigen::Index n = in.size();
  const Eigen::Index lo = n / 10, len = n * 8 / 10;
  const auto x = in.samples().segment(lo, len);
  const auto y = out.samples().segment(lo, len);

  Eigen::Index best_lag = 0;
  double best = -INFINITY;
  for (Eigen::Index lag = -60; lag <= 60; ++lag) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < len; ++i) acc += x(i) * out.samples()(lo + i + lag);
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);

  const double gain = std::pow(magnitude_response(f, 0.3), 2);
  const double amplitude = std::sqrt(y.squaredNorm() / x.squaredNorm());
  CHECK(amplitude == doctest::Approx(gain).epsilon(0.02));
}

TEST_CASE("filtfilt: DC and slow drift are removed")
{
  const auto f = default_filter();
  const Eigen::Index n = 6000;
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 5.0 + 0.01 * static_cast<double>(i) / kFs;
  const Eigen::VectorXd y = filtfilt(f, x);
  const auto rms = [](const auto& v) { return std::sqrt(v.squaredNorm() / double(v.size())); };
  const auto centre_y = y.segment(n / 10, n * 8 / 10);
  const auto centre_x = x.segment(n / 10, n * 8 / 10);
  CHECK(rms(centre_y) < 0.01 * rms(centre_x));
  // |H|^2 over 0..0.01 Hz predicts near-total rejection
  CHECK(std::pow(magnitude_response(f, 0.01), 2) < 1e-4);
}

TEST_CASE("filtfilt: linearity")
{
  std::mt19937_64 rng(7);
  const auto f = default_filter();
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = random_signal(rng, 800);
    const Eigen::VectorXd y = random_signal(rng, 800);
    const double a = 1.7, b = -0.4;
    const Eigen::VectorXd lhs = filtfilt(f, Eigen::VectorXd(a * x + b * y));
    const Eigen::VectorXd rhs = a * filtfilt(f, x) + b * filtfilt(f, y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("filtfilt: reversing the input reverses the output")
{
  std::mt19937_64 rng(11);
  const auto f = default_filter();
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = random_signal(rng, 500 + 37 * trial);
    const Eigen::VectorXd forward = filtfilt(f, x);
    const Eigen::VectorXd backward = filtfilt(f, Eigen::VectorXd(x.reverse()));
    CHECK((forward - backward.reverse()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("filtfilt: bounded input gives bounded output")
{
  std::mt19937_64 rng(13);
  const auto f = default_filter();
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd y = filtfilt(f, random_signal(rng, 10000));
    CHECK(y.cwiseAbs().maxCoeff() <= 100.0);
  }
}

TEST_CASE("filtfilt: short input and mismatched rate are rejected")
{
  const auto f = default_filter();
  CHECK(filtfilt_pad_length(f) == 18);
  CHECK_THROWS_AS(filtfilt(f, Eigen::VectorXd(Eigen::VectorXd::Ones(18))), ValidationError);
  CHECK_NOTHROW(filtfilt(f, Eigen::VectorXd(Eigen::VectorXd::Ones(19))));
  try {
    filtfilt(f, Eigen::VectorXd(Eigen::VectorXd::Ones(10)));
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("at least 19") != std::string::npos);
  }
  const Waveform other_rate(sine(0.3, 10.0, 100.0), 100.0);
  CHECK_THROWS_AS(filtfilt(f, other_rate), ValidationError);
}

TEST_CASE("coefficient dump lists every section")
{
  const std::string dump = dump_coefficients(default_filter());
  CHECK(dump.find("\"sections\"") != std::string::npos);
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = dump.find("\"a\"", pos)) != std::string::npos; ++pos) ++count;
  CHECK(count == 3);
}

TEST_CASE("scalar-generic kernels run in single precision")
{
  const auto f = default_filter();
  std::vector<Biquad<float>> sections;
  for (const auto& q : f.sections())
    sections.push_back({float(q.b0), float(q.b1), float(q.b2), float(q.a1), float(q.a2)});
  Eigen::VectorXf x = Eigen::VectorXf::Ones(200);
  SosState<float> state = sos_steady_state(sections);
  sosfilt_inplace(sections, x, state);
  // a band-pass settled on a constant input outputs ~0
  CHECK(x.cwiseAbs().maxCoeff() < 1e-3f);
}
