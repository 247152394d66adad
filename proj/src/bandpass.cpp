#include "breathkit/bandpass.hpp"

#include "breathkit/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace breathkit {

namespace {

using cplx = std::complex<double>;

// Denominator of a section built from a pole and its conjugate partner, or
// from two real poles.
Biquad<double> section_from_poles(cplx p1, cplx p2, double gain)
{
  Biquad<double> q;
  q.b0 = gain;
  q.b1 = 0.0;
  q.b2 = -gain;
  q.a1 = -(p1 + p2).real();
  q.a2 = (p1 * p2).real();
  return q;
}

cplx bilinear(cplx s, double fs2) { return (fs2 + s) / (fs2 - s); }

} // namespace

FilterCascade::FilterCascade(std::vector<Biquad<double>> sections, FilterDesign design)
    : sections_(std::move(sections)), design_(design)
{
  if (sections_.empty()) throw ValidationError("sections", "cascade is empty");
  for (const auto& q : sections_) {
    for (double c : {q.b0, q.b1, q.b2, q.a1, q.a2})
      if (!std::isfinite(c)) throw NumericalError("filter coefficient is not finite");
    for (double r : pole_radii(q))
      if (!(r < 1.0))
        throw NumericalError("filter section is unstable (pole radius " +
                             std::to_string(r) + ")");
  }
}

std::vector<double> pole_radii(const Biquad<double>& q)
{
  const cplx disc = std::sqrt(cplx(q.a1 * q.a1 - 4.0 * q.a2, 0.0));
  const cplx r1 = (-q.a1 + disc) / 2.0;
  const cplx r2 = (-q.a1 - disc) / 2.0;
  return {std::abs(r1), std::abs(r2)};
}

FilterCascade design_butterworth_bandpass(int order, double low_hz, double high_hz,
                                          double sample_rate_hz)
{
  if (order < 1) throw ValidationError("filter_order", "must be >= 1");
  if (!(sample_rate_hz > 0.0))
    throw ValidationError("sample_rate_hz", "must be positive");
  if (!(low_hz > 0.0)) throw ValidationError("band_low_hz", "must be > 0");
  if (!(high_hz > low_hz))
    throw ValidationError("band_high_hz", "must exceed band_low_hz");
  if (!(high_hz < sample_rate_hz / 2.0))
    throw ValidationError("band_high_hz", "must lie below the Nyquist frequency");

  const double pi = std::numbers::pi;
  const double fs2 = 2.0 * sample_rate_hz;
  const double warped_low = fs2 * std::tan(pi * low_hz / sample_rate_hz);
  const double warped_high = fs2 * std::tan(pi * high_hz / sample_rate_hz);
  const double center = std::sqrt(warped_low * warped_high);
  const double bandwidth = warped_high - warped_low;

  // Prototype poles on the left half of the unit circle; only the upper half
  // and the real pole are visited, conjugates are implied by the sections.
  std::vector<std::pair<cplx, cplx>> pole_pairs;
  cplx analog_pole_product{1.0, 0.0};
  for (int m = -order + 1; m < order; m += 2) {
    const cplx proto = -std::exp(cplx(0.0, pi * m / (2.0 * order)));
    const cplx half = proto * (bandwidth / 2.0);
    const cplx root = std::sqrt(half * half - center * center);
    const cplx s1 = half + root;
    const cplx s2 = half - root;
    analog_pole_product *= (fs2 - s1) * (fs2 - s2);

    if (m < 0) continue; // lower half-plane partner handled by conjugation
    const cplx z1 = bilinear(s1, fs2);
    const cplx z2 = bilinear(s2, fs2);
    if (m == 0) {
      // real prototype pole: two real poles or one conjugate pair
      if ((half * half - center * center).real() < 0.0)
        pole_pairs.emplace_back(z1, std::conj(z1));
      else
        pole_pairs.emplace_back(cplx(z1.real(), 0.0), cplx(z2.real(), 0.0));
    } else {
      pole_pairs.emplace_back(z1, std::conj(z1));
      pole_pairs.emplace_back(z2, std::conj(z2));
    }
  }

  // Zeros: `order` at s = 0 (z = 1) and `order` at infinity (z = -1).
  const double gain =
      (std::pow(bandwidth * fs2, order) / analog_pole_product).real();
  if (!std::isfinite(gain) || gain == 0.0)
    throw NumericalError("band-pass design failed: gain is not representable");

  std::sort(pole_pairs.begin(), pole_pairs.end(), [](const auto& l, const auto& r) {
    return std::abs(l.first) < std::abs(r.first);
  });

  const double section_gain = std::pow(std::abs(gain), 1.0 / order);
  std::vector<Biquad<double>> sections;
  for (const auto& [p1, p2] : pole_pairs)
    sections.push_back(section_from_poles(p1, p2, section_gain));
  if (gain < 0.0) {
    sections.front().b0 = -sections.front().b0;
    sections.front().b2 = -sections.front().b2;
  }

  try {
    return FilterCascade(std::move(sections),
                         FilterDesign{order, low_hz, high_hz, sample_rate_hz});
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("band-pass design failed: ") + e.what());
  }
}

std::complex<double> frequency_response(const FilterCascade& filter, double freq_hz)
{
  const double fs = filter.design().sample_rate_hz;
  // e^{-j*pi} from std::polar carries a 1e-16 imaginary residue; pin DC and
  // Nyquist so their exact zeros stay exact
  cplx z1;
  if (freq_hz == 0.0)
    z1 = 1.0;
  else if (2.0 * freq_hz == fs)
    z1 = -1.0;
  else
    z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs);
  const cplx z2 = z1 * z1;
  cplx h{1.0, 0.0};
  for (const auto& q : filter.sections())
    h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
  return h;
}

namespace {

Eigen::VectorXd forward_backward(const FilterCascade& filter,
                                 const Eigen::VectorXd& x)
{
  const Eigen::Index n = x.size();
  const Eigen::Index pad = filtfilt_pad_length(filter);
  const auto& sections = filter.sections();
  const auto steady = sos_steady_state(sections);

  Eigen::VectorXd ext(n + 2 * pad);
  ext.segment(pad, n) = x;
  for (Eigen::Index i = 1; i <= pad; ++i) {
    ext(pad - i) = 2.0 * x(0) - x(i);
    ext(pad + n - 1 + i) = 2.0 * x(n - 1) - x(n - 1 - i);
  }

  auto run = [&](Eigen::VectorXd& y) {
    SosState<double> state = steady;
    const double first = y(0);
    for (auto& s : state) {
      s[0] *= first;
      s[1] *= first;
    }
    sosfilt_inplace(sections, y, state);
  };

  run(ext);
  ext.reverseInPlace();
  run(ext);
  ext.reverseInPlace();
  return ext.segment(pad, n);
}

} // namespace

Eigen::VectorXd filtfilt(const FilterCascade& filter,
                         const Eigen::Ref<const Eigen::VectorXd>& input)
{
  const Eigen::Index min_len = filtfilt_pad_length(filter) + 1;
  if (input.size() < min_len)
    throw ValidationError("samples", "input has " + std::to_string(input.size()) +
                                         " samples; filtfilt needs at least " +
                                         std::to_string(min_len));

  const Eigen::VectorXd x = input;
  const Eigen::VectorXd reversed = x.reverse();
  Eigen::VectorXd forward = forward_backward(filter, x);
  const Eigen::VectorXd backward = forward_backward(filter, reversed).reverse();
  // a + b == b + a exactly, so the average is bitwise symmetric under reversal
  return 0.5 * (forward + backward);
}

Waveform filtfilt(const FilterCascade& filter, const Waveform& input)
{
  const double design_rate = filter.design().sample_rate_hz;
  if (std::abs(design_rate - input.sample_rate_hz()) > 1e-9 * design_rate)
    throw ValidationError("sample_rate_hz",
                          "waveform rate " + std::to_string(input.sample_rate_hz()) +
                              " Hz does not match filter design rate " +
                              std::to_string(design_rate) + " Hz");
  return input.with_samples(filtfilt(filter, input.samples()));
}

std::string dump_coefficients(const FilterCascade& filter)
{
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  nlohmann::ordered_json doc;
  doc["order"] = filter.design().order;
  doc["low_hz"] = filter.design().low_hz;
  doc["high_hz"] = filter.design().high_hz;
  doc["sample_rate_hz"] = filter.design().sample_rate_hz;
  doc["sections"] = nlohmann::ordered_json::array();
  for (const auto& q : filter.sections()) {
    nlohmann::ordered_json s;
    s["b"] = {fmt(q.b0), fmt(q.b1), fmt(q.b2)};
    s["a"] = {"1", fmt(q.a1), fmt(q.a2)};
    doc["sections"].push_back(s);
  }
  return doc.dump(2);
}

} // namespace breathkit
