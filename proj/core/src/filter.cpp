#include "eegrc/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eegrc/error.hpp"

namespace eegrc {

namespace {

using cplx = std::complex<double>;

Biquad section_from_poles(cplx p1, cplx p2) {
  // zeros at z = +1 and z = -1: (1 - z^-1)(1 + z^-1) = 1 - z^-2
  Biquad s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;
  const cplx sum = p1 + p2;
  const cplx prod = p1 * p2;
  s.a1 = -sum.real();
  s.a2 = prod.real();
  return s;
}

}  // namespace

SosFilter SosFilter::butterworth_bandpass(int order, double low_hz, double high_hz,
                                          double rate_hz) {
  if (order < 1) throw ConfigError("filter order must be >= 1");
  if (!(rate_hz > 0.0)) throw ConfigError("sampling rate must be positive");
  if (!(low_hz > 0.0) || !(high_hz > low_hz) || !(high_hz < rate_hz / 2.0))
    throw ConfigError("band edges must satisfy 0 < low < high < rate/2 (got " +
                      std::to_string(low_hz) + ".." + std::to_string(high_hz) + " Hz at " +
                      std::to_string(rate_hz) + " Hz)");

  const double fs2 = 2.0 * rate_hz;
  const double wl = fs2 * std::tan(std::numbers::pi * low_hz / rate_hz);
  const double wh = fs2 * std::tan(std::numbers::pi * high_hz / rate_hz);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  // Analog prototype poles on the left half of the unit circle, then the
  // low-pass -> band-pass substitution s -> (s^2 + w0^2) / (s * bw).
  std::vector<cplx> analog;
  for (int m = -order + 1; m < order; m += 2) {
    const cplx p = -std::exp(cplx(0.0, std::numbers::pi * m / (2.0 * order)));
    const cplx plp = p * (bw / 2.0);
    const cplx disc = std::sqrt(plp * plp - w0sq);
    analog.push_back(plp + disc);
    analog.push_back(plp - disc);
  }

  std::vector<cplx> upper;
  std::vector<double> reals;
  for (const auto& s : analog) {
    const cplx z = (fs2 + s) / (fs2 - s);
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)))
      reals.push_back(z.real());
    else if (z.imag() > 0.0)
      upper.push_back(z);
  }
  std::sort(upper.begin(), upper.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });

  std::vector<Biquad> sections;
  for (const auto& p : upper) sections.push_back(section_from_poles(p, std::conj(p)));
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
    sections.push_back(section_from_poles(reals[i], reals[i + 1]));
  if (reals.size() % 2 == 1) {
    // first-order remainder; its numerator pairs one zero at +1 with one at -1
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -reals.back();
    s.a2 = 0.0;
    sections.push_back(s);
  }

  SosFilter filter(std::move(sections));
  // unit gain at the geometric band centre
  const double fc = rate_hz / std::numbers::pi * std::atan(std::sqrt(w0sq) / fs2);
  const double gain = std::abs(filter.response(fc, rate_hz));
  const double per_section = std::pow(gain, -1.0 / static_cast<double>(filter.sections_.size()));
  for (auto& s : filter.sections_) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }
  return filter;
}

std::complex<double> SosFilter::response(double freq_hz, double rate_hz) const {
  const cplx zinv = std::exp(cplx(0.0, -2.0 * std::numbers::pi * freq_hz / rate_hz));
  cplx h(1.0, 0.0);
  for (const auto& s : sections_) {
    const cplx num = s.b0 + zinv * (s.b1 + zinv * s.b2);
    const cplx den = 1.0 + zinv * (s.a1 + zinv * s.a2);
    h *= num / den;
  }
  return h;
}

std::vector<std::array<double, 2>> SosFilter::steady_state() const {
  // Per-section state reached after a unit step, each section scaled by the
  // DC gain of the sections before it.
  std::vector<std::array<double, 2>> zi;
  zi.reserve(sections_.size());
  double input_level = 1.0;
  for (const auto& s : sections_) {
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y = dc * input_level;
    zi.push_back({y - s.b0 * input_level, s.b2 * input_level - s.a2 * y});
    input_level = y;
  }
  return zi;
}

void SosFilter::run(std::span<double> x, const std::vector<std::array<double, 2>>& zi,
                    double scale) const {
  for (std::size_t k = 0; k < sections_.size(); ++k) {
    const auto& s = sections_[k];
    double z1 = zi.empty() ? 0.0 : zi[k][0] * scale;
    double z2 = zi.empty() ? 0.0 : zi[k][1] * scale;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

void SosFilter::filter_in_place(std::span<double> x) const { run(x, {}, 0.0); }

std::vector<double> SosFilter::filtfilt(std::span<const double> x, std::size_t pad) const {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n == 1) return {x[0] * std::norm(response(0.0, 1.0))};
  pad = std::min(pad, n - 1);

  std::vector<double> ext(n + 2 * pad);
  const double first = x.front();
  const double last = x.back();
  for (std::size_t i = 0; i < pad; ++i) ext[i] = 2.0 * first - x[pad - i];
  std::copy(x.begin(), x.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));
  for (std::size_t i = 0; i < pad; ++i) ext[pad + n + i] = 2.0 * last - x[n - 2 - i];

  const auto zi = steady_state();
  run(ext, zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  run(ext, zi, ext.front());
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace eegrc
