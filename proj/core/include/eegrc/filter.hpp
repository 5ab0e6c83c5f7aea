#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace eegrc {

/// Second-order section in transposed direct form II, a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

/// Cascade of biquads. Designed once, applied to any number of channels.
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  /// Digital Butterworth band-pass from an `order`-pole analog prototype
  /// (2 * order poles after the band transform), bilinear with prewarping.
  /// Throws ConfigError unless 0 < low_hz < high_hz < rate_hz / 2.
  static SosFilter butterworth_bandpass(int order, double low_hz, double high_hz,
                                        double rate_hz);

  const std::vector<Biquad>& sections() const { return sections_; }

  std::complex<double> response(double freq_hz, double rate_hz) const;

  /// Causal single pass, in place, starting from zero state.
  void filter_in_place(std::span<double> x) const;

  /// Zero-phase forward-backward pass. The signal is extended by odd
  /// reflection of `pad` samples (clamped to size - 1) at both ends and each
  /// pass starts from the steady-state response to the edge value.
  std::vector<double> filtfilt(std::span<const double> x, std::size_t pad) const;

 private:
  void run(std::span<double> x, const std::vector<std::array<double, 2>>& zi,
           double scale) const;
  std::vector<std::array<double, 2>> steady_state() const;

  std::vector<Biquad> sections_;
};

}  // namespace eegrc
