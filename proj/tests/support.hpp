#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "eegrc/dataset.hpp"
#include "eegrc/montage.hpp"
#include "eegrc/random.hpp"
#include "eegrc/types.hpp"

namespace eegrc::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(std::hash<std::string>{}(tag) ^ reinterpret_cast<std::uintptr_t>(this));
    path_ = std::filesystem::temp_directory_path() /
            ("eegrc_" + tag + "_" + std::to_string(rng.next_u64() % 1000000007ULL));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// Epoch over [t0, t0 + n/rate) on the default montage, every channel
/// carrying fn(t_ms).
template <typename F>
EpochMatrix constant_montage_epoch(double rate_hz, double t0_ms, Eigen::Index n, F fn) {
  EpochMatrix e;
  e.rate_hz = rate_hz;
  e.t0_ms = t0_ms;
  e.channel_names = default_montage();
  e.data.resize(static_cast<Eigen::Index>(e.channel_names.size()), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = fn(e.time_ms(i));
    e.data.col(i).setConstant(v);
  }
  return e;
}

inline EpochMatrix sine_epoch(double freq_hz, double amplitude_uv, double rate_hz = 500.0) {
  const auto n = samples_for({-200.0, 750.0}, rate_hz);
  return constant_montage_epoch(rate_hz, -200.0, n, [&](double t) {
    return amplitude_uv * std::sin(2.0 * std::numbers::pi * freq_hz * t / 1000.0);
  });
}

/// Random standardized sentences with a handful of words each.
inline std::vector<Sentence> random_sentences(std::size_t n, int min_len, int max_len,
                                              std::uint64_t seed, int d = 69) {
  Rng rng(seed);
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < n; ++i) {
    Sentence s;
    s.participant_id = i % 2 == 0 ? "P01" : "P02";
    s.trial_id = static_cast<int>(i);
    s.question_id = static_cast<int>(i / 3);
    s.relevance = static_cast<Relevance>(i % 3);
    const int len = min_len + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - min_len + 1)));
    s.features.resize(len, d);
    for (Eigen::Index r = 0; r < s.features.rows(); ++r)
      for (Eigen::Index c = 0; c < s.features.cols(); ++c) s.features(r, c) = rng.normal();
    for (int w = 0; w < len; ++w) {
      s.word_indices.push_back(w);
      s.answer.push_back(s.positive() && w == 0 ? 1 : 0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace eegrc::test
