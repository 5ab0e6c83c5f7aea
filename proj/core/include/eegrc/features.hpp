#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eegrc/montage.hpp"
#include "eegrc/types.hpp"

namespace eegrc {

struct BandSpec {
  std::string_view name;
  double low_hz = 0.0;
  double high_hz = 0.0;
};

inline constexpr std::array<BandSpec, 4> kBands{{
    {"delta", 0.5, 4.0},
    {"theta", 4.0, 8.0},
    {"alpha", 8.0, 13.0},
    {"beta", 13.0, 30.0},
}};

inline constexpr std::array<std::string_view, 3> kFeatureRegions{"central", "r-temporal",
                                                                 "parietal"};
inline constexpr std::array<TimeSpan, 3> kErpfWindows{
    {{120.0, 320.0}, {320.0, 520.0}, {520.0, 750.0}}};
inline constexpr std::array<std::string_view, 3> kErpfWindowNames{"p200", "n400", "p600"};
inline constexpr int kErpfPoints = 5;
inline constexpr TimeSpan kPostStimulus{0.0, 750.0};

// Per region: 4 band powers, 4 differential entropies, 3 windows x 5 points.
inline constexpr std::size_t kFeaturesPerRegion = 2 * kBands.size() + 3 * kErpfPoints;
inline constexpr std::size_t kFeatureDim = kFeaturesPerRegion * kFeatureRegions.size();
static_assert(kFeatureDim == 69);

/// Mean over the region's electrodes, full epoch length.
Eigen::VectorXd region_signal(const EpochMatrix& e, std::string_view region,
                              const RoiMap& rois = RoiMap::defaults());

/// Band-limited region signal restricted to the post-stimulus segment.
/// The zero-phase band-pass runs on the whole epoch before cropping.
Eigen::VectorXd band_limited(const EpochMatrix& e, const BandSpec& band, std::string_view region,
                             const RoiMap& rois = RoiMap::defaults());

/// Mean time-domain power (µV²) of the band-limited post-stimulus signal.
/// Throws ConfigError when the band exceeds Nyquist.
double band_power(const EpochMatrix& e, const BandSpec& band, std::string_view region,
                  const RoiMap& rois = RoiMap::defaults());

/// 0.5 * ln(2 pi e var). Throws DataError when var <= 0.
double gaussian_differential_entropy(double variance);

double differential_entropy(const EpochMatrix& e, const BandSpec& band, std::string_view region,
                            const RoiMap& rois = RoiMap::defaults());

/// k times evenly spaced over [start, end], both endpoints included.
std::vector<double> erp_sample_times(TimeSpan window, int k = kErpfPoints);

/// Region-averaged voltage at erp_sample_times(window, k), nearest sample.
/// Throws ConfigError when the window is outside the epoch.
std::vector<double> erp_time_points(const EpochMatrix& e, TimeSpan window, std::string_view region,
                                    int k = kErpfPoints, const RoiMap& rois = RoiMap::defaults());

struct WordFeatureVector {
  std::array<double, kFeatureDim> values{};
  WordLabel label;
  bool standardized = false;
};

/// Fixed order: for region in (central, r-temporal, parietal):
///   power[delta..beta], de[delta..beta], p200[0..4], n400[0..4], p600[0..4]
WordFeatureVector word_feature_vector(const EpochMatrix& e, const RoiMap& rois = RoiMap::defaults());

/// Names of the 69 dimensions in order, e.g. "central.power.delta".
const std::vector<std::string>& feature_names();

/// Per-dimension z-scoring with population statistics of the training set.
class FeatureScaler {
 public:
  /// Throws DataError for an empty set or a constant dimension (named).
  static FeatureScaler fit(const std::vector<WordFeatureVector>& train);

  WordFeatureVector apply(const WordFeatureVector& v) const;
  std::vector<WordFeatureVector> apply(const std::vector<WordFeatureVector>& vs) const;

  const std::array<double, kFeatureDim>& mean() const { return mean_; }
  const std::array<double, kFeatureDim>& stddev() const { return std_; }

 private:
  std::array<double, kFeatureDim> mean_{};
  std::array<double, kFeatureDim> std_{};
};

/// Feature table CSV:
///   participant_id,trial_id,word_index,word_type,sentence_relevance,f0..f68
/// plus sidecars <stem>.dims.txt (dimension order) and <stem>.questions.csv.
void write_feature_table(const std::vector<WordFeatureVector>& rows,
                         const std::filesystem::path& path);
std::vector<WordFeatureVector> read_feature_table(const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace eegrc
