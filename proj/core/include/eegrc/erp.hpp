#pragma once

#include <string>
#include <vector>

#include "eegrc/montage.hpp"
#include "eegrc/types.hpp"

namespace eegrc {

/// Element-wise mean of all epochs of one word type.
struct ConditionWaveform {
  WordType condition = WordType::kOrdinary;
  Eigen::MatrixXd data;  // channels x samples, µV
  std::size_t n_epochs = 0;
  double rate_hz = 0.0;
  double t0_ms = 0.0;
  std::vector<std::string> channel_names;

  double time_ms(Eigen::Index i) const { return t0_ms + static_cast<double>(i) * 1000.0 / rate_hz; }
};

/// Component windows in ms. Defaults are the canonical segmentation.
struct TimeWindows {
  TimeSpan n100{60.0, 120.0};
  TimeSpan p200{120.0, 320.0};
  TimeSpan n400{320.0, 520.0};
  TimeSpan p600{520.0, 750.0};

  friend bool operator==(const TimeWindows&, const TimeWindows&) = default;
};

/// Averages by word type. Conditions without epochs are omitted and, when
/// `warnings` is given, reported there. Throws DataError if epochs disagree
/// on rate, span or montage.
std::vector<ConditionWaveform> grand_average(const std::vector<EpochMatrix>& epochs,
                                             std::vector<std::string>* warnings = nullptr);

/// Pooled average of several waveforms weighted by their epoch counts.
ConditionWaveform pooled_average(const std::vector<ConditionWaveform>& waveforms);

struct GfpSeries {
  std::vector<double> values;
  double t0_ms = 0.0;
  double step_ms = 2.0;

  double time_ms(std::size_t i) const { return t0_ms + static_cast<double>(i) * step_ms; }
};

/// Population standard deviation across channels at every sample inside
/// `range`. Throws ConfigError for fewer than two channels.
GfpSeries global_field_power(const ConditionWaveform& w, TimeSpan range = {0.0, 750.0});

struct SegmentationOptions {
  double smoothing_ms = 20.0;
  double snap_radius_ms = 40.0;
};

/// Moves the 120/320/520 ms boundaries to the nearest local minimum of the
/// smoothed GFP within the snap radius; otherwise keeps the canonical value.
TimeWindows segment_time_windows(const GfpSeries& gfp, const SegmentationOptions& options = {});

/// Moving average with a centred window of `width` samples (shrunk at edges).
std::vector<double> moving_average(const std::vector<double>& x, std::size_t width);

/// Mean over the region's electrodes and the samples inside `window`.
double roi_mean(const ConditionWaveform& w, std::string_view region, TimeSpan window,
                const RoiMap& rois = RoiMap::defaults());

/// roi_mean(P200 window) - roi_mean(N100 window).
double n100_p200_amplitude(const ConditionWaveform& w, std::string_view region,
                           const TimeWindows& windows = {},
                           const RoiMap& rois = RoiMap::defaults());

/// Mean over `window` of every channel, for topography export.
Eigen::VectorXd channel_window_means(const ConditionWaveform& w, TimeSpan window);

/// Region-averaged time course.
Eigen::VectorXd roi_waveform(const ConditionWaveform& w, std::string_view region,
                             const RoiMap& rois = RoiMap::defaults());

}  // namespace eegrc
