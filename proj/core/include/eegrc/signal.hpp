#pragma once

#include <span>
#include <string>
#include <vector>

#include "eegrc/types.hpp"

namespace eegrc {

inline constexpr TimeSpan kEpochSpan{-200.0, 750.0};
inline constexpr TimeSpan kBaselineWindow{-200.0, 0.0};
inline constexpr double kArtifactThresholdUv = 100.0;
inline constexpr double kBandLowHz = 0.5;
inline constexpr double kBandHighHz = 30.0;
inline constexpr double kAnalysisRateHz = 500.0;
inline constexpr int kButterworthOrder = 4;

/// Every channel c becomes c - (A1 + A2) / 2. Throws ConfigError naming the
/// missing mastoid.
SessionRecording rereference_to_mastoids(SessionRecording rec);

/// Subtracts each channel's mean over the whole recording.
SessionRecording remove_channel_offsets(SessionRecording rec);

/// Zero-phase Butterworth band-pass per channel. Throws ConfigError when the
/// band violates Nyquist.
SessionRecording bandpass_filter(SessionRecording rec, double low_hz = kBandLowHz,
                                 double high_hz = kBandHighHz);

/// Band-pass a single row with the same filter family as bandpass_filter.
std::vector<double> bandpass(std::span<const double> x, double rate_hz, double low_hz,
                             double high_hz);

struct SkippedEpoch {
  int trial_id = 0;
  int word_index = 0;
  std::string reason;
};

struct EpochExtraction {
  std::vector<EpochMatrix> epochs;
  std::vector<SkippedEpoch> skipped;
};

/// One epoch per word-onset trigger covering [onset + span.start, onset +
/// span.end). Triggers too close to either end of the recording are skipped
/// and listed. Throws DataError if a word-onset has no label.
EpochExtraction extract_epochs(const SessionRecording& rec, TimeSpan span = kEpochSpan);

/// Subtracts the per-channel mean over `window`. Throws ConfigError if the
/// window is not inside the epoch.
EpochMatrix baseline_correct(const EpochMatrix& e, TimeSpan window = kBaselineWindow);

struct ArtifactPartition {
  std::vector<EpochMatrix> kept;
  std::vector<EpochMatrix> rejected;
};

/// Rejects an epoch iff max |v| > threshold (strict).
ArtifactPartition reject_artifacts(std::vector<EpochMatrix> epochs,
                                   double threshold_uv = kArtifactThresholdUv);

double peak_abs(const EpochMatrix& e);

/// Integer decimation to `target_hz`. The data must already be low-passed
/// below target_hz / 2 (`lowpass_edge_hz`); keeps floor(n * target / rate)
/// samples. Throws ConfigError for non-integer factors.
SessionRecording downsample(const SessionRecording& rec, double target_hz = kAnalysisRateHz,
                            double lowpass_edge_hz = kBandHighHz);
EpochMatrix downsample(const EpochMatrix& e, double target_hz = kAnalysisRateHz,
                       double lowpass_edge_hz = kBandHighHz);

struct PreprocessOptions {
  double low_hz = kBandLowHz;
  double high_hz = kBandHighHz;
  double threshold_uv = kArtifactThresholdUv;
  double target_hz = kAnalysisRateHz;
  TimeSpan span = kEpochSpan;
  TimeSpan baseline = kBaselineWindow;
};

struct RejectedEpoch {
  WordLabel label;
  double peak_uv = 0.0;
};

struct PreprocessResult {
  std::vector<EpochMatrix> epochs;  // kept, decimated, baseline-corrected
  std::vector<RejectedEpoch> rejected;
  std::vector<SkippedEpoch> skipped;
};

/// rereference -> offset removal -> band-pass -> epoching at the native rate
/// -> artifact screen -> decimation -> baseline correction.
PreprocessResult preprocess_session(const SessionRecording& rec,
                                    const PreprocessOptions& options = {});

/// Copy of the epoch restricted to the listed channels, in that order.
EpochMatrix select_channels(const EpochMatrix& e, const std::vector<std::string>& names);

}  // namespace eegrc
