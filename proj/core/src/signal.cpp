#include "eegrc/signal.hpp"

#include <cmath>
#include <numeric>

#include "eegrc/error.hpp"
#include "eegrc/filter.hpp"

namespace eegrc {

namespace {

// Three periods of the lower cutoff; filtfilt clamps it to the signal length.
std::size_t pad_length(double rate_hz, double low_hz) {
  return 3 * static_cast<std::size_t>(std::ceil(rate_hz / low_hz));
}

void filter_rows(Eigen::MatrixXd& data, const SosFilter& filter, std::size_t pad) {
  std::vector<double> row(static_cast<std::size_t>(data.cols()));
  for (Eigen::Index c = 0; c < data.rows(); ++c) {
    Eigen::Map<Eigen::RowVectorXd>(row.data(), data.cols()) = data.row(c);
    const auto out = filter.filtfilt(row, pad);
    data.row(c) = Eigen::Map<const Eigen::RowVectorXd>(out.data(), data.cols());
  }
}

Eigen::Index decimation_factor(double rate_hz, double target_hz, double lowpass_edge_hz) {
  if (!(target_hz > 0.0)) throw ConfigError("target rate must be positive");
  const double ratio = rate_hz / target_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9)
    throw ConfigError("cannot decimate " + std::to_string(rate_hz) + " Hz to " +
                      std::to_string(target_hz) + " Hz: factor is not an integer");
  if (rounded > 1.0 && !(target_hz / 2.0 > lowpass_edge_hz))
    throw ConfigError("target rate Nyquist must exceed the low-pass edge");
  return static_cast<Eigen::Index>(rounded);
}

Eigen::MatrixXd decimate(const Eigen::MatrixXd& data, Eigen::Index factor) {
  const Eigen::Index n = data.cols() / factor;
  Eigen::MatrixXd out(data.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) out.col(i) = data.col(i * factor);
  return out;
}

}  // namespace

SessionRecording rereference_to_mastoids(SessionRecording rec) {
  const auto a1 = rec.channel_index("A1");
  if (!a1) throw ConfigError("mastoid channel A1 missing from recording");
  const auto a2 = rec.channel_index("A2");
  if (!a2) throw ConfigError("mastoid channel A2 missing from recording");

  const Eigen::RowVectorXd reference = 0.5 * (rec.data.row(*a1) + rec.data.row(*a2));
  rec.data.rowwise() -= reference;
  return rec;
}

SessionRecording remove_channel_offsets(SessionRecording rec) {
  if (rec.data.cols() > 0) {
    const Eigen::VectorXd mean = rec.data.rowwise().mean();
    rec.data.colwise() -= mean;
  }
  return rec;
}

SessionRecording bandpass_filter(SessionRecording rec, double low_hz, double high_hz) {
  const auto filter =
      SosFilter::butterworth_bandpass(kButterworthOrder, low_hz, high_hz, rec.rate_hz);
  filter_rows(rec.data, filter, pad_length(rec.rate_hz, low_hz));
  return rec;
}

std::vector<double> bandpass(std::span<const double> x, double rate_hz, double low_hz,
                             double high_hz) {
  const auto filter = SosFilter::butterworth_bandpass(kButterworthOrder, low_hz, high_hz, rate_hz);
  return filter.filtfilt(x, pad_length(rate_hz, low_hz));
}

EpochExtraction extract_epochs(const SessionRecording& rec, TimeSpan span) {
  if (!(span.end_ms > span.start_ms)) throw ConfigError("epoch span must be non-empty");
  const Eigen::Index pre =
      static_cast<Eigen::Index>(std::llround(-span.start_ms * rec.rate_hz / 1000.0));
  const Eigen::Index length = samples_for(span, rec.rate_hz);

  EpochExtraction result;
  for (const auto& trig : rec.triggers) {
    if (trig.code != EventCode::kWordOnset) continue;
    const int word = trig.word_index.value_or(-1);
    const Eigen::Index first = trig.sample_index - pre;
    if (first < 0 || first + length > rec.n_samples()) {
      result.skipped.push_back({trig.trial_id, word, "epoch exceeds recording bounds"});
      continue;
    }
    const WordLabel* label = rec.find_label(trig.trial_id, word);
    if (!label)
      throw DataError("no label for trial " + std::to_string(trig.trial_id) + " word " +
                      std::to_string(word));
    EpochMatrix e;
    e.data = rec.data.middleCols(first, length);
    e.rate_hz = rec.rate_hz;
    e.t0_ms = span.start_ms;
    e.channel_names = rec.channel_names;
    e.label = *label;
    e.label.participant_id = rec.participant_id;
    e.label.question_id = rec.question_of(trig.trial_id);
    result.epochs.push_back(std::move(e));
  }
  return result;
}

EpochMatrix baseline_correct(const EpochMatrix& e, TimeSpan window) {
  constexpr double kTol = 1e-6;
  if (window.start_ms < e.t0_ms - kTol || window.end_ms > e.end_ms() + kTol ||
      !(window.end_ms > window.start_ms))
    throw ConfigError("baseline window outside epoch span");
  const auto [first, last] = sample_range(e, window);
  if (last <= first) throw ConfigError("baseline window contains no samples");
  EpochMatrix out = e;
  const Eigen::VectorXd mean = e.data.middleCols(first, last - first).rowwise().mean();
  out.data.colwise() -= mean;
  return out;
}

double peak_abs(const EpochMatrix& e) {
  return e.data.size() == 0 ? 0.0 : e.data.cwiseAbs().maxCoeff();
}

ArtifactPartition reject_artifacts(std::vector<EpochMatrix> epochs, double threshold_uv) {
  ArtifactPartition out;
  for (auto& e : epochs) {
    if (peak_abs(e) > threshold_uv)
      out.rejected.push_back(std::move(e));
    else
      out.kept.push_back(std::move(e));
  }
  return out;
}

SessionRecording downsample(const SessionRecording& rec, double target_hz,
                            double lowpass_edge_hz) {
  const auto factor = decimation_factor(rec.rate_hz, target_hz, lowpass_edge_hz);
  SessionRecording out = rec;
  if (factor == 1) return out;
  out.data = decimate(rec.data, factor);
  out.rate_hz = rec.rate_hz / static_cast<double>(factor);
  for (auto& t : out.triggers) t.sample_index /= factor;
  return out;
}

EpochMatrix downsample(const EpochMatrix& e, double target_hz, double lowpass_edge_hz) {
  const auto factor = decimation_factor(e.rate_hz, target_hz, lowpass_edge_hz);
  EpochMatrix out = e;
  if (factor == 1) return out;
  out.data = decimate(e.data, factor);
  out.rate_hz = e.rate_hz / static_cast<double>(factor);
  return out;
}

PreprocessResult preprocess_session(const SessionRecording& rec,
                                    const PreprocessOptions& options) {
  rec.validate();
  auto clean = rereference_to_mastoids(rec);
  clean = remove_channel_offsets(std::move(clean));
  clean = bandpass_filter(std::move(clean), options.low_hz, options.high_hz);

  auto extraction = extract_epochs(clean, options.span);
  clean = SessionRecording{};  // release the continuous data early

  auto partition = reject_artifacts(std::move(extraction.epochs), options.threshold_uv);

  PreprocessResult result;
  result.skipped = std::move(extraction.skipped);
  for (const auto& e : partition.rejected) result.rejected.push_back({e.label, peak_abs(e)});
  result.epochs.reserve(partition.kept.size());
  for (const auto& e : partition.kept)
    result.epochs.push_back(
        baseline_correct(downsample(e, options.target_hz, options.high_hz), options.baseline));
  return result;
}

EpochMatrix select_channels(const EpochMatrix& e, const std::vector<std::string>& names) {
  EpochMatrix out;
  out.rate_hz = e.rate_hz;
  out.t0_ms = e.t0_ms;
  out.label = e.label;
  out.channel_names = names;
  out.data.resize(static_cast<Eigen::Index>(names.size()), e.n_samples());
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto idx = e.channel_index(names[i]);
    if (!idx) throw ConfigError("epoch has no channel '" + names[i] + "'");
    out.data.row(static_cast<Eigen::Index>(i)) = e.data.row(*idx);
  }
  return out;
}

}  // namespace eegrc
