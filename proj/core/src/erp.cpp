#include "eegrc/erp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eegrc/error.hpp"

namespace eegrc {

namespace {

std::vector<Eigen::Index> region_rows(const std::vector<std::string>& channels,
                                      std::string_view region, const RoiMap& rois) {
  std::vector<Eigen::Index> rows;
  for (const auto& name : rois.electrodes(region)) {
    auto it = std::find(channels.begin(), channels.end(), name);
    if (it == channels.end())
      throw ConfigError("region '" + std::string(region) + "' electrode '" + name +
                        "' is not in the waveform");
    rows.push_back(static_cast<Eigen::Index>(it - channels.begin()));
  }
  return rows;
}

}  // namespace

std::vector<ConditionWaveform> grand_average(const std::vector<EpochMatrix>& epochs,
                                             std::vector<std::string>* warnings) {
  std::vector<ConditionWaveform> out;
  if (epochs.empty()) {
    if (warnings) warnings->push_back("no epochs to average");
    return out;
  }
  const auto& ref = epochs.front();
  for (const auto& e : epochs) {
    if (e.rate_hz != ref.rate_hz || e.t0_ms != ref.t0_ms || e.n_samples() != ref.n_samples() ||
        e.channel_names != ref.channel_names)
      throw DataError("grand_average: epochs differ in rate, span or montage");
  }
  for (auto type : kAllWordTypes) {
    ConditionWaveform w;
    w.condition = type;
    w.rate_hz = ref.rate_hz;
    w.t0_ms = ref.t0_ms;
    w.channel_names = ref.channel_names;
    w.data = Eigen::MatrixXd::Zero(ref.n_channels(), ref.n_samples());
    for (const auto& e : epochs) {
      if (e.label.word_type != type) continue;
      w.data += e.data;
      ++w.n_epochs;
    }
    if (w.n_epochs == 0) {
      if (warnings)
        warnings->push_back("no epochs for condition " + std::string(to_string(type)));
      continue;
    }
    w.data /= static_cast<double>(w.n_epochs);
    out.push_back(std::move(w));
  }
  return out;
}

ConditionWaveform pooled_average(const std::vector<ConditionWaveform>& waveforms) {
  if (waveforms.empty()) throw DataError("pooled_average: nothing to pool");
  ConditionWaveform out = waveforms.front();
  out.data.setZero();
  out.n_epochs = 0;
  for (const auto& w : waveforms) {
    if (w.data.rows() != out.data.rows() || w.data.cols() != out.data.cols())
      throw DataError("pooled_average: shape mismatch");
    out.data += w.data * static_cast<double>(w.n_epochs);
    out.n_epochs += w.n_epochs;
  }
  if (out.n_epochs == 0) throw DataError("pooled_average: zero epochs");
  out.data /= static_cast<double>(out.n_epochs);
  return out;
}

GfpSeries global_field_power(const ConditionWaveform& w, TimeSpan range) {
  if (w.data.rows() < 2) throw ConfigError("global field power needs at least two channels");
  const auto [first, last] = sample_range(w.t0_ms, w.rate_hz, w.data.cols(), range);
  GfpSeries gfp;
  gfp.step_ms = 1000.0 / w.rate_hz;
  gfp.t0_ms = w.time_ms(first);
  gfp.values.reserve(static_cast<std::size_t>(last - first));
  for (Eigen::Index i = first; i < last; ++i) {
    const auto col = w.data.col(i);
    const double mean = col.mean();
    gfp.values.push_back(std::sqrt((col.array() - mean).square().mean()));
  }
  return gfp;
}

std::vector<double> moving_average(const std::vector<double>& x, std::size_t width) {
  const std::size_t half = width / 2;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + half + 1);
    double s = 0.0;
    for (std::size_t j = lo; j < hi; ++j) s += x[j];
    out[i] = s / static_cast<double>(hi - lo);
  }
  return out;
}

TimeWindows segment_time_windows(const GfpSeries& gfp, const SegmentationOptions& options) {
  TimeWindows windows;
  if (gfp.values.size() < 3) return windows;

  auto width = static_cast<std::size_t>(std::llround(options.smoothing_ms / gfp.step_ms));
  width = std::max<std::size_t>(1, width | 1u);
  const auto smooth = moving_average(gfp.values, width);

  const double scale = *std::max_element(smooth.begin(), smooth.end());
  const double tol = 1e-12 * std::max(1.0, scale);

  // local minima, treating runs of equal values as one plateau
  std::vector<double> minima_ms;
  const std::size_t n = smooth.size();
  std::size_t a = 0;
  while (a < n) {
    std::size_t b = a;
    while (b + 1 < n && std::abs(smooth[b + 1] - smooth[a]) <= tol) ++b;
    const bool left_higher = a > 0 && smooth[a - 1] > smooth[a] + tol;
    const bool right_higher = b + 1 < n && smooth[b + 1] > smooth[b] + tol;
    if (left_higher && right_higher)
      minima_ms.push_back(0.5 * (gfp.time_ms(a) + gfp.time_ms(b)));
    a = b + 1;
  }

  auto snap = [&](double canonical) {
    double best = canonical;
    double best_dist = std::numeric_limits<double>::infinity();
    for (double m : minima_ms) {
      const double d = std::abs(m - canonical);
      if (d <= options.snap_radius_ms + 1e-9 && d < best_dist) {
        best = m;
        best_dist = d;
      }
    }
    return best;
  };

  const double b1 = snap(windows.n100.end_ms);
  const double b2 = snap(windows.p200.end_ms);
  const double b3 = snap(windows.n400.end_ms);
  windows.n100.end_ms = b1;
  windows.p200 = {b1, b2};
  windows.n400 = {b2, b3};
  windows.p600.start_ms = b3;
  return windows;
}

double roi_mean(const ConditionWaveform& w, std::string_view region, TimeSpan window,
                const RoiMap& rois) {
  const auto rows = region_rows(w.channel_names, region, rois);
  const double end = w.time_ms(w.data.cols());
  if (window.start_ms < w.t0_ms - 1e-6 || window.end_ms > end + 1e-6)
    throw ConfigError("window outside waveform span");
  const auto [first, last] = sample_range(w.t0_ms, w.rate_hz, w.data.cols(), window);
  if (last <= first) throw ConfigError("window contains no samples");
  double sum = 0.0;
  for (auto r : rows) sum += w.data.row(r).segment(first, last - first).sum();
  return sum / static_cast<double>(rows.size() * static_cast<std::size_t>(last - first));
}

double n100_p200_amplitude(const ConditionWaveform& w, std::string_view region,
                           const TimeWindows& windows, const RoiMap& rois) {
  return roi_mean(w, region, windows.p200, rois) - roi_mean(w, region, windows.n100, rois);
}

Eigen::VectorXd channel_window_means(const ConditionWaveform& w, TimeSpan window) {
  const auto [first, last] = sample_range(w.t0_ms, w.rate_hz, w.data.cols(), window);
  if (last <= first) throw ConfigError("window contains no samples");
  return w.data.middleCols(first, last - first).rowwise().mean();
}

Eigen::VectorXd roi_waveform(const ConditionWaveform& w, std::string_view region,
                             const RoiMap& rois) {
  const auto rows = region_rows(w.channel_names, region, rois);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(w.data.cols());
  for (auto r : rows) out += w.data.row(r).transpose();
  return out / static_cast<double>(rows.size());
}

}  // namespace eegrc
