#include "eegrc/features.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "eegrc/error.hpp"
#include "eegrc/session_io.hpp"
#include "eegrc/signal.hpp"

namespace eegrc {

namespace fs = std::filesystem;

Eigen::VectorXd region_signal(const EpochMatrix& e, std::string_view region, const RoiMap& rois) {
  const auto& electrodes = rois.electrodes(region);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(e.n_samples());
  for (const auto& name : electrodes) {
    const auto idx = e.channel_index(name);
    if (!idx) throw ConfigError("epoch has no electrode '" + name + "' for region '" +
                                std::string(region) + "'");
    out += e.data.row(*idx).transpose();
  }
  return out / static_cast<double>(electrodes.size());
}

Eigen::VectorXd band_limited(const EpochMatrix& e, const BandSpec& band, std::string_view region,
                             const RoiMap& rois) {
  if (!(band.high_hz < e.rate_hz / 2.0))
    throw ConfigError("band " + std::string(band.name) + " exceeds Nyquist at " +
                      std::to_string(e.rate_hz) + " Hz");
  const Eigen::VectorXd signal = region_signal(e, region, rois);
  const auto filtered = bandpass({signal.data(), static_cast<std::size_t>(signal.size())},
                                 e.rate_hz, band.low_hz, band.high_hz);
  const auto [first, last] = sample_range(e, kPostStimulus);
  if (last <= first) throw ConfigError("epoch has no post-stimulus samples");
  return Eigen::Map<const Eigen::VectorXd>(filtered.data() + first, last - first);
}

double band_power(const EpochMatrix& e, const BandSpec& band, std::string_view region,
                  const RoiMap& rois) {
  const Eigen::VectorXd x = band_limited(e, band, region, rois);
  return x.squaredNorm() / static_cast<double>(x.size());
}

double gaussian_differential_entropy(double variance) {
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw DataError("differential entropy undefined for variance " + std::to_string(variance));
  return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * variance);
}

double differential_entropy(const EpochMatrix& e, const BandSpec& band, std::string_view region,
                            const RoiMap& rois) {
  const Eigen::VectorXd x = band_limited(e, band, region, rois);
  const double var = (x.array() - x.mean()).square().mean();
  return gaussian_differential_entropy(var);
}

std::vector<double> erp_sample_times(TimeSpan window, int k) {
  if (k < 1) throw ConfigError("need at least one ERP time point");
  std::vector<double> times(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j)
    times[static_cast<std::size_t>(j)] =
        k == 1 ? window.start_ms : window.start_ms + window.length() * j / (k - 1);
  return times;
}

std::vector<double> erp_time_points(const EpochMatrix& e, TimeSpan window, std::string_view region,
                                    int k, const RoiMap& rois) {
  constexpr double kTol = 1e-6;
  if (window.start_ms < e.t0_ms - kTol || window.end_ms > e.end_ms() + kTol ||
      window.end_ms < window.start_ms)
    throw ConfigError("ERP window outside epoch span");
  const Eigen::VectorXd signal = region_signal(e, region, rois);
  std::vector<double> out;
  for (double t : erp_sample_times(window, k)) {
    auto idx = static_cast<Eigen::Index>(std::llround((t - e.t0_ms) / e.step_ms()));
    idx = std::clamp<Eigen::Index>(idx, 0, e.n_samples() - 1);
    out.push_back(signal(idx));
  }
  return out;
}

WordFeatureVector word_feature_vector(const EpochMatrix& e, const RoiMap& rois) {
  WordFeatureVector v;
  v.label = e.label;
  std::size_t pos = 0;
  for (auto region : kFeatureRegions) {
    std::array<double, kBands.size()> variances{};
    for (std::size_t b = 0; b < kBands.size(); ++b) {
      const Eigen::VectorXd x = band_limited(e, kBands[b], region, rois);
      v.values[pos++] = x.squaredNorm() / static_cast<double>(x.size());
      variances[b] = (x.array() - x.mean()).square().mean();
    }
    for (double var : variances) v.values[pos++] = gaussian_differential_entropy(var);
    for (auto window : kErpfWindows)
      for (double p : erp_time_points(e, window, region, kErpfPoints, rois)) v.values[pos++] = p;
  }
  for (double x : v.values)
    if (!std::isfinite(x)) throw DataError("non-finite feature value");
  return v;
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (auto region : kFeatureRegions) {
      const std::string r(region);
      for (const auto& band : kBands) out.push_back(r + ".power." + std::string(band.name));
      for (const auto& band : kBands) out.push_back(r + ".de." + std::string(band.name));
      for (std::size_t w = 0; w < kErpfWindows.size(); ++w)
        for (double t : erp_sample_times(kErpfWindows[w]))
          out.push_back(r + ".erp." + std::string(kErpfWindowNames[w]) + "." +
                        std::to_string(static_cast<int>(std::lround(t))) + "ms");
    }
    return out;
  }();
  return names;
}

FeatureScaler FeatureScaler::fit(const std::vector<WordFeatureVector>& train) {
  if (train.empty()) throw DataError("cannot fit scaler on an empty training set");
  FeatureScaler s;
  const auto n = static_cast<double>(train.size());
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    double mean = 0.0;
    for (const auto& v : train) mean += v.values[d];
    mean /= n;
    double ss = 0.0;
    for (const auto& v : train) ss += (v.values[d] - mean) * (v.values[d] - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean))))
      throw DataError("feature dimension " + std::to_string(d) + " (" + feature_names()[d] +
                      ") is constant on the training set");
    s.mean_[d] = mean;
    s.std_[d] = sd;
  }
  return s;
}

WordFeatureVector FeatureScaler::apply(const WordFeatureVector& v) const {
  WordFeatureVector out = v;
  for (std::size_t d = 0; d < kFeatureDim; ++d) out.values[d] = (v.values[d] - mean_[d]) / std_[d];
  out.standardized = true;
  return out;
}

std::vector<WordFeatureVector> FeatureScaler::apply(const std::vector<WordFeatureVector>& vs) const {
  std::vector<WordFeatureVector> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(apply(v));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

fs::path sidecar(const fs::path& table, const std::string& suffix) {
  return table.parent_path() / (table.stem().string() + suffix);
}

}  // namespace

void write_feature_table(const std::vector<WordFeatureVector>& rows, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "participant_id,trial_id,word_index,word_type,sentence_relevance";
  for (std::size_t d = 0; d < kFeatureDim; ++d) out << ",f" << d;
  out << '\n';
  for (const auto& r : rows) {
    out << r.label.participant_id << ',' << r.label.trial_id << ',' << r.label.word_index << ','
        << to_string(r.label.word_type) << ',' << to_string(r.label.sentence_relevance);
    for (double x : r.values) out << ',' << format_double(x);
    out << '\n';
  }

  std::ofstream dims(sidecar(path, ".dims.txt"));
  dims << "# column fN of " << path.filename().string() << " holds dimension N below\n";
  dims << "# power: mean power of the band-passed 0-750 ms region signal (uV^2)\n";
  dims << "# de: 0.5*ln(2*pi*e*variance) of the same signal\n";
  dims << "# erp: region-averaged voltage at the given latency (uV)\n";
  for (std::size_t d = 0; d < kFeatureDim; ++d) dims << 'f' << d << ' ' << feature_names()[d] << '\n';

  std::ofstream questions(sidecar(path, ".questions.csv"));
  questions << "participant_id,trial_id,question_id\n";
  std::map<std::pair<std::string, int>, int> seen;
  for (const auto& r : rows) seen[{r.label.participant_id, r.label.trial_id}] = r.label.question_id;
  for (const auto& [key, q] : seen) questions << key.first << ',' << key.second << ',' << q << '\n';
}

std::vector<WordFeatureVector> read_feature_table(const fs::path& path) {
  const auto table = read_csv(path);
  const auto c_pid = table.column("participant_id");
  const auto c_trial = table.column("trial_id");
  const auto c_word = table.column("word_index");
  const auto c_type = table.column("word_type");
  const auto c_rel = table.column("sentence_relevance");
  std::array<std::size_t, kFeatureDim> cols{};
  for (std::size_t d = 0; d < kFeatureDim; ++d) cols[d] = table.column("f" + std::to_string(d));

  std::map<std::pair<std::string, int>, int> questions;
  const auto qpath = sidecar(path, ".questions.csv");
  if (fs::exists(qpath)) {
    const auto qt = read_csv(qpath);
    const auto qp = qt.column("participant_id");
    const auto qtr = qt.column("trial_id");
    const auto qq = qt.column("question_id");
    for (const auto& row : qt.rows)
      questions[{row[qp], parse_int(row[qtr], "trial_id")}] = parse_int(row[qq], "question_id");
  }

  std::vector<WordFeatureVector> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    WordFeatureVector v;
    v.label.participant_id = row[c_pid];
    v.label.trial_id = parse_int(row[c_trial], "trial_id");
    v.label.word_index = parse_int(row[c_word], "word_index");
    v.label.word_type = parse_word_type(row[c_type]);
    v.label.sentence_relevance = parse_relevance(row[c_rel]);
    auto q = questions.find({v.label.participant_id, v.label.trial_id});
    v.label.question_id = q == questions.end() ? v.label.trial_id : q->second;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
      v.values[d] = parse_double(row[cols[d]], "feature");
      if (!std::isfinite(v.values[d])) throw DataError("non-finite feature in " + path.string());
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace eegrc
