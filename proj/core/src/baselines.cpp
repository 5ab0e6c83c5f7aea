#include "eegrc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eegrc/error.hpp"
#include "eegrc/random.hpp"

namespace eegrc {

std::vector<double> untrained_scores(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& s : out) s = rng.uniform();
  return out;
}

double aggregate_sentence_score(std::span<const double> word_scores) {
  if (word_scores.empty()) throw ConfigError("sentence score needs at least one word score");
  std::vector<double> v(word_scores.begin(), word_scores.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
  const double median = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return (v.back() + mean + median) / 3.0;
}

namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

LogisticWordScorer LogisticWordScorer::fit(const Eigen::MatrixXd& x, std::span<const int> labels,
                                           const LogisticOptions& options) {
  if (x.rows() == 0) throw DataError("logistic scorer needs training rows");
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DataError("logistic scorer: " + std::to_string(x.rows()) + " rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (!x.allFinite()) throw DataError("logistic scorer: non-finite feature value");
  if (options.steps < 0 || !(options.learning_rate > 0) || options.l2 < 0) {
    throw ConfigError("logistic scorer: invalid optimizer options");
  }

  const double n = static_cast<double>(x.rows());
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = labels[static_cast<std::size_t>(i)] ? 1.0 : 0.0;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  double b = 0.0;
  for (int step = 0; step < options.steps; ++step) {
    Eigen::VectorXd r = x * w;
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = sigmoid(r(i) + b) - y(i);
    const Eigen::VectorXd gw = x.transpose() * r / n + options.l2 * w;
    const double gb = r.sum() / n;
    w -= options.learning_rate * gw;
    b -= options.learning_rate * gb;
  }
  return LogisticWordScorer(std::move(w), b);
}

double LogisticWordScorer::score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  if (row.size() != weights_.size()) throw DataError("logistic scorer: feature width mismatch");
  return sigmoid(row.dot(weights_) + bias_);
}

Eigen::VectorXd LogisticWordScorer::score(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights_.size()) throw DataError("logistic scorer: feature width mismatch");
  Eigen::VectorXd z = x * weights_;
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sigmoid(z(i) + bias_);
  return z;
}

}  // namespace eegrc
