#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace eegrc {

/// i.i.d. uniform(0,1) scores, identical for identical (n, seed).
std::vector<double> untrained_scores(std::size_t n, std::uint64_t seed);

/// S = (max + mean + median) / 3; an even count takes the mean of the two
/// middle values as median. Throws ConfigError for an empty list.
double aggregate_sentence_score(std::span<const double> word_scores);

struct LogisticOptions {
  double l2 = 1e-3;  // bias is not penalized
  int steps = 500;
  double learning_rate = 1.0;
};

/// L2-regularized logistic regression fit by full-batch gradient descent on
///   mean log-loss + l2/2 * |w|^2
class LogisticWordScorer {
 public:
  LogisticWordScorer() = default;
  LogisticWordScorer(Eigen::VectorXd weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}

  /// Throws DataError on non-finite features or mismatched sizes.
  static LogisticWordScorer fit(const Eigen::MatrixXd& x, std::span<const int> labels,
                                const LogisticOptions& options = {});

  double score(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Eigen::VectorXd score(const Eigen::MatrixXd& x) const;

  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
};

}  // namespace eegrc
