#pragma once

#include <span>
#include <vector>

namespace eegrc {

/// Area under the ROC curve via the rank-sum statistic; tied scores get
/// average ranks (count 1/2). Throws MetricError unless both classes occur.
double auc(std::span<const double> scores, std::span<const int> labels);

/// One ranking query: candidate scores and binary relevance.
struct RankingQuery {
  std::vector<double> scores;
  std::vector<int> relevant;
};

/// Average precision of one query, ranking by descending score; equal scores
/// keep their input order. Throws MetricError when nothing is relevant.
double average_precision(const RankingQuery& q);

double mean_average_precision(std::span<const RankingQuery> queries);

}  // namespace eegrc
