#include "eegrc/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "eegrc/error.hpp"

namespace eegrc {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw MetricError("auc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] != 0) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw MetricError("auc needs both positive and negative items");
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double average_precision(const RankingQuery& q) {
  if (q.scores.size() != q.relevant.size())
    throw MetricError("average_precision: scores and relevance differ in length");
  std::vector<std::size_t> order(q.scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return q.scores[a] > q.scores[b]; });
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (q.relevant[order[r]] != 0) {
      hits += 1.0;
      sum += hits / static_cast<double>(r + 1);
    }
  }
  if (hits == 0.0) throw MetricError("average_precision: query has no relevant candidate");
  return sum / hits;
}

double mean_average_precision(std::span<const RankingQuery> queries) {
  if (queries.empty()) throw MetricError("mean_average_precision: no queries");
  double sum = 0.0;
  for (const auto& q : queries) sum += average_precision(q);
  return sum / static_cast<double>(queries.size());
}

}  // namespace eegrc
