#include "eegrc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "eegrc/error.hpp"
#include "eegrc/random.hpp"

namespace eegrc {

namespace {

void check_matrix(const Eigen::MatrixXd& values) {
  if (values.rows() < 2) throw ConfigError("repeated-measures tests need at least 2 subjects");
  if (values.cols() < 2) throw ConfigError("repeated-measures tests need at least 2 conditions");
  if (!values.allFinite()) throw DataError("missing or non-finite cell in subject x condition matrix");
}

}  // namespace

double f_upper_tail(double f, double df1, double df2) {
  if (std::isnan(f)) return 1.0;
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double greenhouse_geisser_epsilon(const Eigen::MatrixXd& values) {
  const auto n = static_cast<double>(values.rows());
  const auto k = values.cols();
  const Eigen::MatrixXd centered = values.rowwise() - values.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);

  const Eigen::VectorXd row_mean = cov.rowwise().mean();
  const Eigen::RowVectorXd col_mean = cov.colwise().mean();
  const double grand = cov.mean();
  Eigen::MatrixXd dc = cov;
  dc.colwise() -= row_mean;
  dc.rowwise() -= col_mean;
  dc.array() += grand;

  const double denom = static_cast<double>(k - 1) * dc.array().square().sum();
  if (!(denom > 0.0)) return 1.0;
  const double trace = dc.trace();
  const double eps = trace * trace / denom;
  return std::clamp(eps, 1.0 / static_cast<double>(k - 1), 1.0);
}

AnovaResult rm_anova(const Eigen::MatrixXd& values, double gg_threshold) {
  check_matrix(values);
  const auto n = static_cast<double>(values.rows());
  const auto k = static_cast<double>(values.cols());

  const double grand = values.mean();
  const double ss_total = (values.array() - grand).square().sum();
  const double ss_cond = n * (values.colwise().mean().array() - grand).square().sum();
  const double ss_subj = k * (values.rowwise().mean().array() - grand).square().sum();
  const double ss_err = std::max(0.0, ss_total - ss_cond - ss_subj);

  AnovaResult r;
  r.df_between_uncorrected = k - 1.0;
  r.df_within_uncorrected = (k - 1.0) * (n - 1.0);

  // relative floor so round-off in an exactly null design reads as zero
  const double floor = 1e-12 * std::max(ss_total, std::numeric_limits<double>::min());
  const double ms_cond = ss_cond / r.df_between_uncorrected;
  const double ms_err = ss_err / r.df_within_uncorrected;
  if (ss_cond <= floor)
    r.f_value = 0.0;
  else if (ss_err <= floor)
    r.f_value = std::numeric_limits<double>::infinity();
  else
    r.f_value = ms_cond / ms_err;

  r.p_uncorrected = f_upper_tail(r.f_value, r.df_between_uncorrected, r.df_within_uncorrected);
  r.gg_epsilon = greenhouse_geisser_epsilon(values);
  r.corrected = r.gg_epsilon < gg_threshold;
  const double scale = r.corrected ? r.gg_epsilon : 1.0;
  r.df_between = r.df_between_uncorrected * scale;
  r.df_within = r.df_within_uncorrected * scale;
  r.p_value = r.corrected ? f_upper_tail(r.f_value, r.df_between, r.df_within) : r.p_uncorrected;
  r.pairwise = bonferroni_pairwise(values);
  return r;
}

PairedT paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ConfigError("paired t-test needs two samples of equal length >= 2");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  PairedT r;
  r.df = n - 1.0;
  if (sd == 0.0 || sd <= 1e-12 * std::abs(mean)) {
    // zero spread: identical samples or a constant shift
    r.t = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p = mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(n));
  boost::math::students_t_distribution<double> dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t))));
  return r;
}

std::vector<PairwiseTest> bonferroni_pairwise(const Eigen::MatrixXd& values) {
  check_matrix(values);
  const auto k = values.cols();
  const double m = static_cast<double>(k * (k - 1) / 2);
  std::vector<PairwiseTest> out;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const Eigen::VectorXd a = values.col(i);
      const Eigen::VectorXd b = values.col(j);
      const auto t = paired_t_test({a.data(), static_cast<std::size_t>(a.size())},
                                   {b.data(), static_cast<std::size_t>(b.size())});
      out.push_back({i, j, t.t, t.df, t.p, std::min(1.0, m * t.p)});
    }
  }
  return out;
}

double permutation_paired_test(std::span<const double> a, std::span<const double> b, int n_perm,
                               std::uint64_t seed) {
  if (n_perm < 100) throw ConfigError("permutation test needs n_perm >= 100");
  if (a.size() != b.size() || a.size() < 2)
    throw ConfigError("permutation test needs paired samples of length >= 2");

  const std::size_t n = a.size();
  std::vector<double> d(n);
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    observed += d[i];
  }
  // Sign flips leave sum(d^2) unchanged, so |t| is increasing in |sum(s_i d_i)|
  // and the sums can be compared directly.
  const double threshold = std::abs(observed) * (1.0 - 1e-12);

  long exceed = 0;
  for (int p = 0; p < n_perm; ++p) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    double sum = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next_u64();
      sum += (bits & 1u) ? d[i] : -d[i];
      bits >>= 1;
    }
    if (std::abs(sum) >= threshold) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(1 + n_perm);
}

}  // namespace eegrc
