#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace eegrc {

struct PairwiseTest {
  Eigen::Index a = 0;  // condition (column) indices
  Eigen::Index b = 0;
  double t = 0.0;
  double df = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;  // min(1, m * p_raw), m = k(k-1)/2
};

struct AnovaResult {
  double f_value = 0.0;
  double df_between = 0.0;  // degrees of freedom used for p_value
  double df_within = 0.0;
  double p_value = 1.0;
  double df_between_uncorrected = 0.0;
  double df_within_uncorrected = 0.0;
  double p_uncorrected = 1.0;
  double gg_epsilon = 1.0;
  bool corrected = false;  // true when epsilon < threshold and df were scaled
  std::vector<PairwiseTest> pairwise;
};

struct PairedT {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

/// One-way repeated-measures ANOVA on a subjects x conditions matrix.
/// Greenhouse-Geisser correction is applied when epsilon < `gg_threshold`.
/// Bonferroni pairwise comparisons are filled in. Throws DataError on
/// non-finite cells and ConfigError for fewer than 2 subjects or conditions.
AnovaResult rm_anova(const Eigen::MatrixXd& values, double gg_threshold = 0.95);

/// Greenhouse-Geisser epsilon from the double-centred condition covariance,
/// clamped to [1/(k-1), 1].
double greenhouse_geisser_epsilon(const Eigen::MatrixXd& values);

PairedT paired_t_test(std::span<const double> a, std::span<const double> b);

/// Paired t-test for every pair of columns, Bonferroni-adjusted.
std::vector<PairwiseTest> bonferroni_pairwise(const Eigen::MatrixXd& values);

/// Upper tail of F(df1, df2) at `f`.
double f_upper_tail(double f, double df1, double df2);

/// Two-sided sign-flip permutation test on paired differences:
/// p = (1 + #{|t*| >= |t_obs|}) / (1 + n_perm). Permutation i draws its signs
/// from a stream derived from (seed, i). Throws ConfigError if n_perm < 100 or
/// the samples are unpaired or shorter than 2.
double permutation_paired_test(std::span<const double> a, std::span<const double> b,
                               int n_perm = 10000, std::uint64_t seed = 0);

}  // namespace eegrc
