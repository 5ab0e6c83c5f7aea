#include <gtest/gtest.h>

#include <cmath>

#include "eegrc/error.hpp"
#include "eegrc/random.hpp"
#include "eegrc/stats.hpp"
#include "oracle_values.hpp"

using namespace eegrc;

namespace {

Eigen::MatrixXd fixture() {
  Eigen::MatrixXd m(6, 3);
  for (Eigen::Index i = 0; i < 18; ++i) m(i / 3, i % 3) = oracle::kAnovaFixture[i];
  return m;
}

std::span<const double> col(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

TEST(RmAnova, FixtureMatchesReference) {
  const auto r = rm_anova(fixture());
  EXPECT_NEAR(r.f_value, oracle::kAnovaF, 1e-6);
  EXPECT_EQ(r.df_between_uncorrected, oracle::kAnovaDf1);
  EXPECT_EQ(r.df_within_uncorrected, oracle::kAnovaDf2);
  EXPECT_NEAR(r.p_uncorrected, oracle::kAnovaPUncorrected, 1e-6);
  EXPECT_NEAR(r.gg_epsilon, oracle::kAnovaEpsilon, 1e-6);
  EXPECT_TRUE(r.corrected);
  EXPECT_NEAR(r.df_between, oracle::kAnovaDf1 * oracle::kAnovaEpsilon, 1e-6);
  EXPECT_NEAR(r.p_value, oracle::kAnovaPCorrected, 1e-6);
}

TEST(RmAnova, DegreesOfFreedomForTwentyOneSubjects) {
  Eigen::MatrixXd x(21, 3);
  Rng rng(1);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  const auto r = rm_anova(x);
  EXPECT_EQ(r.df_between_uncorrected, 2.0);
  EXPECT_EQ(r.df_within_uncorrected, 40.0);
}

TEST(RmAnova, IdenticalColumnsGiveNoEffect) {
  Eigen::MatrixXd x(5, 3);
  for (Eigen::Index i = 0; i < 5; ++i) x.row(i).setConstant(static_cast<double>(i * i));
  const auto r = rm_anova(x);
  EXPECT_EQ(r.f_value, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(RmAnova, InvalidInput) {
  EXPECT_THROW(rm_anova(Eigen::MatrixXd::Ones(1, 3)), ConfigError);
  EXPECT_THROW(rm_anova(Eigen::MatrixXd::Ones(4, 1)), ConfigError);
  Eigen::MatrixXd x = fixture();
  x(2, 1) = std::nan("");
  EXPECT_THROW(rm_anova(x), DataError);
}

TEST(GreenhouseGeisser, BoundedAndMatchesReference) {
  EXPECT_NEAR(greenhouse_geisser_epsilon(fixture()), oracle::kAnovaEpsilon, 1e-9);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd x(8, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    const double e = greenhouse_geisser_epsilon(x);
    EXPECT_GE(e, 1.0 / 3.0 - 1e-12);
    EXPECT_LE(e, 1.0 + 1e-12);
  }
}

TEST(FDistribution, UpperTailMatchesReference) {
  for (std::size_t i = 0; i < std::size(oracle::kFTail); ++i) {
    const double* a = &oracle::kFTailArgs[3 * i];
    EXPECT_NEAR(f_upper_tail(a[0], a[1], a[2]), oracle::kFTail[i], 1e-10);
  }
}

TEST(Pairwise, MatchesReferencePairedT) {
  const auto pairs = bonferroni_pairwise(fixture());
  ASSERT_EQ(pairs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(pairs[i].t, oracle::kPairedT[i], 1e-9);
    EXPECT_NEAR(pairs[i].p_raw, oracle::kPairedP[i], 1e-6);
    EXPECT_NEAR(pairs[i].p_adjusted, std::min(1.0, 3.0 * oracle::kPairedP[i]), 1e-6);
    EXPECT_EQ(pairs[i].df, 5.0);
  }
}

TEST(Pairwise, IdenticalColumnsAdjustToOne) {
  Eigen::MatrixXd x = fixture();
  x.col(1) = x.col(0);
  EXPECT_EQ(bonferroni_pairwise(x)[0].p_adjusted, 1.0);
}

TEST(PairedT, TwoSidedP) {
  const Eigen::VectorXd a = fixture().col(0), b = fixture().col(2);
  const auto r = paired_t_test(col(a), col(b));
  EXPECT_NEAR(r.p, oracle::kPairedP[1], 1e-6);
}

TEST(Permutation, EqualSamplesGiveOne) {
  const Eigen::VectorXd a = fixture().col(0);
  EXPECT_EQ(permutation_paired_test(col(a), col(a), 500, 1), 1.0);
}

TEST(Permutation, LargeShiftIsSignificant) {
  Rng rng(3);
  Eigen::VectorXd a(21), b(21);
  for (Eigen::Index i = 0; i < 21; ++i) {
    b(i) = rng.normal();
    a(i) = b(i) + 10.0 + 0.1 * rng.normal();
  }
  EXPECT_LE(permutation_paired_test(col(a), col(b), 9999, 4), 0.001);
}

TEST(Permutation, DeterministicGivenSeed) {
  const Eigen::VectorXd a = fixture().col(0), b = fixture().col(1);
  EXPECT_EQ(permutation_paired_test(col(a), col(b), 1000, 9), permutation_paired_test(col(a), col(b), 1000, 9));
}

TEST(Permutation, InvalidArguments) {
  const Eigen::VectorXd a = fixture().col(0), b = fixture().col(1);
  EXPECT_THROW(permutation_paired_test(col(a), col(b), 99, 0), ConfigError);
  const Eigen::VectorXd shorter = a.head(3);
  EXPECT_THROW(permutation_paired_test(col(a), col(shorter), 500, 0), ConfigError);
}

TEST(Calibration, NullFalsePositiveRates) {
  int anova_hits = 0, perm_hits = 0;
  for (int d = 0; d < 1000; ++d) {
    Rng rng(derive_seed(42, static_cast<std::uint64_t>(d)));
    Eigen::MatrixXd v(21, 3);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal();
    anova_hits += rm_anova(v).p_value < 0.05;
    const Eigen::VectorXd a = v.col(0), b = v.col(2);
    perm_hits += permutation_paired_test(col(a), col(b), 499, static_cast<std::uint64_t>(d)) < 0.05;
  }
  EXPECT_GE(anova_hits, 30);
  EXPECT_LE(anova_hits, 70);
  EXPECT_GE(perm_hits, 30);
  EXPECT_LE(perm_hits, 70);
}
