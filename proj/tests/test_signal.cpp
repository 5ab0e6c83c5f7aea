#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eegrc/error.hpp"
#include "eegrc/filter.hpp"
#include "eegrc/signal.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace eegrc;

namespace {

SessionRecording three_channel(Eigen::Index n, double rate = 500.0) {
  SessionRecording r;
  r.rate_hz = rate;
  r.channel_names = {"Cz", "A1", "A2"};
  r.data = Eigen::MatrixXd::Zero(3, n);
  r.participant_id = "P01";
  return r;
}

double rms(const std::vector<double>& x, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(to - from));
}

std::vector<double> tone(double hz, double rate, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  return x;
}

}  // namespace

TEST(Rereference, CommonModeCancels) {
  auto r = three_channel(10);
  r.data.setConstant(3.0);
  EXPECT_TRUE(rereference_to_mastoids(r).data.isZero());
}

TEST(Rereference, SubtractsMastoidMean) {
  auto r = three_channel(1);
  r.data << 5.0, 2.0, 4.0;
  EXPECT_DOUBLE_EQ(rereference_to_mastoids(r).data(0, 0), 2.0);
}

TEST(Rereference, MastoidAverageVanishes) {
  auto r = three_channel(200);
  Rng rng(1);
  for (Eigen::Index i = 0; i < r.data.size(); ++i) r.data.data()[i] = rng.normal() * 10.0;
  const auto out = rereference_to_mastoids(r);
  EXPECT_LT((out.data.row(1) + out.data.row(2)).cwiseAbs().maxCoeff() / 2.0, 1e-12);
}

TEST(Rereference, MissingMastoidIsConfigError) {
  auto r = three_channel(4);
  r.channel_names[2] = "Pz";
  EXPECT_THROW(rereference_to_mastoids(r), ConfigError);
}

TEST(Butterworth, MagnitudeMatchesReference) {
  const auto f = SosFilter::butterworth_bandpass(4, 0.5, 30.0, 500.0);
  for (std::size_t i = 0; i < std::size(oracle::kButterFreqs); ++i)
    EXPECT_NEAR(std::abs(f.response(oracle::kButterFreqs[i], 500.0)), oracle::kButterGain[i], 1e-9)
        << oracle::kButterFreqs[i] << " Hz";
}

TEST(Butterworth, FiltfiltMatchesReference) {
  std::vector<double> x(1000);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k);
    x[k] = std::sin(0.05 * i) + 0.5 * std::sin(1.3 * i) + 0.3 * std::cos(0.002 * i * i) + 2.0;
  }
  const auto y = bandpass(x, 500.0, 0.5, 30.0);
  for (std::size_t i = 0; i < std::size(oracle::kFiltfiltProbeIndex); ++i) {
    const auto idx = static_cast<std::size_t>(oracle::kFiltfiltProbeIndex[i]);
    EXPECT_NEAR(y[idx], oracle::kFiltfiltProbe[i], 1e-9) << "sample " << idx;
  }
}

TEST(Butterworth, StopbandAt50Hz) {
  const auto y = bandpass(tone(50.0, 500.0, 5000), 500.0, 0.5, 30.0);
  EXPECT_LT(rms(y, 1000, 4000), 0.05);
}

TEST(Butterworth, PassbandAt10Hz) {
  const auto y = bandpass(tone(10.0, 500.0, 5000), 500.0, 0.5, 30.0);
  EXPECT_NEAR(rms(y, 500, 4500), 1.0 / std::sqrt(2.0), 0.05 / std::sqrt(2.0));
}

TEST(Butterworth, ZeroInZeroOut) {
  const std::vector<double> x(800, 0.0);
  for (double v : bandpass(x, 500.0, 0.5, 30.0)) EXPECT_EQ(v, 0.0);
}

TEST(Butterworth, NyquistViolationIsConfigError) {
  EXPECT_THROW(SosFilter::butterworth_bandpass(4, 0.5, 300.0, 500.0), ConfigError);
  EXPECT_THROW(SosFilter::butterworth_bandpass(4, 30.0, 0.5, 500.0), ConfigError);
}

TEST(Epoching, SampleCountAndSkips) {
  auto r = three_channel(2000);
  r.labels = {{WordType::kOrdinary, Relevance::kIrrelevant, 1, 0, "", 1},
              {WordType::kAnswer, Relevance::kIrrelevant, 1, 1, "", 1},
              {WordType::kOrdinary, Relevance::kIrrelevant, 1, 2, "", 1},
              {WordType::kOrdinary, Relevance::kIrrelevant, 1, 3, "", 1}};
  r.triggers = {{10, EventCode::kWordOnset, 1, 0},
                {300, EventCode::kWordOnset, 1, 1},
                {400, EventCode::kFixation, 1, std::nullopt},
                {800, EventCode::kWordOnset, 1, 2},
                {1200, EventCode::kWordOnset, 1, 3}};
  const auto ex = extract_epochs(r);
  ASSERT_EQ(ex.epochs.size(), 3u);
  EXPECT_EQ(ex.epochs[0].n_samples(), 475);
  EXPECT_EQ(ex.epochs[0].label.word_type, WordType::kAnswer);
  EXPECT_EQ(ex.epochs[0].label.participant_id, "P01");
  ASSERT_EQ(ex.skipped.size(), 1u);
  EXPECT_EQ(ex.skipped[0].word_index, 0);
}

TEST(Epoching, UnlabelledOnsetIsDataError) {
  auto r = three_channel(2000);
  r.triggers = {{500, EventCode::kWordOnset, 4, 0}};
  EXPECT_THROW(extract_epochs(r), DataError);
}

TEST(Baseline, ConstantChannelBecomesZero) {
  const auto e = test::constant_montage_epoch(500.0, -200.0, 475, [](double) { return 5.0; });
  EXPECT_LT(baseline_correct(e).data.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Baseline, StepKeepsPostStimulusDifference) {
  const auto e = test::constant_montage_epoch(500.0, -200.0, 475, [](double t) { return t < 0 ? 2.0 : 7.0; });
  const auto out = baseline_correct(e);
  EXPECT_NEAR(out.data(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(out.data(0, 300), 5.0, 1e-12);
}

TEST(Baseline, RandomEpochHasZeroBaselineMean) {
  auto e = test::constant_montage_epoch(500.0, -200.0, 475, [](double) { return 0.0; });
  Rng rng(3);
  for (Eigen::Index i = 0; i < e.data.size(); ++i) e.data.data()[i] = rng.normal() * 20.0 + 7.0;
  const auto out = baseline_correct(e);
  const auto [a, b] = sample_range(out, kBaselineWindow);
  EXPECT_LT(out.data.middleCols(a, b - a).rowwise().mean().cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Baseline, WindowOutsideEpochIsConfigError) {
  const auto e = test::constant_montage_epoch(500.0, 0.0, 100, [](double) { return 1.0; });
  EXPECT_THROW(baseline_correct(e), ConfigError);
}

TEST(Artifacts, StrictThreshold) {
  auto a = test::constant_montage_epoch(500.0, -200.0, 50, [](double) { return 99.9; });
  auto b = test::constant_montage_epoch(500.0, -200.0, 50, [](double) { return 0.0; });
  b.data(3, 10) = -101.0;
  auto c = test::constant_montage_epoch(500.0, -200.0, 50, [](double) { return 100.0; });
  const auto part = reject_artifacts({a, b, c});
  EXPECT_EQ(part.kept.size(), 2u);
  ASSERT_EQ(part.rejected.size(), 1u);
  EXPECT_DOUBLE_EQ(peak_abs(part.rejected[0]), 101.0);
}

TEST(Artifacts, InjectedSpikesAreExactlyRejected) {
  std::vector<EpochMatrix> epochs;
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    auto e = test::constant_montage_epoch(500.0, -200.0, 100, [&](double) { return 0.0; });
    for (Eigen::Index k = 0; k < e.data.size(); ++k) e.data.data()[k] = 10.0 * rng.normal();
    e.label.trial_id = i;
    if (i % 10 == 3) e.data(5, 40) = 150.0;
    epochs.push_back(e);
  }
  const auto part = reject_artifacts(epochs);
  ASSERT_EQ(part.rejected.size(), 10u);
  for (const auto& e : part.rejected) EXPECT_EQ(e.label.trial_id % 10, 3);
}

TEST(Downsample, HalvesRateAndLength) {
  auto r = three_channel(2000, 1000.0);
  r.triggers = {{1001, EventCode::kWordOnset, 1, 0}};
  const auto out = downsample(r, 500.0);
  EXPECT_EQ(out.rate_hz, 500.0);
  EXPECT_EQ(out.n_samples(), 1000);
  EXPECT_EQ(out.triggers[0].sample_index, 500);
}

TEST(Downsample, SameRateIsIdentity) {
  auto r = three_channel(321);
  r.data.setRandom();
  EXPECT_EQ(downsample(r, 500.0).data, r.data);
}

TEST(Downsample, PreservesInBandRms) {
  auto e = test::constant_montage_epoch(1000.0, 0.0, 4000, [](double t) {
    return std::sin(2.0 * std::numbers::pi * 10.0 * t / 1000.0);
  });
  const auto out = downsample(e, 500.0);
  const double before = std::sqrt(e.data.row(0).squaredNorm() / static_cast<double>(e.n_samples()));
  const double after = std::sqrt(out.data.row(0).squaredNorm() / static_cast<double>(out.n_samples()));
  EXPECT_NEAR(after / before, 1.0, 0.01);
}

TEST(Downsample, NonIntegerFactorIsConfigError) {
  EXPECT_THROW(downsample(three_channel(100, 750.0), 500.0), ConfigError);
}

TEST(Preprocess, KeepsOrderAndDecimates) {
  auto r = three_channel(3000, 1000.0);
  Rng rng(5);
  for (Eigen::Index i = 0; i < r.data.size(); ++i) r.data.data()[i] = rng.normal();
  r.labels = {{WordType::kAnswer, Relevance::kPerfectlyRelevant, 2, 0, "", 9}};
  r.trial_questions = {{2, 9}};
  r.triggers = {{1000, EventCode::kWordOnset, 2, 0}};
  const auto res = preprocess_session(r);
  ASSERT_EQ(res.epochs.size(), 1u);
  EXPECT_EQ(res.epochs[0].rate_hz, 500.0);
  EXPECT_EQ(res.epochs[0].n_samples(), 475);
  EXPECT_EQ(res.epochs[0].label.question_id, 9);
  EXPECT_TRUE(res.rejected.empty());
}
