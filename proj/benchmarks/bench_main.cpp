#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "eegrc/features.hpp"
#include "eegrc/metrics.hpp"
#include "eegrc/montage.hpp"
#include "eegrc/random.hpp"
#include "eegrc/signal.hpp"
#include "eegrc/uercm.hpp"

using namespace eegrc;

namespace {

EpochMatrix noise_epoch() {
  EpochMatrix e;
  e.rate_hz = kAnalysisRateHz;
  e.t0_ms = kEpochSpan.start_ms;
  e.channel_names = default_montage();
  e.data.resize(static_cast<Eigen::Index>(e.channel_names.size()), samples_for(kEpochSpan, e.rate_hz));
  Rng rng(1);
  for (Eigen::Index k = 0; k < e.data.size(); ++k) e.data.data()[k] = rng.normal();
  return e;
}

std::vector<Sentence> sentences(std::size_t n, int len) {
  Rng rng(2);
  std::vector<Sentence> out(n);
  for (auto& s : out) {
    s.features.resize(len, static_cast<Eigen::Index>(kFeatureDim));
    for (Eigen::Index k = 0; k < s.features.size(); ++k) s.features.data()[k] = rng.normal();
    s.answer.assign(static_cast<std::size_t>(len), 0);
    s.answer[0] = 1;
    for (int w = 0; w < len; ++w) s.word_indices.push_back(w);
  }
  return out;
}

}  // namespace

static void BM_Bandpass(benchmark::State& state) {
  Rng rng(3);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(bandpass(x, 1000.0, kBandLowHz, kBandHighHz));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bandpass)->Arg(10000)->Arg(100000);

static void BM_WordFeatureVector(benchmark::State& state) {
  const auto e = noise_epoch();
  for (auto _ : state) benchmark::DoNotOptimize(word_feature_vector(e));
}
BENCHMARK(BM_WordFeatureVector);

static void BM_ForwardBackward(benchmark::State& state) {
  uercm::ModelConfig c;
  c.hidden = static_cast<int>(state.range(0));
  c.batch_size = 8;
  const auto params = uercm::ModelParams::init(c);
  const auto data = sentences(8, 6);
  std::vector<const Sentence*> ptrs;
  for (const auto& s : data) ptrs.push_back(&s);
  const auto batch = uercm::make_batch(ptrs, c);
  for (auto _ : state) {
    const auto trace = uercm::forward(params, batch, c, uercm::Mode::kTrain);
    benchmark::DoNotOptimize(uercm::backward(trace, batch, params, c, uercm::Task::kToken));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(32);

static void BM_Auc(benchmark::State& state) {
  Rng rng(4);
  std::vector<double> s(static_cast<std::size_t>(state.range(0)));
  std::vector<int> y(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform();
    y[i] = rng.bernoulli(0.2);
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc(s, y));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);
BENCHMARK_MAIN();
