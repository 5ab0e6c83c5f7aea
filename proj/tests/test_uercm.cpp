#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "eegrc/checkpoint.hpp"
#include "eegrc/error.hpp"
#include "eegrc/metrics.hpp"
#include "eegrc/uercm.hpp"
#include "support.hpp"

using namespace eegrc;
using namespace eegrc::uercm;

namespace {

ModelConfig small_config(int t_max = 4) {
  ModelConfig c;
  c.t_max = t_max;
  c.hidden = 16;
  c.heads = 4;
  c.seed = 3;
  return c;
}

TrainingBatch batch_of(const std::vector<Sentence>& sentences, const ModelConfig& c) {
  std::vector<const Sentence*> ptrs;
  for (const auto& s : sentences) ptrs.push_back(&s);
  return make_batch(ptrs, c);
}

ModelParams perturbed(const ModelConfig& c, std::uint64_t seed, double scale = 0.1) {
  ModelParams p = ModelParams::init(c);
  Rng rng(seed);
  ModelParams::visit_trainable(p, [&](const char*, Eigen::MatrixXd& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += scale * rng.normal();
  });
  return p;
}

double bce(double p, double y) {
  p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

}  // namespace

TEST(Config, ValidatesHeadsDivideHidden) {
  ModelConfig c;
  c.hidden = 30;
  c.heads = 4;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Batch, PadsAndMasks) {
  const auto c = small_config();
  const auto sentences = test::random_sentences(3, 1, 4, 1);
  const auto b = batch_of(sentences, c);
  ASSERT_EQ(b.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto len = sentences[i].length();
    for (Eigen::Index t = 0; t < c.t_max; ++t) EXPECT_EQ(b.mask[i][static_cast<std::size_t>(t)], t < len);
    EXPECT_TRUE(b.x[i].bottomRows(c.t_max - len).isZero());
  }
  auto too_long = test::random_sentences(1, 5, 5, 2);
  EXPECT_THROW(batch_of(too_long, c), DataError);
}

TEST(Forward, SingleTokenAttendsToItself) {
  const auto c = small_config();
  const auto b = batch_of(test::random_sentences(2, 1, 1, 4), c);
  const auto tr = forward(perturbed(c, 5), b, c, Mode::kTrain);
  for (const auto& heads : tr.attention) {
    ASSERT_EQ(heads.size(), 4u);
    for (const auto& a : heads) EXPECT_NEAR(a(0, 0), 1.0, 1e-15);
  }
}

TEST(Forward, EqualRowsGiveUniformAttention) {
  const auto c = small_config();
  auto s = test::random_sentences(1, 4, 4, 6);
  for (Eigen::Index r = 1; r < 4; ++r) s[0].features.row(r) = s[0].features.row(0);
  ModelParams p = perturbed(c, 7);
  p.pos.setZero();
  const auto tr = forward(p, batch_of(s, c), c, Mode::kEval);
  for (const auto& a : tr.attention[0])
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(a(i, j), 0.25, 1e-12);
}

TEST(Forward, BatchNormStatisticsOverValidPositions) {
  const auto c = small_config();
  const auto s = test::random_sentences(8, 1, 4, 8);
  ModelParams p = perturbed(c, 9);
  p.w_attn *= 30.0;  // keep the variance far above eps
  const auto tr = forward(p, batch_of(s, c), c, Mode::kTrain);
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(c.hidden), sq = sum;
  double n = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (Eigen::Index t = 0; t < s[i].length(); ++t) {
      sum += tr.z_hat[i].row(t);
      sq += tr.z_hat[i].row(t).cwiseAbs2();
      n += 1.0;
    }
  const Eigen::RowVectorXd mean = sum / n;
  const Eigen::RowVectorXd var = sq / n - mean.cwiseAbs2();
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((var.array() - 1.0).abs().maxCoeff(), 1e-5);
  EXPECT_EQ(tr.bn_count, n);
}

TEST(Forward, PaddedRowsDoNotChangeOutputs) {
  const auto s = test::random_sentences(3, 2, 3, 10);
  auto c4 = small_config(4), c6 = small_config(6);
  ModelParams p4 = perturbed(c4, 11);
  ModelParams p6 = ModelParams::init(c6);
  ModelParams::visit_all(p6, [&](const char* name, Eigen::MatrixXd& t) {
    ModelParams::visit_all(p4, [&](const char* other, Eigen::MatrixXd& u) {
      if (std::string_view(name) == other && t.rows() == u.rows() && t.cols() == u.cols()) t = u;
    });
  });
  p6.pos.topRows(4) = p4.pos;
  const auto a = forward(p4, batch_of(s, c4), c4, Mode::kTrain);
  const auto b = forward(p6, batch_of(s, c6), c6, Mode::kTrain);
  EXPECT_LT((a.token_prob - b.token_prob.leftCols(4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Loss, HalfProbabilityIsLn2) {
  ForwardTrace tr;
  tr.sentence_prob = Eigen::VectorXd::Constant(3, 0.5);
  TrainingBatch b;
  b.x.resize(3);
  b.y_s = Eigen::VectorXd(3);
  b.y_s << 1.0, 0.0, 1.0;
  EXPECT_NEAR(loss(tr, b, Task::kSentence), std::log(2.0), 1e-15);
}

TEST(Loss, PerfectPredictionIsClampFloor) {
  ForwardTrace tr;
  tr.sentence_prob = Eigen::VectorXd(2);
  tr.sentence_prob << 1.0, 0.0;
  TrainingBatch b;
  b.x.resize(2);
  b.y_s = Eigen::VectorXd(2);
  b.y_s << 1.0, 0.0;
  EXPECT_LE(loss(tr, b, Task::kSentence), 1e-6 + kProbClamp);
}

TEST(Loss, MatchesBruteForceCrossEntropy) {
  const auto c = small_config();
  const auto s = test::random_sentences(5, 1, 4, 12);
  const auto b = batch_of(s, c);
  const auto tr = forward(perturbed(c, 13, 0.5), b, c, Mode::kTrain);
  double sentence = 0.0, token = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sentence += bce(tr.sentence_prob(static_cast<Eigen::Index>(i)), s[i].positive());
    for (Eigen::Index t = 0; t < s[i].length(); ++t)
      token += bce(tr.token_prob(static_cast<Eigen::Index>(i), t), s[i].answer[static_cast<std::size_t>(t)]);
  }
  EXPECT_NEAR(loss(tr, b, Task::kSentence), sentence / 5.0, 1e-9);
  EXPECT_NEAR(loss(tr, b, Task::kToken), token / 5.0, 1e-9);
}

TEST(Backward, FiniteDifferenceAgreement) {
  const auto c = small_config(3);
  const auto b = batch_of(test::random_sentences(6, 1, 3, 14), c);
  const auto p = perturbed(c, 15);
  for (Task task : {Task::kSentence, Task::kToken}) {
    const auto g = finite_difference_check(p, b, c, task, 200, 16);
    EXPECT_GE(g.coordinates, 200u);
    EXPECT_LT(g.max_rel_error, 1e-4) << to_string(task) << " worst " << g.worst_tensor;
  }
}

TEST(Backward, UnusedHeadHasZeroGradient) {
  const auto c = small_config();
  const auto b = batch_of(test::random_sentences(4, 1, 4, 17), c);
  const auto p = perturbed(c, 18);
  const auto tr = forward(p, b, c, Mode::kTrain);
  const auto gs = backward(tr, b, p, c, Task::kSentence);
  EXPECT_TRUE(gs.w_o.isZero());
  EXPECT_TRUE(gs.b_o.isZero());
  const auto gt = backward(tr, b, p, c, Task::kToken);
  EXPECT_TRUE(gt.w_s.isZero());
  EXPECT_TRUE(gt.b_s.isZero());
}

TEST(Backward, DuplicatedSampleGivesSameGradient) {
  const auto c = small_config();
  const auto one = test::random_sentences(1, 3, 3, 19);
  const std::vector<Sentence> two{one[0], one[0]};
  const auto p = perturbed(c, 20);
  const auto b1 = batch_of(one, c), b2 = batch_of(two, c);
  const auto g1 = backward(forward(p, b1, c, Mode::kTrain), b1, p, c, Task::kToken);
  const auto g2 = backward(forward(p, b2, c, Mode::kTrain), b2, p, c, Task::kToken);
  double worst = 0.0;
  ModelParams::visit_trainable(g1, [&](const char* name, const Eigen::MatrixXd& a) {
    ModelParams::visit_trainable(g2, [&](const char* other, const Eigen::MatrixXd& b) {
      if (std::string_view(name) == other) worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    });
  });
  EXPECT_LT(worst, 1e-10);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  const auto c = small_config();
  ModelParams p = ModelParams::init(c);
  const ModelParams before = p;
  ModelParams g = ModelParams::zeros_like(p);
  g.w_h.setConstant(0.3);
  g.b_o.setConstant(-2.0);
  AdamOptimizer adam(p, 0.01);
  adam.step(p, g);
  EXPECT_NEAR((before.w_h - p.w_h).maxCoeff(), 0.01, 1e-9);
  EXPECT_NEAR((p.b_o - before.b_o).minCoeff(), 0.01, 1e-9);
  EXPECT_EQ(p.w_q, before.w_q);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(EarlyStopping, PlateauStopsAfterPatience) {
  EarlyStopper s(5);
  const std::vector<double> seq{0.5, 0.6, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7, 0.7};
  int stopped_at = -1;
  for (std::size_t e = 0; e < seq.size(); ++e) {
    if (s.update(seq[e])) {
      stopped_at = static_cast<int>(e);
      break;
    }
  }
  EXPECT_EQ(s.best_epoch(), 2);
  EXPECT_EQ(stopped_at, 2 + 5);
}

TEST(Train, ZeroEpochsReturnsInitialParameters) {
  auto c = small_config();
  c.max_epochs = 0;
  const auto s = test::random_sentences(6, 1, 4, 21);
  const auto r = train(s, s, c, Task::kToken);
  const auto init = ModelParams::init(c);
  EXPECT_EQ(r.params.w_h, init.w_h);
  EXPECT_EQ(r.params.w_s, init.w_s);
  EXPECT_TRUE(r.history.train_loss.empty());
}

TEST(Train, EmptySplitIsDataError) {
  const auto s = test::random_sentences(2, 1, 4, 22);
  EXPECT_THROW(train({}, s, small_config(), Task::kToken), DataError);
}

TEST(Train, SeparableTokensAreLearned) {
  auto c = small_config(6);
  c.max_epochs = 50;
  c.lr = 1e-2;
  c.patience = 50;
  auto make = [](std::uint64_t seed) {
    auto s = test::random_sentences(120, 2, 6, seed);
    for (auto& x : s)
      for (Eigen::Index t = 0; t < x.length(); ++t) x.answer[static_cast<std::size_t>(t)] = x.features(t, 0) > 0.5;
    return s;
  };
  const auto r = train(make(23), make(24), c, Task::kToken);
  EXPECT_GE(*std::max_element(r.history.validation_auc.begin(), r.history.validation_auc.end()), 0.85);
  // deterministic given the seed
  const auto again = train(make(23), make(24), c, Task::kToken);
  EXPECT_EQ(again.params.w_h, r.params.w_h);
  EXPECT_EQ(again.history.validation_auc, r.history.validation_auc);
}

TEST(Predict, UntrainedModelIsAtChance) {
  const auto c = small_config(5);
  const auto s = test::random_sentences(1500, 1, 5, 25);
  const auto preds = predict(ModelParams::init(c), c, s);
  Rng rng(26);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p : preds) {
    scores.push_back(p.sentence_prob);
    labels.push_back(rng.bernoulli(0.5));
  }
  EXPECT_NEAR(auc(scores, labels), 0.5, 0.05);
  const auto twice = predict(ModelParams::init(c), c, s[0]);
  EXPECT_EQ(twice.sentence_prob, preds[0].sentence_prob);
  EXPECT_EQ(twice.word_probs, preds[0].word_probs);
}

TEST(Grid, EnumeratesAndSelects) {
  const ModelConfig base = small_config();
  int calls = 0;
  const auto r = grid_search(base, {}, {"cvot", "lopo"}, [&](const ModelConfig& c, std::string_view) {
    ++calls;
    return c.hidden == 32 && c.heads == 4 && c.lr == 1e-2 ? 0.9 : 0.6;
  });
  EXPECT_EQ(calls, 24);
  EXPECT_EQ(r.entries.size(), 12u);
  EXPECT_EQ(r.best.hidden, 32);
  EXPECT_EQ(r.best.heads, 4);
  EXPECT_EQ(r.best.lr, 1e-2);

  HyperGrid one{{16}, {8}, {1e-3}};
  const auto single = grid_search(base, one, {"lopo"}, [](const ModelConfig&, std::string_view) { return 0.5; });
  EXPECT_EQ(single.best.hidden, 16);
  EXPECT_EQ(single.best.heads, 8);
}

TEST(Grid, TiesKeepTheSmallerConfig) {
  const auto r = grid_search(small_config(), {}, {"cvot"}, [](const ModelConfig&, std::string_view) { return 0.7; });
  EXPECT_EQ(r.best.hidden, 16);
  EXPECT_EQ(r.best.heads, 4);
  EXPECT_EQ(r.best.lr, 1e-4);
}

TEST(Checkpoint, RoundTripIsExact) {
  const auto c = small_config();
  const Checkpoint ck{c, perturbed(c, 27), "token"};
  const std::string bytes = serialize_checkpoint(ck);
  const Checkpoint back = deserialize_checkpoint(bytes);
  EXPECT_EQ(back.config, c);
  EXPECT_EQ(back.task, "token");
  EXPECT_EQ(back.params.w_s, ck.params.w_s);
  EXPECT_EQ(serialize_checkpoint(back), bytes);
}

TEST(Checkpoint, CorruptionIsStructuralError) {
  const auto c = small_config();
  const std::string bytes = serialize_checkpoint({c, ModelParams::init(c), "sentence"});
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), StructuralError);
  EXPECT_THROW(deserialize_checkpoint(bytes + "x"), StructuralError);
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bad), StructuralError);
}
