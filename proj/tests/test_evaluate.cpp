#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "eegrc/error.hpp"
#include "eegrc/evaluate.hpp"
#include "eegrc/session_io.hpp"
#include "support.hpp"

using namespace eegrc;

namespace {

// Each question shows its three candidates to a single participant.
std::vector<Sentence> grouped_sentences(std::size_t n, std::uint64_t seed) {
  auto s = test::random_sentences(n, 2, 6, seed);
  for (std::size_t i = 0; i < s.size(); ++i) s[i].participant_id = (i / 3) % 2 ? "P02" : "P01";
  return s;
}

class OracleScorer : public SentenceScorer {
 public:
  std::string name() const override { return "oracle"; }
  FitOutput fit_predict(const std::vector<Sentence>&, const std::vector<Sentence>& validation,
                        uercm::Task, std::uint64_t) const override {
    FitOutput out;
    for (const auto& s : validation) {
      uercm::Prediction p;
      p.sentence_prob = s.positive() ? 0.9 : 0.1;
      for (int a : s.answer) p.word_probs.push_back(a ? 0.8 : 0.2);
      out.predictions.push_back(p);
    }
    return out;
  }
};

class ShortScorer : public SentenceScorer {
 public:
  std::string name() const override { return "short"; }
  FitOutput fit_predict(const std::vector<Sentence>&, const std::vector<Sentence>&, uercm::Task,
                        std::uint64_t) const override {
    return {};
  }
};

}  // namespace

TEST(Evaluate, PerfectScorerReachesOne) {
  const auto s = grouped_sentences(120, 1);
  const auto plan = make_plan(s, Scheme::kCvot, 5, 0);
  EvalOptions opt;
  opt.task = uercm::Task::kSentence;
  opt.baseline_draws = 50;
  const auto r = evaluate(s, plan, OracleScorer{}, opt);
  EXPECT_EQ(r.auc, 1.0);
  EXPECT_EQ(r.map, 1.0);
  EXPECT_EQ(r.items, 120u);
  EXPECT_EQ(r.queries, 40u);
  EXPECT_EQ(r.folds.size(), 5u);
  EXPECT_EQ(r.predictions.size(), 120u);
  EXPECT_NEAR(r.delta_auc, 1.0 - r.baseline_auc, 1e-15);

  opt.task = uercm::Task::kToken;
  const auto t = evaluate(s, plan, OracleScorer{}, opt);
  EXPECT_EQ(t.auc, 1.0);
  EXPECT_TRUE(std::isnan(t.map));
  EXPECT_EQ(t.task, "answer_extraction");
}

TEST(Evaluate, UntrainedDeltaIsNearZero) {
  const auto s = grouped_sentences(600, 2);
  const auto plan = make_plan(s, Scheme::kCvot, 10, 0);
  double auc_delta = 0.0, map_delta = 0.0;
  constexpr int kSeeds = 8;
  for (int seed = 0; seed < kSeeds; ++seed) {
    EvalOptions opt;
    opt.task = uercm::Task::kSentence;
    opt.seed = static_cast<std::uint64_t>(seed);
    opt.baseline_draws = 200;
    const auto r = evaluate(s, plan, UntrainedScorer{}, opt);
    auc_delta += r.delta_auc;
    map_delta += r.delta_map;
    EXPECT_NEAR(r.baseline_auc, 0.5, 0.01);
    EXPECT_NEAR(r.baseline_map, 11.0 / 18.0, 0.01);
  }
  EXPECT_NEAR(auc_delta / kSeeds, 0.0, 0.02);
  EXPECT_NEAR(map_delta / kSeeds, 0.0, 0.02);
}

TEST(Evaluate, LopoPlanOverParticipants) {
  const auto s = grouped_sentences(60, 3);
  const auto plan = make_plan(s, Scheme::kLopo, 0, 0);
  ASSERT_EQ(plan.folds.size(), 2u);
  EvalOptions opt;
  opt.task = uercm::Task::kSentence;
  opt.baseline_draws = 10;
  const auto r = evaluate(s, plan, OracleScorer{}, opt);
  EXPECT_EQ(r.scheme, "lopo");
  for (const auto& f : r.folds) EXPECT_EQ(f.train_sentences + f.validation_sentences, 60u);
}

TEST(Evaluate, SentenceOnBothSidesIsLeakage) {
  auto s = grouped_sentences(12, 4);
  // same participant and trial filed under a question of the other fold
  Sentence dup = s[0];
  dup.question_id = 3;
  s.push_back(dup);
  SplitPlan plan;
  plan.folds = {{{"2", "3"}, {"0", "1"}}, {{"0", "1"}, {"2", "3"}}};
  EvalOptions opt;
  opt.baseline_draws = 1;
  EXPECT_THROW(evaluate(s, plan, OracleScorer{}, opt), LeakageError);
}

TEST(Evaluate, TamperedPlanIsLeakage) {
  const auto s = grouped_sentences(60, 5);
  auto plan = make_plan(s, Scheme::kCvot, 5, 0);
  plan.folds[0].train_ids.push_back(plan.folds[0].validation_ids[0]);
  EXPECT_THROW(evaluate(s, plan, OracleScorer{}, EvalOptions{}), LeakageError);
}

TEST(Evaluate, WrongPredictionCountIsStructural) {
  const auto s = grouped_sentences(60, 6);
  EXPECT_THROW(evaluate(s, make_plan(s, Scheme::kCvot, 5, 0), ShortScorer{}, EvalOptions{}),
               StructuralError);
}

TEST(HoldoutByQuestion, WholeQuestionsMove) {
  const auto s = grouped_sentences(90, 7);
  const auto [fit, hold] = holdout_by_question(s, 0.1, 3);
  EXPECT_EQ(hold.size(), 9u);
  EXPECT_EQ(fit.size() + hold.size(), s.size());
  std::set<int> held_q;
  for (const auto& x : hold) held_q.insert(x.question_id);
  for (const auto& x : fit) EXPECT_EQ(held_q.count(x.question_id), 0u);
  EXPECT_THROW(holdout_by_question({s[0]}, 0.1, 0), DataError);
}

TEST(Reports, CsvWriters) {
  test::TempDir dir("reports");
  const auto s = grouped_sentences(30, 8);
  EvalOptions opt;
  opt.task = uercm::Task::kSentence;
  opt.baseline_draws = 5;
  const auto r = evaluate(s, make_plan(s, Scheme::kCvot, 3, 0), OracleScorer{}, opt);
  write_sentence_scores(dir / "s.csv", r);
  write_word_scores(dir / "w.csv", r);
  write_fold_csv(dir / "f.csv", r);
  const auto sent = read_csv(dir / "s.csv");
  EXPECT_EQ(sent.rows.size(), 30u);
  EXPECT_EQ(sent.header.front(), "participant_id");
  std::size_t words = 0;
  for (const auto& x : s) words += static_cast<std::size_t>(x.length());
  EXPECT_EQ(read_csv(dir / "w.csv").rows.size(), words);
  EXPECT_EQ(read_csv(dir / "f.csv").rows.size(), 3u);
}
