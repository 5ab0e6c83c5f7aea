#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eegrc/baselines.hpp"
#include "eegrc/dataset.hpp"
#include "eegrc/metrics.hpp"
#include "eegrc/splits.hpp"
#include "eegrc/uercm.hpp"

namespace eegrc {

/// "answer_extraction" for the token task, "sentence_classification" otherwise.
std::string_view task_name(uercm::Task t);

/// Split unit of a sentence: decimal question id (CVOT) or participant id (LOPO).
std::string unit_of(const Sentence& s, Scheme scheme);

/// Plan over the units present in `sentences`.
SplitPlan make_plan(const std::vector<Sentence>& sentences, Scheme scheme, int folds,
                    std::uint64_t seed);

/// Splits off ceil(fraction * questions) whole questions of `train_set` as
/// the early-stopping split. Throws DataError with fewer than 2 questions.
std::pair<std::vector<Sentence>, std::vector<Sentence>> holdout_by_question(
    const std::vector<Sentence>& train_set, double fraction, std::uint64_t seed);

/// UERCM training with an internal early-stopping split carved from `train_set`.
uercm::TrainResult train_with_holdout(const std::vector<Sentence>& train_set,
                                      const uercm::ModelConfig& config, uercm::Task task,
                                      double holdout_fraction = 0.1);

struct FitOutput {
  std::vector<uercm::Prediction> predictions;  // one per validation sentence
  int epochs = 0;
  int best_epoch = -1;
};

/// A model under evaluation. Inputs are already standardized with the
/// statistics of `train`.
class SentenceScorer {
 public:
  virtual ~SentenceScorer() = default;
  virtual std::string name() const = 0;
  virtual FitOutput fit_predict(const std::vector<Sentence>& train,
                                const std::vector<Sentence>& validation, uercm::Task task,
                                std::uint64_t seed) const = 0;
};

class UercmScorer : public SentenceScorer {
 public:
  explicit UercmScorer(uercm::ModelConfig config, double holdout_fraction = 0.1)
      : config_(config), holdout_fraction_(holdout_fraction) {}
  std::string name() const override { return "uercm"; }
  FitOutput fit_predict(const std::vector<Sentence>& train, const std::vector<Sentence>& validation,
                        uercm::Task task, std::uint64_t seed) const override;

 private:
  uercm::ModelConfig config_;
  double holdout_fraction_;
};

/// Uniform random word scores; sentence scores aggregate them.
class UntrainedScorer : public SentenceScorer {
 public:
  std::string name() const override { return "untrained"; }
  FitOutput fit_predict(const std::vector<Sentence>& train, const std::vector<Sentence>& validation,
                        uercm::Task task, std::uint64_t seed) const override;
};

/// Logistic regression on words (answer labels for the token task, sentence
/// relevance otherwise); sentence scores aggregate word scores.
class LogisticScorer : public SentenceScorer {
 public:
  explicit LogisticScorer(LogisticOptions options = {}) : options_(options) {}
  std::string name() const override { return "logistic"; }
  FitOutput fit_predict(const std::vector<Sentence>& train, const std::vector<Sentence>& validation,
                        uercm::Task task, std::uint64_t seed) const override;

 private:
  LogisticOptions options_;
};

struct EvalOptions {
  uercm::Task task = uercm::Task::kToken;
  std::uint64_t seed = 0;
  int baseline_draws = 1000;
  int workers = 0;  // 0: worker_count()
};

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t train_sentences = 0;
  std::size_t validation_sentences = 0;
  double auc = 0.0;  // NaN when the fold has a single class
  double map = 0.0;  // NaN for the token task
  int epochs = 0;
  int best_epoch = -1;
};

struct ScoredSentence {
  std::size_t fold = 0;
  std::string participant_id;
  int trial_id = 0;
  int question_id = 0;
  int positive = 0;
  std::vector<int> word_indices;
  std::vector<int> answer;
  uercm::Prediction prediction;
};

struct EvalReport {
  std::string task;
  std::string scheme;
  std::string model;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double map = 0.0;  // NaN for the token task
  double baseline_auc = 0.0;
  double baseline_map = 0.0;
  double delta_auc = 0.0;
  double delta_map = 0.0;
  double macro_auc = 0.0;
  double macro_map = 0.0;
  std::size_t items = 0;
  std::size_t queries = 0;
  int baseline_draws = 0;
  std::vector<FoldMetrics> folds;
  std::vector<ScoredSentence> predictions;
};

/// Per fold: scaler fit on the fold's train sentences only, model fit and
/// scored on validation. Metrics are micro-pooled over all validation
/// predictions. MAP queries are (participant, question) groups. The
/// reference metrics average `baseline_draws` untrained draws on the same
/// pooled items. Throws LeakageError if a sentence lands on both sides.
EvalReport evaluate(const std::vector<Sentence>& sentences, const SplitPlan& plan,
                    const SentenceScorer& scorer, const EvalOptions& options);

/// Mean AUC and MAP of untrained scores over pooled sentences.
std::pair<double, double> untrained_reference(const std::vector<ScoredSentence>& pooled,
                                              uercm::Task task, int draws, std::uint64_t seed);

/// MAP queries built from scored sentences.
std::vector<RankingQuery> sentence_queries(const std::vector<ScoredSentence>& pooled);

nlohmann::json report_json(const EvalReport& r, bool with_folds = true);
void write_fold_csv(const std::filesystem::path& path, const EvalReport& r);
/// participant_id,trial_id,word_index,fold,answer,score
void write_word_scores(const std::filesystem::path& path, const EvalReport& r);
/// participant_id,trial_id,question_id,fold,positive,score
void write_sentence_scores(const std::filesystem::path& path, const EvalReport& r);

}  // namespace eegrc
