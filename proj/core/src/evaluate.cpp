#include "eegrc/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "eegrc/error.hpp"
#include "eegrc/metrics.hpp"
#include "eegrc/parallel.hpp"
#include "eegrc/random.hpp"

namespace eegrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::string_view task_name(uercm::Task t) {
  return t == uercm::Task::kToken ? "answer_extraction" : "sentence_classification";
}

std::string unit_of(const Sentence& s, Scheme scheme) {
  return scheme == Scheme::kCvot ? std::to_string(s.question_id) : s.participant_id;
}

SplitPlan make_plan(const std::vector<Sentence>& sentences, Scheme scheme, int folds,
                    std::uint64_t seed) {
  if (scheme == Scheme::kCvot) {
    std::vector<int> ids;
    for (const auto& s : sentences) ids.push_back(s.question_id);
    return split_cvot(ids, folds, seed);
  }
  std::vector<std::string> ids;
  for (const auto& s : sentences) ids.push_back(s.participant_id);
  SplitPlan plan = split_lopo(ids);
  plan.seed = seed;
  return plan;
}

std::pair<std::vector<Sentence>, std::vector<Sentence>> holdout_by_question(
    const std::vector<Sentence>& train_set, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in (0, 1)");
  }
  std::vector<int> questions;
  for (const auto& s : train_set) questions.push_back(s.question_id);
  std::sort(questions.begin(), questions.end());
  questions.erase(std::unique(questions.begin(), questions.end()), questions.end());
  if (questions.size() < 2) {
    throw DataError("early stopping needs at least 2 training questions, got " +
                    std::to_string(questions.size()));
  }
  Rng rng(seed);
  rng.shuffle(std::span<int>(questions));
  const auto n_hold = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(questions.size()))), 1,
      questions.size() - 1);
  const std::set<int> held(questions.begin(), questions.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::pair<std::vector<Sentence>, std::vector<Sentence>> out;
  for (const auto& s : train_set) (held.count(s.question_id) ? out.second : out.first).push_back(s);
  return out;
}

uercm::TrainResult train_with_holdout(const std::vector<Sentence>& train_set,
                                      const uercm::ModelConfig& config, uercm::Task task,
                                      double holdout_fraction) {
  auto [fit, stop] = holdout_by_question(train_set, holdout_fraction, derive_seed(config.seed, 0x401d));
  return uercm::train(fit, stop, config, task);
}

FitOutput UercmScorer::fit_predict(const std::vector<Sentence>& train,
                                   const std::vector<Sentence>& validation, uercm::Task task,
                                   std::uint64_t seed) const {
  uercm::ModelConfig c = config_;
  c.seed = seed;
  const uercm::TrainResult r = train_with_holdout(train, c, task, holdout_fraction_);
  FitOutput out;
  out.predictions = uercm::predict(r.params, c, validation);
  out.epochs = static_cast<int>(r.history.validation_auc.size());
  out.best_epoch = r.history.best_epoch;
  return out;
}

namespace {

std::vector<uercm::Prediction> aggregate(const std::vector<Sentence>& sentences,
                                         const std::vector<double>& word_scores) {
  std::vector<uercm::Prediction> out;
  std::size_t pos = 0;
  for (const auto& s : sentences) {
    uercm::Prediction p;
    const auto len = static_cast<std::size_t>(s.length());
    p.word_probs.assign(word_scores.begin() + static_cast<std::ptrdiff_t>(pos),
                        word_scores.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
    p.sentence_prob = aggregate_sentence_score(p.word_probs);
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t word_count(const std::vector<Sentence>& sentences) {
  std::size_t n = 0;
  for (const auto& s : sentences) n += static_cast<std::size_t>(s.length());
  return n;
}

}  // namespace

FitOutput UntrainedScorer::fit_predict(const std::vector<Sentence>&,
                                       const std::vector<Sentence>& validation, uercm::Task,
                                       std::uint64_t seed) const {
  FitOutput out;
  out.predictions = aggregate(validation, untrained_scores(word_count(validation), seed));
  return out;
}

FitOutput LogisticScorer::fit_predict(const std::vector<Sentence>& train,
                                      const std::vector<Sentence>& validation, uercm::Task task,
                                      std::uint64_t) const {
  const auto n = static_cast<Eigen::Index>(word_count(train));
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(kFeatureDim));
  std::vector<int> y;
  y.reserve(static_cast<std::size_t>(n));
  Eigen::Index row = 0;
  for (const auto& s : train) {
    x.middleRows(row, s.length()) = s.features;
    row += s.length();
    for (Eigen::Index i = 0; i < s.length(); ++i) {
      y.push_back(task == uercm::Task::kToken ? s.answer[static_cast<std::size_t>(i)] : s.positive());
    }
  }
  const LogisticWordScorer model = LogisticWordScorer::fit(x, y, options_);
  std::vector<double> scores;
  for (const auto& s : validation) {
    const Eigen::VectorXd p = model.score(s.features);
    scores.insert(scores.end(), p.data(), p.data() + p.size());
  }
  FitOutput out;
  out.predictions = aggregate(validation, scores);
  return out;
}

std::vector<RankingQuery> sentence_queries(const std::vector<ScoredSentence>& pooled) {
  std::map<std::pair<std::string, int>, RankingQuery> groups;
  for (const auto& s : pooled) {
    auto& q = groups[{s.participant_id, s.question_id}];
    q.scores.push_back(s.prediction.sentence_prob);
    q.relevant.push_back(s.positive);
  }
  std::vector<RankingQuery> out;
  for (auto& [key, q] : groups) {
    if (std::find(q.relevant.begin(), q.relevant.end(), 1) != q.relevant.end()) {
      out.push_back(std::move(q));
    }
  }
  return out;
}

namespace {

struct Items {
  std::vector<double> scores;
  std::vector<int> labels;
};

Items pooled_items(const std::vector<ScoredSentence>& pooled, uercm::Task task) {
  Items it;
  for (const auto& s : pooled) {
    if (task == uercm::Task::kSentence) {
      it.scores.push_back(s.prediction.sentence_prob);
      it.labels.push_back(s.positive);
    } else {
      it.scores.insert(it.scores.end(), s.prediction.word_probs.begin(), s.prediction.word_probs.end());
      it.labels.insert(it.labels.end(), s.answer.begin(), s.answer.end());
    }
  }
  return it;
}

bool both_classes(const std::vector<int>& labels) {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  return pos > 0 && pos < static_cast<std::ptrdiff_t>(labels.size());
}

double safe_auc(const Items& it) {
  return both_classes(it.labels) ? auc(it.scores, it.labels) : kNaN;
}

double safe_map(const std::vector<ScoredSentence>& pooled) {
  const auto q = sentence_queries(pooled);
  return q.empty() ? kNaN : mean_average_precision(q);
}

double nan_mean(const std::vector<double>& v) {
  double sum = 0.0;
  int n = 0;
  for (double x : v) {
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  }
  return n ? sum / n : kNaN;
}

}  // namespace

std::pair<double, double> untrained_reference(const std::vector<ScoredSentence>& pooled,
                                              uercm::Task task, int draws, std::uint64_t seed) {
  if (draws < 1) throw ConfigError("untrained reference needs at least one draw");
  std::size_t n_words = 0;
  for (const auto& s : pooled) n_words += s.prediction.word_probs.size();
  double auc_sum = 0.0;
  double map_sum = 0.0;
  std::vector<ScoredSentence> draw = pooled;
  for (int d = 0; d < draws; ++d) {
    const auto scores = untrained_scores(n_words, derive_seed(seed, static_cast<std::uint64_t>(d)));
    std::size_t pos = 0;
    for (auto& s : draw) {
      auto& wp = s.prediction.word_probs;
      std::copy_n(scores.begin() + static_cast<std::ptrdiff_t>(pos), wp.size(), wp.begin());
      pos += wp.size();
      s.prediction.sentence_prob = aggregate_sentence_score(wp);
    }
    const Items it = pooled_items(draw, task);
    auc_sum += auc(it.scores, it.labels);
    if (task == uercm::Task::kSentence) map_sum += mean_average_precision(sentence_queries(draw));
  }
  return {auc_sum / draws, task == uercm::Task::kSentence ? map_sum / draws : kNaN};
}

EvalReport evaluate(const std::vector<Sentence>& sentences, const SplitPlan& plan,
                    const SentenceScorer& scorer, const EvalOptions& options) {
  plan.check();
  if (plan.folds.empty()) throw ConfigError("split plan has no folds");
  const std::size_t n_folds = plan.folds.size();

  struct FoldData {
    std::vector<Sentence> train, validation;
  };
  std::vector<FoldData> data(n_folds);
  for (std::size_t f = 0; f < n_folds; ++f) {
    const std::set<std::string> tr(plan.folds[f].train_ids.begin(), plan.folds[f].train_ids.end());
    const std::set<std::string> va(plan.folds[f].validation_ids.begin(),
                                   plan.folds[f].validation_ids.end());
    std::set<std::pair<std::string, int>> train_keys;
    for (const auto& s : sentences) {
      const std::string u = unit_of(s, plan.scheme);
      if (tr.count(u)) {
        data[f].train.push_back(s);
        train_keys.insert({s.participant_id, s.trial_id});
      } else if (va.count(u)) {
        data[f].validation.push_back(s);
      }
    }
    for (const auto& s : data[f].validation) {
      if (train_keys.count({s.participant_id, s.trial_id})) {
        throw LeakageError("fold " + std::to_string(f) + ": sentence " + s.participant_id + "/" +
                           std::to_string(s.trial_id) + " is in both train and validation");
      }
    }
    if (data[f].train.empty() || data[f].validation.empty()) {
      throw DataError("fold " + std::to_string(f) + " has an empty train or validation split");
    }
  }

  std::vector<FitOutput> fits(n_folds);
  parallel_for(
      n_folds,
      [&](std::size_t f) {
        const FeatureScaler scaler = FeatureScaler::fit(sentence_words(data[f].train));
        const auto train = scale_sentences(data[f].train, scaler);
        const auto validation = scale_sentences(data[f].validation, scaler);
        fits[f] = scorer.fit_predict(train, validation, options.task,
                                     derive_seed(options.seed, static_cast<std::uint64_t>(f)));
        if (fits[f].predictions.size() != validation.size()) {
          throw StructuralError("scorer returned " + std::to_string(fits[f].predictions.size()) +
                                " predictions for " + std::to_string(validation.size()) +
                                " sentences");
        }
      },
      options.workers);

  EvalReport r;
  r.task = std::string(task_name(options.task));
  r.scheme = std::string(to_string(plan.scheme));
  r.model = scorer.name();
  r.seed = options.seed;
  r.baseline_draws = options.baseline_draws;
  std::vector<double> fold_auc, fold_map;
  for (std::size_t f = 0; f < n_folds; ++f) {
    std::vector<ScoredSentence> fold_scored;
    for (std::size_t i = 0; i < data[f].validation.size(); ++i) {
      const Sentence& s = data[f].validation[i];
      fold_scored.push_back({f, s.participant_id, s.trial_id, s.question_id, s.positive(),
                             s.word_indices, s.answer, fits[f].predictions[i]});
    }
    FoldMetrics m;
    m.fold = f;
    m.train_sentences = data[f].train.size();
    m.validation_sentences = data[f].validation.size();
    m.auc = safe_auc(pooled_items(fold_scored, options.task));
    m.map = options.task == uercm::Task::kSentence ? safe_map(fold_scored) : kNaN;
    m.epochs = fits[f].epochs;
    m.best_epoch = fits[f].best_epoch;
    fold_auc.push_back(m.auc);
    fold_map.push_back(m.map);
    r.folds.push_back(m);
    r.predictions.insert(r.predictions.end(), fold_scored.begin(), fold_scored.end());
  }

  const Items pooled = pooled_items(r.predictions, options.task);
  r.items = pooled.scores.size();
  r.auc = auc(pooled.scores, pooled.labels);
  r.macro_auc = nan_mean(fold_auc);
  if (options.task == uercm::Task::kSentence) {
    const auto queries = sentence_queries(r.predictions);
    r.queries = queries.size();
    r.map = mean_average_precision(queries);
    r.macro_map = nan_mean(fold_map);
  } else {
    r.map = r.macro_map = kNaN;
  }
  std::tie(r.baseline_auc, r.baseline_map) =
      untrained_reference(r.predictions, options.task, options.baseline_draws,
                          derive_seed(options.seed, 0xba5e));
  r.delta_auc = r.auc - r.baseline_auc;
  r.delta_map = options.task == uercm::Task::kSentence ? r.map - r.baseline_map : kNaN;
  return r;
}

namespace {

nlohmann::json num(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

}  // namespace

nlohmann::json report_json(const EvalReport& r, bool with_folds) {
  nlohmann::json j = {{"task", r.task},
                      {"scheme", r.scheme},
                      {"model", r.model},
                      {"seed", r.seed},
                      {"auc", num(r.auc)},
                      {"map", num(r.map)},
                      {"baseline_auc", num(r.baseline_auc)},
                      {"baseline_map", num(r.baseline_map)},
                      {"delta_auc", num(r.delta_auc)},
                      {"delta_map", num(r.delta_map)},
                      {"macro_auc", num(r.macro_auc)},
                      {"macro_map", num(r.macro_map)},
                      {"items", r.items},
                      {"queries", r.queries},
                      {"baseline_draws", r.baseline_draws}};
  if (with_folds) {
    j["folds"] = nlohmann::json::array();
    for (const auto& f : r.folds) {
      j["folds"].push_back({{"fold", f.fold},
                            {"train_sentences", f.train_sentences},
                            {"validation_sentences", f.validation_sentences},
                            {"auc", num(f.auc)},
                            {"map", num(f.map)},
                            {"epochs", f.epochs},
                            {"best_epoch", f.best_epoch}});
    }
  }
  return j;
}

void write_fold_csv(const std::filesystem::path& path, const EvalReport& r) {
  auto f = open_out(path);
  f << "fold,train_sentences,validation_sentences,auc,map,epochs,best_epoch\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const auto& m : r.folds) {
    f << m.fold << ',' << m.train_sentences << ',' << m.validation_sentences << ',' << cell(m.auc)
      << ',' << cell(m.map) << ',' << m.epochs << ',' << m.best_epoch << '\n';
  }
}

void write_word_scores(const std::filesystem::path& path, const EvalReport& r) {
  auto f = open_out(path);
  f << "participant_id,trial_id,word_index,fold,answer,score\n";
  for (const auto& s : r.predictions) {
    for (std::size_t i = 0; i < s.word_indices.size(); ++i) {
      f << s.participant_id << ',' << s.trial_id << ',' << s.word_indices[i] << ',' << s.fold << ','
        << s.answer[i] << ',' << format_double(s.prediction.word_probs[i]) << '\n';
    }
  }
}

void write_sentence_scores(const std::filesystem::path& path, const EvalReport& r) {
  auto f = open_out(path);
  f << "participant_id,trial_id,question_id,fold,positive,score\n";
  for (const auto& s : r.predictions) {
    f << s.participant_id << ',' << s.trial_id << ',' << s.question_id << ',' << s.fold << ','
      << s.positive << ',' << format_double(s.prediction.sentence_prob) << '\n';
  }
}

}  // namespace eegrc
