#pragma once

// Sentence-level attention model over word EEG features:
//   U  = X W_h + b_h                      (linear projection)
//   U' = U + P                            (learnable positional table)
//   Z  = MultiHead(U', U', U')            (one masked self-attention layer)
//   Z' = BatchNorm(Z)                     (statistics over unmasked positions)
//   y_s  = softmax(W_s ReLU(concat Z') + b_s)    sentence head
//   y_oi = softmax(W_o ReLU(z'_i) + b_o)         token head
// Both heads emit two logits; the reported probability is the second class.
// Gradients are derived by hand (see backward()).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "eegrc/dataset.hpp"

namespace eegrc::uercm {

enum class Task { kSentence, kToken };
enum class Mode { kTrain, kEval };

std::string_view to_string(Task t);
Task parse_task(std::string_view s);

struct ModelConfig {
  int d = static_cast<int>(kFeatureDim);
  int hidden = 32;
  int heads = 4;
  int t_max = 16;
  double lr = 1e-3;
  int batch_size = 8;
  int patience = 5;
  int max_epochs = 100;
  std::uint64_t seed = 0;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  int head_dim() const { return hidden / heads; }
  /// Throws ConfigError on inconsistent values.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// All tensors are stored as dense matrices; vectors are 1 x n.
/// Attention projections are h x h with head k owning columns
/// [k * h/heads, (k+1) * h/heads).
struct ModelParams {
  Eigen::MatrixXd w_h, b_h;
  Eigen::MatrixXd pos;
  Eigen::MatrixXd w_q, b_q, w_k, b_k, w_v, b_v;
  Eigen::MatrixXd w_attn, b_attn;
  Eigen::MatrixXd bn_gamma, bn_beta;
  Eigen::MatrixXd w_s, b_s;
  Eigen::MatrixXd w_o, b_o;
  // running statistics, not trained by gradient
  Eigen::MatrixXd bn_running_mean, bn_running_var;

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero positional
  /// table, unit gamma, zero beta.
  static ModelParams init(const ModelConfig& config);
  /// Same shapes, all zeros (used for gradients and optimizer moments).
  static ModelParams zeros_like(const ModelParams& p);

  template <typename Self, typename F>
  static void visit_trainable(Self& self, F&& f) {
    f("w_h", self.w_h);
    f("b_h", self.b_h);
    f("pos", self.pos);
    f("w_q", self.w_q);
    f("b_q", self.b_q);
    f("w_k", self.w_k);
    f("b_k", self.b_k);
    f("w_v", self.w_v);
    f("b_v", self.b_v);
    f("w_attn", self.w_attn);
    f("b_attn", self.b_attn);
    f("bn_gamma", self.bn_gamma);
    f("bn_beta", self.bn_beta);
    f("w_s", self.w_s);
    f("b_s", self.b_s);
    f("w_o", self.w_o);
    f("b_o", self.b_o);
  }

  template <typename Self, typename F>
  static void visit_all(Self& self, F&& f) {
    visit_trainable(self, f);
    f("bn_running_mean", self.bn_running_mean);
    f("bn_running_var", self.bn_running_var);
  }

  /// Throws StructuralError if any tensor shape disagrees with `config`.
  void check_shapes(const ModelConfig& config) const;
  bool all_finite() const;
};

/// Padded batch: every sentence occupies t_max rows; masked rows hold zeros.
struct TrainingBatch {
  std::vector<Eigen::MatrixXd> x;            // batch of t_max x d
  std::vector<std::vector<char>> mask;       // batch of t_max validity flags
  Eigen::VectorXd y_s;                       // sentence labels
  Eigen::MatrixXd y_o;                       // batch x t_max token labels

  std::size_t size() const { return x.size(); }
};

/// Throws DataError if a sentence is longer than t_max.
TrainingBatch make_batch(std::span<const Sentence* const> sentences, const ModelConfig& config);

struct ForwardTrace {
  Mode mode = Mode::kTrain;
  std::vector<Eigen::MatrixXd> u, u_pos, q, k, v;
  std::vector<std::vector<Eigen::MatrixXd>> attention;  // [batch][head], t_max x t_max
  std::vector<Eigen::MatrixXd> concat;                  // heads concatenated, t_max x h
  std::vector<Eigen::MatrixXd> z, z_hat, z_norm;        // z_norm is Z', zero on masked rows
  Eigen::RowVectorXd bn_mean, bn_var, bn_inv_std;       // statistics used in this pass
  double bn_count = 0.0;                                // unmasked positions (train mode)
  Eigen::MatrixXd sentence_logits;                      // batch x 2
  Eigen::VectorXd sentence_prob;                        // batch
  std::vector<Eigen::MatrixXd> token_logits;            // batch of t_max x 2
  Eigen::MatrixXd token_prob;                           // batch x t_max, 0 on masked rows
};

/// Pure function of its inputs; running statistics are not touched.
ForwardTrace forward(const ModelParams& params, const TrainingBatch& batch,
                     const ModelConfig& config, Mode mode);

inline constexpr double kProbClamp = 1e-7;

/// Sentence task: mean over the batch of binary cross-entropy on y_s.
/// Token task: per sentence the sum of BCE over unmasked words, then the
/// batch mean. Probabilities are clamped to [1e-7, 1 - 1e-7].
double loss(const ForwardTrace& trace, const TrainingBatch& batch, Task task);

/// Gradient of loss() w.r.t. every trainable tensor. Throws TrainingError
/// naming the tensor if a gradient is non-finite.
ModelParams backward(const ForwardTrace& trace, const TrainingBatch& batch,
                     const ModelParams& params, const ModelConfig& config, Task task);

/// Running-average update of the batch-norm statistics after a train pass.
void update_running_stats(ModelParams& params, const ForwardTrace& trace,
                          const ModelConfig& config);

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
  std::string worst_tensor;
  Eigen::Index worst_row = 0, worst_col = 0;
};

/// Central differences on `n_coords` random trainable coordinates (every
/// tensor gets at least min(size, 4) of them). Relative error is
/// |g - fd| / max(|g|, |fd|, 1e-6).
GradientCheck finite_difference_check(const ModelParams& params, const TrainingBatch& batch,
                                      const ModelConfig& config, Task task,
                                      std::size_t n_coords, std::uint64_t seed,
                                      double step = 1e-5);

class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams& like, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(ModelParams& params, const ModelParams& grads);
  long steps() const { return t_; }

 private:
  ModelParams m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
};

/// Stops after `patience` consecutive epochs without strict improvement.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience) : patience_(patience) {}
  /// Records the metric for the next epoch; returns true when training should stop.
  bool update(double metric);
  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }
  double best() const { return best_; }
  int epochs_seen() const { return epoch_; }

 private:
  int patience_;
  double best_ = -1.0;
  int best_epoch_ = -1;
  int epoch_ = 0;
  int since_best_ = 0;
  bool improved_ = false;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_auc;
  int best_epoch = -1;
  bool stopped_early = false;
};

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

/// Adam over shuffled minibatches; validation AUC after every epoch; returns
/// the best-validation parameters. Throws DataError for an empty split.
TrainResult train(const std::vector<Sentence>& train_set, const std::vector<Sentence>& validation,
                  const ModelConfig& config, Task task);

struct Prediction {
  double sentence_prob = 0.5;
  std::vector<double> word_probs;
};

/// Eval-mode inference for one (already standardized) sentence.
Prediction predict(const ModelParams& params, const ModelConfig& config, const Sentence& s);
std::vector<Prediction> predict(const ModelParams& params, const ModelConfig& config,
                                const std::vector<Sentence>& sentences);

/// Scores under `task` used for validation: per-sentence or per-word.
struct ScoredItems {
  std::vector<double> scores;
  std::vector<int> labels;
};
ScoredItems scored_items(const std::vector<Prediction>& predictions,
                         const std::vector<Sentence>& sentences, Task task);

struct HyperGrid {
  std::vector<int> hidden{16, 32};
  std::vector<int> heads{4, 8};
  std::vector<double> lr{1e-4, 1e-3, 1e-2};
};

/// Configs in tie-break order: smaller hidden, then fewer heads, then smaller lr.
std::vector<ModelConfig> expand_grid(const ModelConfig& base, const HyperGrid& grid);

struct GridEntry {
  ModelConfig config;
  std::vector<double> scheme_scores;
  double mean_score = 0.0;
};

struct GridResult {
  ModelConfig best;
  std::vector<GridEntry> entries;
};

/// `score(config, scheme)` returns the mean validation AUC of one split
/// scheme. The best config maximizes the mean over schemes; ties keep the
/// earlier config in expand_grid order.
using GridScorer = std::function<double(const ModelConfig&, std::string_view scheme)>;
GridResult grid_search(const ModelConfig& base, const HyperGrid& grid,
                       const std::vector<std::string>& schemes, const GridScorer& score);

}  // namespace eegrc::uercm
