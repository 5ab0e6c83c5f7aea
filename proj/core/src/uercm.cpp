#include "eegrc/uercm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "eegrc/error.hpp"
#include "eegrc/metrics.hpp"
#include "eegrc/random.hpp"

namespace eegrc::uercm {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;

std::string_view to_string(Task t) {
  return t == Task::kSentence ? "sentence" : "token";
}

Task parse_task(std::string_view s) {
  if (s == "sentence" || s == "sentence_classification") return Task::kSentence;
  if (s == "token" || s == "answer_extraction") return Task::kToken;
  throw ConfigError("unknown task '" + std::string(s) + "'");
}

void ModelConfig::validate() const {
  if (d <= 0) throw ConfigError("model input size must be positive");
  if (hidden <= 0 || heads <= 0) throw ConfigError("hidden size and heads must be positive");
  if (hidden % heads != 0) {
    throw ConfigError("hidden size " + std::to_string(hidden) + " not divisible by " +
                      std::to_string(heads) + " heads");
  }
  if (t_max <= 0) throw ConfigError("t_max must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be positive");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (patience <= 0) throw ConfigError("patience must be positive");
  if (max_epochs < 0) throw ConfigError("max_epochs must be non-negative");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) throw ConfigError("bn momentum must be in (0,1]");
  if (!(bn_eps > 0.0)) throw ConfigError("bn eps must be positive");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"d", c.d},
                     {"hidden", c.hidden},
                     {"heads", c.heads},
                     {"t_max", c.t_max},
                     {"lr", c.lr},
                     {"batch_size", c.batch_size},
                     {"patience", c.patience},
                     {"max_epochs", c.max_epochs},
                     {"seed", c.seed},
                     {"bn_momentum", c.bn_momentum},
                     {"bn_eps", c.bn_eps}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  try {
    ModelConfig out;
    out.d = j.at("d").get<int>();
    out.hidden = j.at("hidden").get<int>();
    out.heads = j.at("heads").get<int>();
    out.t_max = j.at("t_max").get<int>();
    out.lr = j.at("lr").get<double>();
    out.batch_size = j.value("batch_size", out.batch_size);
    out.patience = j.value("patience", out.patience);
    out.max_epochs = j.value("max_epochs", out.max_epochs);
    out.seed = j.value("seed", out.seed);
    out.bn_momentum = j.value("bn_momentum", out.bn_momentum);
    out.bn_eps = j.value("bn_eps", out.bn_eps);
    c = out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
}

namespace {

struct Shape {
  const char* name;
  Eigen::Index rows, cols;
};

std::vector<Shape> expected_shapes(const ModelConfig& c) {
  const Eigen::Index h = c.hidden;
  return {{"w_h", c.d, h},        {"b_h", 1, h},      {"pos", c.t_max, h},
          {"w_q", h, h},          {"b_q", 1, h},      {"w_k", h, h},
          {"b_k", 1, h},          {"w_v", h, h},      {"b_v", 1, h},
          {"w_attn", h, h},       {"b_attn", 1, h},   {"bn_gamma", 1, h},
          {"bn_beta", 1, h},      {"w_s", c.t_max * h, 2},
          {"b_s", 1, 2},          {"w_o", h, 2},      {"b_o", 1, 2},
          {"bn_running_mean", 1, h}, {"bn_running_var", 1, h}};
}

double fan_in_of(std::string_view name, const ModelConfig& c) {
  if (name == "w_h" || name == "b_h") return c.d;
  if (name == "w_s" || name == "b_s") return static_cast<double>(c.t_max) * c.hidden;
  return c.hidden;
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& config) {
  config.validate();
  ModelParams p;
  const auto shapes = expected_shapes(config);
  visit_all(p, [&](std::string_view name, MatrixXd& m) {
    for (const auto& s : shapes) {
      if (name == s.name) m = MatrixXd::Zero(s.rows, s.cols);
    }
  });
  Rng rng(derive_seed(config.seed, 0x1a17));
  visit_trainable(p, [&](std::string_view name, MatrixXd& m) {
    if (name == "pos" || name == "bn_beta") return;
    if (name == "bn_gamma") {
      m.setOnes();
      return;
    }
    const double bound = 1.0 / std::sqrt(fan_in_of(name, config));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-bound, bound);
    }
  });
  p.bn_running_var.setOnes();
  return p;
}

ModelParams ModelParams::zeros_like(const ModelParams& p) {
  ModelParams z = p;
  visit_all(z, [](std::string_view, MatrixXd& m) { m.setZero(); });
  return z;
}

void ModelParams::check_shapes(const ModelConfig& config) const {
  const auto shapes = expected_shapes(config);
  visit_all(*this, [&](std::string_view name, const MatrixXd& m) {
    for (const auto& s : shapes) {
      if (name != s.name) continue;
      if (m.rows() != s.rows || m.cols() != s.cols) {
        throw StructuralError("tensor " + std::string(name) + " has shape " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              ", expected " + std::to_string(s.rows) + "x" +
                              std::to_string(s.cols));
      }
    }
  });
}

bool ModelParams::all_finite() const {
  bool ok = true;
  visit_all(*this, [&](std::string_view, const MatrixXd& m) { ok = ok && m.allFinite(); });
  return ok;
}

TrainingBatch make_batch(std::span<const Sentence* const> sentences, const ModelConfig& config) {
  TrainingBatch b;
  const auto n = sentences.size();
  b.x.reserve(n);
  b.mask.reserve(n);
  b.y_s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  b.y_o = MatrixXd::Zero(static_cast<Eigen::Index>(n), config.t_max);
  for (std::size_t i = 0; i < n; ++i) {
    const Sentence& s = *sentences[i];
    const Eigen::Index len = s.length();
    if (len > config.t_max) {
      throw DataError("sentence " + s.participant_id + "/" + std::to_string(s.trial_id) +
                      " has " + std::to_string(len) + " words, t_max is " +
                      std::to_string(config.t_max));
    }
    if (len == 0) throw DataError("empty sentence " + s.participant_id + "/" + std::to_string(s.trial_id));
    if (s.features.cols() != config.d) {
      throw StructuralError("sentence features have " + std::to_string(s.features.cols()) +
                            " columns, model expects " + std::to_string(config.d));
    }
    MatrixXd x = MatrixXd::Zero(config.t_max, config.d);
    x.topRows(len) = s.features;
    b.x.push_back(std::move(x));
    std::vector<char> m(static_cast<std::size_t>(config.t_max), 0);
    std::fill_n(m.begin(), len, 1);
    b.mask.push_back(std::move(m));
    b.y_s(static_cast<Eigen::Index>(i)) = s.positive();
    for (Eigen::Index w = 0; w < len; ++w) {
      b.y_o(static_cast<Eigen::Index>(i), w) =
          static_cast<std::size_t>(w) < s.answer.size() ? s.answer[static_cast<std::size_t>(w)] : 0;
    }
  }
  return b;
}

namespace {

// Valid positions form a prefix; returns its length.
Eigen::Index valid_length(const std::vector<char>& mask) {
  Eigen::Index len = 0;
  while (len < static_cast<Eigen::Index>(mask.size()) && mask[static_cast<std::size_t>(len)]) ++len;
  for (auto i = static_cast<std::size_t>(len); i < mask.size(); ++i) {
    if (mask[i]) throw StructuralError("mask must mark a prefix of positions as valid");
  }
  return len;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double bce(double p, double y) {
  const double c = clamp_prob(p);
  return -(y * std::log(c) + (1.0 - y) * std::log(1.0 - c));
}

// dL/dp of the clamped cross-entropy, folded through the two-logit softmax:
// returns dL/d(logit1); dL/d(logit0) is its negation.
double logit_grad(double p, double y) {
  if (p < kProbClamp || p > 1.0 - kProbClamp) return 0.0;
  return p - y;
}

void check_batch(const TrainingBatch& batch, const ModelConfig& config) {
  if (batch.x.empty()) throw DataError("empty batch");
  if (batch.mask.size() != batch.x.size() || batch.y_s.size() != static_cast<Eigen::Index>(batch.x.size()) ||
      batch.y_o.rows() != static_cast<Eigen::Index>(batch.x.size()) || batch.y_o.cols() != config.t_max) {
    throw StructuralError("batch components disagree in size");
  }
  for (std::size_t b = 0; b < batch.x.size(); ++b) {
    if (batch.x[b].rows() != config.t_max || batch.x[b].cols() != config.d) {
      throw StructuralError("batch input " + std::to_string(b) + " is " +
                            std::to_string(batch.x[b].rows()) + "x" +
                            std::to_string(batch.x[b].cols()) + ", expected " +
                            std::to_string(config.t_max) + "x" + std::to_string(config.d));
    }
    if (batch.mask[b].size() != static_cast<std::size_t>(config.t_max)) {
      throw StructuralError("mask length disagrees with t_max");
    }
  }
}

}  // namespace

ForwardTrace forward(const ModelParams& params, const TrainingBatch& batch,
                     const ModelConfig& config, Mode mode) {
  params.check_shapes(config);
  check_batch(batch, config);
  const auto n = batch.size();
  const Eigen::Index T = config.t_max;
  const Eigen::Index h = config.hidden;
  const int heads = config.heads;
  const Eigen::Index dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  ForwardTrace tr;
  tr.mode = mode;
  tr.u.resize(n);
  tr.u_pos.resize(n);
  tr.q.resize(n);
  tr.k.resize(n);
  tr.v.resize(n);
  tr.attention.resize(n);
  tr.concat.resize(n);
  tr.z.resize(n);
  tr.z_hat.resize(n);
  tr.z_norm.resize(n);
  tr.token_logits.resize(n);

  std::vector<Eigen::Index> lens(n);
  for (std::size_t b = 0; b < n; ++b) {
    const Eigen::Index L = lens[b] = valid_length(batch.mask[b]);
    auto zero = [&] { return MatrixXd::Zero(T, h); };
    tr.u[b] = zero();
    tr.u_pos[b] = zero();
    tr.q[b] = zero();
    tr.k[b] = zero();
    tr.v[b] = zero();
    tr.concat[b] = zero();
    tr.z[b] = zero();
    tr.attention[b].assign(static_cast<std::size_t>(heads), MatrixXd::Zero(T, T));
    if (L == 0) continue;

    const auto ones = Eigen::VectorXd::Ones(L);
    tr.u[b].topRows(L) = batch.x[b].topRows(L) * params.w_h + ones * params.b_h;
    tr.u_pos[b].topRows(L) = tr.u[b].topRows(L) + params.pos.topRows(L);
    const MatrixXd up = tr.u_pos[b].topRows(L);
    tr.q[b].topRows(L) = up * params.w_q + ones * params.b_q;
    tr.k[b].topRows(L) = up * params.w_k + ones * params.b_k;
    tr.v[b].topRows(L) = up * params.w_v + ones * params.b_v;

    for (int hd = 0; hd < heads; ++hd) {
      const Eigen::Index c0 = hd * dh;
      const MatrixXd qh = tr.q[b].block(0, c0, L, dh);
      const MatrixXd kh = tr.k[b].block(0, c0, L, dh);
      MatrixXd s = (qh * kh.transpose()) * scale;
      for (Eigen::Index i = 0; i < L; ++i) {
        const double mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp().matrix();
        s.row(i) /= s.row(i).sum();
      }
      tr.attention[b][static_cast<std::size_t>(hd)].topLeftCorner(L, L) = s;
      tr.concat[b].block(0, c0, L, dh) = s * tr.v[b].block(0, c0, L, dh);
    }
    tr.z[b].topRows(L) = tr.concat[b].topRows(L) * params.w_attn + ones * params.b_attn;
  }

  // batch normalization over every valid position of the batch
  if (mode == Mode::kTrain) {
    RowVectorXd sum = RowVectorXd::Zero(h);
    double count = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      sum += tr.z[b].topRows(lens[b]).colwise().sum();
      count += static_cast<double>(lens[b]);
    }
    if (count == 0.0) throw DataError("batch has no valid positions");
    tr.bn_mean = sum / count;
    RowVectorXd sq = RowVectorXd::Zero(h);
    for (std::size_t b = 0; b < n; ++b) {
      const MatrixXd c = tr.z[b].topRows(lens[b]).rowwise() - tr.bn_mean;
      sq += c.array().square().matrix().colwise().sum();
    }
    tr.bn_var = sq / count;
    tr.bn_count = count;
  } else {
    tr.bn_mean = params.bn_running_mean;
    tr.bn_var = params.bn_running_var;
    tr.bn_count = 0.0;
  }
  tr.bn_inv_std = (tr.bn_var.array() + config.bn_eps).rsqrt().matrix();

  tr.sentence_logits = MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
  tr.sentence_prob = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  tr.token_prob = MatrixXd::Zero(static_cast<Eigen::Index>(n), T);
  for (std::size_t b = 0; b < n; ++b) {
    const Eigen::Index L = lens[b];
    const auto bi = static_cast<Eigen::Index>(b);
    tr.z_hat[b] = MatrixXd::Zero(T, h);
    tr.z_norm[b] = MatrixXd::Zero(T, h);
    tr.token_logits[b] = MatrixXd::Zero(T, 2);
    if (L > 0) {
      tr.z_hat[b].topRows(L) =
          ((tr.z[b].topRows(L).rowwise() - tr.bn_mean).array().rowwise() * tr.bn_inv_std.array())
              .matrix();
      tr.z_norm[b].topRows(L) =
          (tr.z_hat[b].topRows(L).array().rowwise() * params.bn_gamma.row(0).array()).matrix() +
          Eigen::VectorXd::Ones(L) * params.bn_beta;
    }
    const MatrixXd relu = tr.z_norm[b].cwiseMax(0.0);
    // row-major flatten: position t occupies entries [t*h, (t+1)*h)
    const MatrixXd relu_t = relu.transpose();
    const Eigen::Map<const RowVectorXd> flat(relu_t.data(), T * h);
    tr.sentence_logits.row(bi) = flat * params.w_s + params.b_s;
    tr.sentence_prob(bi) = sigmoid(tr.sentence_logits(bi, 1) - tr.sentence_logits(bi, 0));
    if (L > 0) {
      tr.token_logits[b].topRows(L) =
          relu.topRows(L) * params.w_o + Eigen::VectorXd::Ones(L) * params.b_o;
      for (Eigen::Index i = 0; i < L; ++i) {
        tr.token_prob(bi, i) = sigmoid(tr.token_logits[b](i, 1) - tr.token_logits[b](i, 0));
      }
    }
  }
  return tr;
}

double loss(const ForwardTrace& trace, const TrainingBatch& batch, Task task) {
  const auto n = batch.size();
  if (n == 0) throw DataError("empty batch");
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    if (task == Task::kSentence) {
      total += bce(trace.sentence_prob(bi), batch.y_s(bi));
    } else {
      for (std::size_t i = 0; i < batch.mask[b].size(); ++i) {
        if (!batch.mask[b][i]) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        total += bce(trace.token_prob(bi, ii), batch.y_o(bi, ii));
      }
    }
  }
  return total / static_cast<double>(n);
}

ModelParams backward(const ForwardTrace& trace, const TrainingBatch& batch,
                     const ModelParams& params, const ModelConfig& config, Task task) {
  const auto n = batch.size();
  const Eigen::Index T = config.t_max;
  const Eigen::Index h = config.hidden;
  const int heads = config.heads;
  const Eigen::Index dh = config.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double inv_n = 1.0 / static_cast<double>(n);

  ModelParams g = ModelParams::zeros_like(params);
  std::vector<Eigen::Index> lens(n);
  std::vector<MatrixXd> dzn(n);

  // heads -> dZ'
  for (std::size_t b = 0; b < n; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    const Eigen::Index L = lens[b] = valid_length(batch.mask[b]);
    const MatrixXd relu = trace.z_norm[b].cwiseMax(0.0);
    const Eigen::ArrayXXd active = (trace.z_norm[b].array() > 0.0).cast<double>();
    dzn[b] = MatrixXd::Zero(T, h);
    if (task == Task::kSentence) {
      const double d1 = logit_grad(trace.sentence_prob(bi), batch.y_s(bi)) * inv_n;
      Eigen::RowVector2d gl(-d1, d1);
      const MatrixXd relu_t = relu.transpose();
      const Eigen::Map<const RowVectorXd> flat(relu_t.data(), T * h);
      g.w_s += flat.transpose() * gl;
      g.b_s += gl;
      const RowVectorXd dflat = gl * params.w_s.transpose();
      // inverse of the row-major flatten
      const Eigen::Map<const MatrixXd> dflat_t(dflat.data(), h, T);
      dzn[b] = dflat_t.transpose();
    } else {
      MatrixXd gl = MatrixXd::Zero(T, 2);
      for (Eigen::Index i = 0; i < L; ++i) {
        const double d1 = logit_grad(trace.token_prob(bi, i), batch.y_o(bi, i)) * inv_n;
        gl(i, 0) = -d1;
        gl(i, 1) = d1;
      }
      g.w_o += relu.transpose() * gl;
      g.b_o += gl.colwise().sum();
      dzn[b] = gl * params.w_o.transpose();
    }
    dzn[b] = (dzn[b].array() * active).matrix();
    if (L < T) dzn[b].bottomRows(T - L).setZero();
  }

  // batch norm
  RowVectorXd sum_dxh = RowVectorXd::Zero(h);
  RowVectorXd sum_dxh_xh = RowVectorXd::Zero(h);
  std::vector<MatrixXd> dxh(n);
  for (std::size_t b = 0; b < n; ++b) {
    const Eigen::Index L = lens[b];
    g.bn_gamma += (dzn[b].topRows(L).array() * trace.z_hat[b].topRows(L).array())
                      .matrix()
                      .colwise()
                      .sum();
    g.bn_beta += dzn[b].topRows(L).colwise().sum();
    dxh[b] = (dzn[b].array().rowwise() * params.bn_gamma.row(0).array()).matrix();
    sum_dxh += dxh[b].topRows(L).colwise().sum();
    sum_dxh_xh +=
        (dxh[b].topRows(L).array() * trace.z_hat[b].topRows(L).array()).matrix().colwise().sum();
  }

  for (std::size_t b = 0; b < n; ++b) {
    const Eigen::Index L = lens[b];
    if (L == 0) continue;
    MatrixXd dz;
    if (trace.mode == Mode::kTrain) {
      const double N = trace.bn_count;
      const Eigen::ArrayXXd a = dxh[b].topRows(L).array() * N;
      const Eigen::ArrayXXd c =
          (a.rowwise() - sum_dxh.array()) -
          trace.z_hat[b].topRows(L).array().rowwise() * sum_dxh_xh.array();
      dz = ((c.rowwise() * trace.bn_inv_std.array()) / N).matrix();
    } else {
      dz = (dxh[b].topRows(L).array().rowwise() * trace.bn_inv_std.array()).matrix();
    }

    // output projection of the attention block
    const MatrixXd concat = trace.concat[b].topRows(L);
    g.w_attn += concat.transpose() * dz;
    g.b_attn += dz.colwise().sum();
    const MatrixXd dconcat = dz * params.w_attn.transpose();

    MatrixXd dq = MatrixXd::Zero(L, h), dk = MatrixXd::Zero(L, h), dv = MatrixXd::Zero(L, h);
    for (int hd = 0; hd < heads; ++hd) {
      const Eigen::Index c0 = hd * dh;
      const MatrixXd a = trace.attention[b][static_cast<std::size_t>(hd)].topLeftCorner(L, L);
      const MatrixXd dho = dconcat.block(0, c0, L, dh);
      const MatrixXd vh = trace.v[b].block(0, c0, L, dh);
      dv.block(0, c0, L, dh) = a.transpose() * dho;
      const MatrixXd da = dho * vh.transpose();
      const Eigen::VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
      const MatrixXd ds = (a.array() * (da.colwise() - row_dot).array()).matrix() * scale;
      dq.block(0, c0, L, dh) = ds * trace.k[b].block(0, c0, L, dh);
      dk.block(0, c0, L, dh) = ds.transpose() * trace.q[b].block(0, c0, L, dh);
    }

    const MatrixXd up = trace.u_pos[b].topRows(L);
    g.w_q += up.transpose() * dq;
    g.w_k += up.transpose() * dk;
    g.w_v += up.transpose() * dv;
    g.b_q += dq.colwise().sum();
    g.b_k += dk.colwise().sum();
    g.b_v += dv.colwise().sum();
    const MatrixXd dup = dq * params.w_q.transpose() + dk * params.w_k.transpose() +
                         dv * params.w_v.transpose();
    g.pos.topRows(L) += dup;
    g.w_h += batch.x[b].topRows(L).transpose() * dup;
    g.b_h += dup.colwise().sum();
  }

  ModelParams::visit_trainable(g, [](std::string_view name, const MatrixXd& m) {
    if (!m.allFinite()) throw TrainingError("non-finite gradient in " + std::string(name));
  });
  return g;
}

void update_running_stats(ModelParams& params, const ForwardTrace& trace,
                          const ModelConfig& config) {
  if (trace.mode != Mode::kTrain || trace.bn_count <= 0.0) return;
  const double m = config.bn_momentum;
  const double n = trace.bn_count;
  const RowVectorXd unbiased = n > 1.0 ? RowVectorXd(trace.bn_var * (n / (n - 1.0))) : trace.bn_var;
  params.bn_running_mean = (1.0 - m) * params.bn_running_mean + m * trace.bn_mean;
  params.bn_running_var = (1.0 - m) * params.bn_running_var + m * unbiased;
}

GradientCheck finite_difference_check(const ModelParams& params, const TrainingBatch& batch,
                                      const ModelConfig& config, Task task,
                                      std::size_t n_coords, std::uint64_t seed, double step) {
  const ForwardTrace tr = forward(params, batch, config, Mode::kTrain);
  const ModelParams grads = backward(tr, batch, params, config, task);

  struct Coord {
    std::size_t tensor;
    Eigen::Index row, col;
  };
  std::vector<std::string> names;
  std::vector<Eigen::Index> sizes;
  ModelParams::visit_trainable(params, [&](std::string_view name, const MatrixXd& m) {
    names.emplace_back(name);
    sizes.push_back(m.size());
  });
  const Eigen::Index total = std::accumulate(sizes.begin(), sizes.end(), Eigen::Index{0});

  Rng rng(seed);
  std::vector<Coord> coords;
  auto locate = [&](std::size_t t, Eigen::Index flat) {
    Eigen::Index rows = 0;
    ModelParams::visit_trainable(params, [&, i = std::size_t{0}](std::string_view, const MatrixXd& m) mutable {
      if (i++ == t) rows = m.rows();
    });
    return Coord{t, flat % rows, flat / rows};
  };
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    const Eigen::Index k = std::min<Eigen::Index>(sizes[t], 4);
    for (Eigen::Index i = 0; i < k; ++i) {
      coords.push_back(locate(t, static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(sizes[t])))));
    }
  }
  while (coords.size() < n_coords) {
    auto flat = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(total)));
    std::size_t t = 0;
    while (flat >= sizes[t]) flat -= sizes[t++];
    coords.push_back(locate(t, flat));
  }

  auto tensor_of = [](ModelParams& p, std::size_t t) -> MatrixXd& {
    MatrixXd* out = nullptr;
    ModelParams::visit_trainable(p, [&, i = std::size_t{0}](std::string_view, MatrixXd& m) mutable {
      if (i++ == t) out = &m;
    });
    return *out;
  };

  GradientCheck result;
  ModelParams probe = params;
  ModelParams g_copy = grads;
  for (const Coord& c : coords) {
    MatrixXd& w = tensor_of(probe, c.tensor);
    const double orig = w(c.row, c.col);
    w(c.row, c.col) = orig + step;
    const double lp = loss(forward(probe, batch, config, Mode::kTrain), batch, task);
    w(c.row, c.col) = orig - step;
    const double lm = loss(forward(probe, batch, config, Mode::kTrain), batch, task);
    w(c.row, c.col) = orig;
    const double fd = (lp - lm) / (2.0 * step);
    const double an = tensor_of(g_copy, c.tensor)(c.row, c.col);
    const double rel = std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-6});
    if (rel > result.max_rel_error || result.coordinates == 0) {
      result.max_rel_error = rel;
      result.worst_tensor = names[c.tensor];
      result.worst_row = c.row;
      result.worst_col = c.col;
    }
    ++result.coordinates;
  }
  return result;
}

AdamOptimizer::AdamOptimizer(const ModelParams& like, double lr, double beta1, double beta2,
                             double eps)
    : m_(ModelParams::zeros_like(like)),
      v_(ModelParams::zeros_like(like)),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps) {}

void AdamOptimizer::step(ModelParams& params, const ModelParams& grads) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  // walk the four structs in lockstep by collecting pointers first
  std::vector<MatrixXd*> p, m, v;
  std::vector<const MatrixXd*> g;
  ModelParams::visit_trainable(params, [&](std::string_view, MatrixXd& x) { p.push_back(&x); });
  ModelParams::visit_trainable(m_, [&](std::string_view, MatrixXd& x) { m.push_back(&x); });
  ModelParams::visit_trainable(v_, [&](std::string_view, MatrixXd& x) { v.push_back(&x); });
  ModelParams::visit_trainable(grads, [&](std::string_view, const MatrixXd& x) { g.push_back(&x); });
  for (std::size_t i = 0; i < p.size(); ++i) {
    *m[i] = beta1_ * *m[i] + (1.0 - beta1_) * *g[i];
    *v[i] = beta2_ * *v[i] + (1.0 - beta2_) * g[i]->cwiseProduct(*g[i]);
    p[i]->array() -= lr_ * (m[i]->array() / c1) / ((v[i]->array() / c2).sqrt() + eps_);
  }
}

bool EarlyStopper::update(double metric) {
  ++epoch_;
  if (best_epoch_ < 0 || metric > best_) {
    best_ = metric;
    best_epoch_ = epoch_ - 1;
    since_best_ = 0;
    improved_ = true;
  } else {
    ++since_best_;
    improved_ = false;
  }
  return since_best_ >= patience_;
}

Prediction predict(const ModelParams& params, const ModelConfig& config, const Sentence& s) {
  const Sentence* ptr = &s;
  const TrainingBatch batch = make_batch(std::span<const Sentence* const>(&ptr, 1), config);
  const ForwardTrace tr = forward(params, batch, config, Mode::kEval);
  Prediction out;
  out.sentence_prob = tr.sentence_prob(0);
  out.word_probs.resize(static_cast<std::size_t>(s.length()));
  for (Eigen::Index i = 0; i < s.length(); ++i) {
    out.word_probs[static_cast<std::size_t>(i)] = tr.token_prob(0, i);
  }
  return out;
}

std::vector<Prediction> predict(const ModelParams& params, const ModelConfig& config,
                                const std::vector<Sentence>& sentences) {
  std::vector<Prediction> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(predict(params, config, s));
  return out;
}

ScoredItems scored_items(const std::vector<Prediction>& predictions,
                         const std::vector<Sentence>& sentences, Task task) {
  if (predictions.size() != sentences.size()) {
    throw StructuralError("prediction count disagrees with sentence count");
  }
  ScoredItems out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (task == Task::kSentence) {
      out.scores.push_back(predictions[i].sentence_prob);
      out.labels.push_back(sentences[i].positive());
    } else {
      const auto& wp = predictions[i].word_probs;
      for (std::size_t w = 0; w < wp.size(); ++w) {
        out.scores.push_back(wp[w]);
        out.labels.push_back(w < sentences[i].answer.size() ? sentences[i].answer[w] : 0);
      }
    }
  }
  return out;
}

TrainResult train(const std::vector<Sentence>& train_set, const std::vector<Sentence>& validation,
                  const ModelConfig& config, Task task) {
  config.validate();
  if (train_set.empty()) throw DataError("empty training split");
  if (validation.empty()) throw DataError("empty validation split");

  TrainResult result{ModelParams::init(config), {}};
  if (config.max_epochs == 0) return result;

  ModelParams params = result.params;
  AdamOptimizer adam(params, config.lr);
  EarlyStopper stopper(config.patience);
  std::vector<std::size_t> order(train_set.size());
  std::vector<const Sentence*> chunk;
  chunk.reserve(static_cast<std::size_t>(config.batch_size));

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(epoch) + 1));
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      chunk.clear();
      for (std::size_t i = start; i < stop; ++i) chunk.push_back(&train_set[order[i]]);
      const TrainingBatch batch = make_batch(chunk, config);
      const ForwardTrace tr = forward(params, batch, config, Mode::kTrain);
      loss_sum += loss(tr, batch, task);
      ++batches;
      const ModelParams grads = backward(tr, batch, params, config, task);
      adam.step(params, grads);
      update_running_stats(params, tr, config);
    }
    result.history.train_loss.push_back(loss_sum / static_cast<double>(batches));

    const ScoredItems items = scored_items(predict(params, config, validation), validation, task);
    const double val_auc = auc(items.scores, items.labels);
    result.history.validation_auc.push_back(val_auc);
    const bool stop = stopper.update(val_auc);
    if (stopper.improved()) result.params = params;
    if (stop) {
      result.history.stopped_early = true;
      break;
    }
  }
  result.history.best_epoch = stopper.best_epoch();
  return result;
}

std::vector<ModelConfig> expand_grid(const ModelConfig& base, const HyperGrid& grid) {
  auto hidden = grid.hidden;
  auto heads = grid.heads;
  auto lr = grid.lr;
  std::sort(hidden.begin(), hidden.end());
  std::sort(heads.begin(), heads.end());
  std::sort(lr.begin(), lr.end());
  std::vector<ModelConfig> out;
  for (int h : hidden) {
    for (int nh : heads) {
      for (double r : lr) {
        ModelConfig c = base;
        c.hidden = h;
        c.heads = nh;
        c.lr = r;
        c.validate();
        out.push_back(c);
      }
    }
  }
  if (out.empty()) throw ConfigError("hyperparameter grid is empty");
  return out;
}

GridResult grid_search(const ModelConfig& base, const HyperGrid& grid,
                       const std::vector<std::string>& schemes, const GridScorer& score) {
  if (schemes.empty()) throw ConfigError("grid search needs at least one split scheme");
  GridResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (const ModelConfig& c : expand_grid(base, grid)) {
    GridEntry e{c, {}, 0.0};
    for (const auto& s : schemes) e.scheme_scores.push_back(score(c, s));
    e.mean_score = std::accumulate(e.scheme_scores.begin(), e.scheme_scores.end(), 0.0) /
                   static_cast<double>(e.scheme_scores.size());
    if (result.entries.empty() || e.mean_score > best) {
      best = e.mean_score;
      result.best = c;
    }
    result.entries.push_back(std::move(e));
  }
  return result;
}

}  // namespace eegrc::uercm
