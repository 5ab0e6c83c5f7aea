#include "eegrc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <Eigen/Dense>

#include "eegrc/error.hpp"
#include "eegrc/features.hpp"
#include "eegrc/montage.hpp"
#include "eegrc/random.hpp"

namespace eegrc {

namespace {

constexpr std::array<double, 5> kWindowEdgesMs{60.0, 120.0, 320.0, 520.0, 750.0};
constexpr double kArtifactSigmaMs = 12.0;
constexpr double kDriftHz = 0.05;

double bump_sigma(std::size_t b) { return (kWindowEdgesMs[b + 1] - kWindowEdgesMs[b]) / 4.0; }

// Paul Kellet's refined pink filter: white noise through six one-pole
// sections plus a direct path, roughly -3 dB/octave above a few Hz.
class PinkNoise {
 public:
  explicit PinkNoise(std::uint64_t seed) : rng_(seed) {
    for (int i = 0; i < 8192; ++i) raw();
  }
  double next() { return raw() / kStd; }

 private:
  static constexpr std::array<double, 6> kPole{0.99886, 0.99332, 0.96900, 0.86650, 0.55000, -0.7616};
  static constexpr std::array<double, 6> kGain{0.0555179, 0.0750759, 0.1538520,
                                               0.3104856, 0.5329522, -0.0168980};
  static constexpr double kDirect = 0.5362;
  static constexpr double kDelayed = 0.115926;
  // stationary std of raw() for unit white noise, from the impulse response
  static inline const double kStd = [] {
    double v = kDirect * kDirect + kDelayed * kDelayed;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) v += kGain[i] * kGain[j] / (1.0 - kPole[i] * kPole[j]);
      v += 2.0 * kDirect * kGain[i] + 2.0 * kDelayed * kGain[i] * kPole[i];
    }
    return std::sqrt(v);
  }();

  double raw() {
    const double w = rng_.normal();
    double sum = kDirect * w + kDelayed * prev_;
    for (std::size_t i = 0; i < 6; ++i) {
      state_[i] = kPole[i] * state_[i] + kGain[i] * w;
      sum += state_[i];
    }
    prev_ = w;
    return sum;
  }

  Rng rng_;
  std::array<double, 6> state_{};
  double prev_ = 0.0;
};

}  // namespace

EffectSpec EffectSpec::silent() {
  EffectSpec s;
  s.ordinary = {};
  s.semantic = {};
  s.answer = {};
  s.noise_sigma_uv = 0.0;
  s.artifact_rate = 0.0;
  s.offset_uv = 0.0;
  s.drift_uv = 0.0;
  return s;
}

EffectSpec EffectSpec::with_effects_scaled(double k) const {
  EffectSpec s = *this;
  for (WordEffect* e : {&s.semantic, &s.answer}) {
    e->n100_p200 *= k;
    e->n400 *= k;
    e->p600 *= k;
  }
  return s;
}

ComponentAmplitudes EffectSpec::amplitudes(WordType t) const {
  ComponentAmplitudes a = ordinary;
  if (t == WordType::kOrdinary) return a;
  const WordEffect& e = t == WordType::kAnswer ? answer : semantic;
  a.n100 -= 0.5 * e.n100_p200;
  a.p200 += 0.5 * e.n100_p200;
  a.n400 += e.n400;
  a.p600 += e.p600;
  return a;
}

std::array<double, 4> bump_peaks(const ComponentAmplitudes& amps) {
  // m(w, b): mean of a unit-height bump b over window w
  Eigen::Matrix4d m;
  for (std::size_t w = 0; w < 4; ++w) {
    const double lo = kWindowEdgesMs[w];
    const double hi = kWindowEdgesMs[w + 1];
    for (std::size_t b = 0; b < 4; ++b) {
      const double s = bump_sigma(b) * std::numbers::sqrt2;
      const double c = kBumpCentresMs[b];
      m(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(b)) =
          bump_sigma(b) * std::sqrt(std::numbers::pi / 2.0) *
          (std::erf((hi - c) / s) - std::erf((lo - c) / s)) / (hi - lo);
    }
  }
  const Eigen::Vector4d target(amps.n100, amps.p200, amps.n400, amps.p600);
  const Eigen::Vector4d p = m.partialPivLu().solve(target);
  return {p(0), p(1), p(2), p(3)};
}

double template_value(const std::array<double, 4>& peaks, double t_ms) {
  double v = 0.0;
  for (std::size_t b = 0; b < 4; ++b) {
    const double z = (t_ms - kBumpCentresMs[b]) / bump_sigma(b);
    if (std::abs(z) < 8.0) v += peaks[b] * std::exp(-0.5 * z * z);
  }
  return v;
}

std::vector<Question> make_question_bank(int n_questions, int words_per_sentence,
                                         std::uint64_t seed) {
  if (n_questions < 1) throw ConfigError("question bank needs at least one question");
  if (words_per_sentence < 1) throw ConfigError("words per sentence must be positive");
  Rng rng(seed);
  std::vector<Question> bank;
  const Relevance order[3] = {Relevance::kPerfectlyRelevant, Relevance::kRelevant,
                              Relevance::kIrrelevant};
  for (int q = 0; q < n_questions; ++q) {
    Question question;
    question.question_id = q + 1;
    for (std::size_t c = 0; c < 3; ++c) {
      CandidateSentence& s = question.candidates[c];
      s.relevance = order[c];
      const int len = std::max(1, words_per_sentence - 2 + static_cast<int>(rng.below(5)));
      s.words.assign(static_cast<std::size_t>(len), WordType::kOrdinary);
      std::vector<std::size_t> slots(static_cast<std::size_t>(len));
      for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
      rng.shuffle(std::span<std::size_t>(slots));
      std::size_t next = 0;
      auto place = [&](WordType t, std::size_t count) {
        for (std::size_t k = 0; k < count && next < slots.size(); ++k) s.words[slots[next++]] = t;
      };
      if (s.relevance == Relevance::kPerfectlyRelevant) {
        place(WordType::kAnswer, 1 + rng.below(2));
        place(WordType::kSemanticRelated, 1);
      } else if (s.relevance == Relevance::kRelevant) {
        place(WordType::kSemanticRelated, 1 + rng.below(2));
      }
    }
    bank.push_back(std::move(question));
  }
  return bank;
}

SyntheticSession generate_session(const SessionSpec& spec) {
  if (spec.n_trials < 1) throw ConfigError("a session needs at least one trial");
  const EffectSpec& fx = spec.effects;
  const int n_questions = (spec.n_trials + 2) / 3;
  const auto bank = make_question_bank(n_questions, spec.words_per_sentence, spec.bank_seed);

  struct Slot {
    const Question* question;
    std::size_t candidate;
  };
  std::vector<Slot> slots;
  for (const auto& q : bank) {
    for (std::size_t c = 0; c < 3 && slots.size() < static_cast<std::size_t>(spec.n_trials); ++c) {
      slots.push_back({&q, c});
    }
  }
  Rng order_rng(derive_seed(spec.seed, 1));
  order_rng.shuffle(std::span<Slot>(slots));

  const double rate = kSynthRateHz;
  auto to_sample = [rate](double ms) { return static_cast<Eigen::Index>(std::llround(ms * rate / 1000.0)); };

  // layout
  double total_ms = kSessionPadMs;
  for (const auto& s : slots) {
    total_ms += kQuestionPhaseMs + kFixationMs +
                static_cast<double>(s.question->candidates[s.candidate].words.size()) * kWordSoaMs +
                kTrialTailMs;
  }
  total_ms += kSessionPadMs;

  SyntheticSession out;
  SessionRecording& rec = out.recording;
  rec.rate_hz = rate;
  rec.participant_id = spec.participant_id;
  rec.channel_names = default_montage();
  const auto n_ch = static_cast<Eigen::Index>(rec.channel_names.size());
  const Eigen::Index n = to_sample(total_ms);
  rec.data = Eigen::MatrixXd::Zero(n_ch, n);

  const RoiMap& rois = RoiMap::defaults();
  Eigen::VectorXd channel_gain = Eigen::VectorXd::Zero(n_ch);
  std::vector<Eigen::Index> prefrontal;
  for (Eigen::Index c = 0; c < n_ch; ++c) {
    const std::string region = rois.region_of(rec.channel_names[static_cast<std::size_t>(c)]);
    for (std::size_t r = 0; r < std::size(kRegionNames); ++r) {
      if (region == kRegionNames[r]) channel_gain(c) = fx.roi_gain[r];
    }
    if (region == "prefrontal") prefrontal.push_back(c);
  }

  Rng artifact_rng(derive_seed(spec.seed, 2));
  const Eigen::Index tmpl_len = to_sample(kWordSoaMs);
  double t = kSessionPadMs;
  for (std::size_t trial = 0; trial < slots.size(); ++trial) {
    const int trial_id = static_cast<int>(trial) + 1;
    const Question& q = *slots[trial].question;
    const CandidateSentence& cand = q.candidates[slots[trial].candidate];
    rec.trial_questions.emplace_back(trial_id, q.question_id);
    rec.triggers.push_back({to_sample(t), EventCode::kQuestionOnset, trial_id, std::nullopt});
    rec.triggers.push_back({to_sample(t + kQuestionPhaseMs), EventCode::kFixation, trial_id, std::nullopt});
    double onset_ms = t + kQuestionPhaseMs + kFixationMs;
    for (std::size_t w = 0; w < cand.words.size(); ++w, onset_ms += kWordSoaMs) {
      const int word_index = static_cast<int>(w);
      const WordType type = cand.words[w];
      const Eigen::Index onset = to_sample(onset_ms);
      rec.triggers.push_back({onset, EventCode::kWordOnset, trial_id, word_index});
      WordLabel label;
      label.word_type = type;
      label.sentence_relevance = cand.relevance;
      label.trial_id = trial_id;
      label.word_index = word_index;
      label.participant_id = spec.participant_id;
      label.question_id = q.question_id;
      rec.labels.push_back(label);

      ComponentAmplitudes amps = fx.amplitudes(type);
      for (double* a : {&amps.n100, &amps.p200, &amps.n400, &amps.p600}) *a *= spec.gain;
      const auto peaks = bump_peaks(amps);
      Eigen::RowVectorXd tmpl(tmpl_len);
      for (Eigen::Index i = 0; i < tmpl_len; ++i) {
        tmpl(i) = template_value(peaks, static_cast<double>(i) * 1000.0 / rate);
      }
      if (tmpl.cwiseAbs().maxCoeff() > 0.0) {
        rec.data.middleCols(onset, tmpl_len) += channel_gain * tmpl;
      }

      EpochTruth truth{trial_id, word_index, q.question_id, type, cand.relevance, amps, false};
      if (fx.artifact_rate > 0.0 && artifact_rng.bernoulli(fx.artifact_rate)) {
        truth.artifact = true;
        const double at_ms = artifact_rng.uniform(-100.0, 600.0);
        const Eigen::Index half = to_sample(5.0 * kArtifactSigmaMs);
        const Eigen::Index centre = onset + to_sample(at_ms);
        for (Eigen::Index s = centre - half; s <= centre + half; ++s) {
          const double z = static_cast<double>(s - centre) * 1000.0 / rate / kArtifactSigmaMs;
          const double v = fx.artifact_amplitude_uv * std::exp(-0.5 * z * z);
          for (Eigen::Index c : prefrontal) rec.data(c, s) += v;
        }
      } else if (fx.artifact_rate > 0.0) {
        // keep the draw count per word fixed so later words do not shift
        artifact_rng.uniform();
      }
      out.truth.push_back(truth);
    }
    t = onset_ms + kTrialTailMs;
  }

  if (fx.noise_sigma_uv > 0.0) {
    for (Eigen::Index c = 0; c < n_ch; ++c) {
      PinkNoise pink(derive_seed(spec.seed, 100 + static_cast<std::uint64_t>(c)));
      for (Eigen::Index s = 0; s < n; ++s) rec.data(c, s) += fx.noise_sigma_uv * pink.next();
    }
  }
  Rng offset_rng(derive_seed(spec.seed, 3));
  if (fx.offset_uv > 0.0) {
    for (Eigen::Index c = 0; c < n_ch; ++c) {
      rec.data.row(c).array() += offset_rng.uniform(-fx.offset_uv, fx.offset_uv);
    }
  }
  if (fx.drift_uv > 0.0) {
    const double phase = offset_rng.uniform(0.0, 2.0 * std::numbers::pi);
    Eigen::RowVectorXd drift(n);
    for (Eigen::Index s = 0; s < n; ++s) {
      drift(s) = fx.drift_uv *
                 std::sin(2.0 * std::numbers::pi * kDriftHz * static_cast<double>(s) / rate + phase);
    }
    rec.data.rowwise() += drift;
  }
  return out;
}

std::string participant_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%02d", index + 1);
  return buf;
}

SessionSpec cohort_member(const CohortSpec& spec, int index) {
  if (index < 0 || index >= spec.n_participants) throw ConfigError("cohort index out of range");
  SessionSpec s;
  s.n_trials = spec.n_trials;
  s.words_per_sentence = spec.words_per_sentence;
  s.effects = spec.effects;
  s.seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index) + 1);
  s.bank_seed = derive_seed(spec.seed, 0xb4a4c);
  s.participant_id = participant_name(index);
  Rng gain_rng(derive_seed(s.seed, 4));
  s.gain = std::clamp(1.0 + spec.gain_jitter * gain_rng.normal(), 0.2, 3.0);
  return s;
}

void generate_cohort(const CohortSpec& spec, const std::function<void(SyntheticSession&&)>& sink) {
  if (spec.n_participants < 2) throw ConfigError("a cohort needs at least 2 participants");
  for (int i = 0; i < spec.n_participants; ++i) sink(generate_session(cohort_member(spec, i)));
}

std::vector<SyntheticSession> generate_cohort(const CohortSpec& spec) {
  std::vector<SyntheticSession> out;
  generate_cohort(spec, [&](SyntheticSession&& s) { out.push_back(std::move(s)); });
  return out;
}

void write_truth(const std::vector<EpochTruth>& truth, const std::string& participant_id,
                 const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  f << "participant_id,trial_id,word_index,question_id,word_type,sentence_relevance,artifact,"
       "n100,p200,n400,p600\n";
  for (const auto& e : truth) {
    f << participant_id << ',' << e.trial_id << ',' << e.word_index << ',' << e.question_id << ','
      << to_string(e.word_type) << ',' << to_string(e.relevance) << ',' << (e.artifact ? 1 : 0)
      << ',' << format_double(e.injected.n100) << ',' << format_double(e.injected.p200) << ','
      << format_double(e.injected.n400) << ',' << format_double(e.injected.p600) << '\n';
  }
}

}  // namespace eegrc
