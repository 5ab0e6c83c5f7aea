#include <gtest/gtest.h>

#include "eegrc/error.hpp"
#include "eegrc/synth.hpp"

using namespace eegrc;

namespace {

constexpr double kEdges[5] = {60.0, 120.0, 320.0, 520.0, 750.0};

// midpoint rule, 0.01 ms steps
double window_mean(const std::array<double, 4>& peaks, double lo, double hi) {
  const int n = static_cast<int>((hi - lo) * 100.0);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += template_value(peaks, lo + (i + 0.5) * 0.01);
  return sum / n;
}

SessionSpec small_spec(std::uint64_t seed) {
  SessionSpec s;
  s.n_trials = 6;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Template, WindowMeansMatchRequest) {
  for (const ComponentAmplitudes a : {ComponentAmplitudes{-2.0, 3.0, -2.5, 2.0}, ComponentAmplitudes{-3.5, 4.5, 0.5, 4.0},
                                      ComponentAmplitudes{1.0, 0.0, 0.0, 0.0}}) {
    const auto peaks = bump_peaks(a);
    const double want[4] = {a.n100, a.p200, a.n400, a.p600};
    for (int w = 0; w < 4; ++w) EXPECT_NEAR(window_mean(peaks, kEdges[w], kEdges[w + 1]), want[w], 1e-6);
  }
}

TEST(Template, ZeroAmplitudesGiveZero) {
  const auto peaks = bump_peaks({});
  for (double p : peaks) EXPECT_EQ(p, 0.0);
  EXPECT_EQ(template_value(peaks, 200.0), 0.0);
}

TEST(Effects, AnswerShiftsComponents) {
  const auto fx = EffectSpec::defaults();
  const auto o = fx.amplitudes(WordType::kOrdinary);
  const auto a = fx.amplitudes(WordType::kAnswer);
  EXPECT_DOUBLE_EQ((a.p200 - a.n100) - (o.p200 - o.n100), fx.answer.n100_p200);
  EXPECT_DOUBLE_EQ(a.p600 - o.p600, fx.answer.p600);
  const auto scaled = fx.with_effects_scaled(2.0);
  EXPECT_DOUBLE_EQ(scaled.answer.n400, 2.0 * fx.answer.n400);
  EXPECT_EQ(scaled.ordinary.p200, fx.ordinary.p200);
}

TEST(QuestionBank, CandidateStructure) {
  const auto bank = make_question_bank(200, 5, 1);
  ASSERT_EQ(bank.size(), 200u);
  for (const auto& q : bank) {
    for (std::size_t c = 0; c < 3; ++c) {
      const auto& w = q.candidates[c].words;
      EXPECT_GE(w.size(), 3u);
      EXPECT_LE(w.size(), 7u);
      const auto n_ans = std::count(w.begin(), w.end(), WordType::kAnswer);
      const auto n_sem = std::count(w.begin(), w.end(), WordType::kSemanticRelated);
      EXPECT_EQ(q.candidates[c].relevance, static_cast<Relevance>(c));
      if (c == 0) {
        EXPECT_GE(n_ans, 1);
        EXPECT_LE(n_ans, 2);
        EXPECT_EQ(n_sem, 1);
      } else if (c == 1) {
        EXPECT_EQ(n_ans, 0);
        EXPECT_GE(n_sem, 1);
        EXPECT_LE(n_sem, 2);
      } else {
        EXPECT_EQ(n_ans + n_sem, 0);
      }
    }
  }
  EXPECT_THROW(make_question_bank(0, 5, 1), ConfigError);
}

TEST(Session, DeterministicPerSeed) {
  const auto a = generate_session(small_spec(3));
  const auto b = generate_session(small_spec(3));
  const auto c = generate_session(small_spec(4));
  EXPECT_EQ(a.recording.data, b.recording.data);
  EXPECT_EQ(a.recording.triggers, b.recording.triggers);
  EXPECT_NE(a.recording.data, c.recording.data);
  EXPECT_NO_THROW(a.recording.validate());
  EXPECT_EQ(a.recording.rate_hz, kSynthRateHz);
  EXPECT_EQ(a.truth.size(), a.recording.labels.size());
}

TEST(Session, SilentSpecIsFlat) {
  auto spec = small_spec(5);
  spec.effects = EffectSpec::silent();
  const auto s = generate_session(spec);
  EXPECT_EQ(s.recording.data.cwiseAbs().maxCoeff(), 0.0);
  for (const auto& t : s.truth) EXPECT_FALSE(t.artifact);
}

TEST(Session, TrialsCoverWholeQuestions) {
  auto spec = small_spec(6);
  spec.n_trials = 9;
  const auto s = generate_session(spec);
  std::map<int, int> per_question;
  for (const auto& [trial, q] : s.recording.trial_questions) ++per_question[q];
  EXPECT_EQ(per_question.size(), 3u);
  for (const auto& [q, n] : per_question) EXPECT_EQ(n, 3);
}

TEST(Session, ArtifactRate) {
  SessionSpec spec;
  spec.n_trials = 150;
  spec.seed = 9;
  const auto s = generate_session(spec);
  const double rate = static_cast<double>(std::count_if(s.truth.begin(), s.truth.end(),
                                                        [](const EpochTruth& t) { return t.artifact; })) /
                      static_cast<double>(s.truth.size());
  EXPECT_NEAR(rate, 0.05, 0.025);
}

TEST(Cohort, MembersAndJitter) {
  CohortSpec spec;
  spec.n_participants = 3;
  spec.gain_jitter = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto m = cohort_member(spec, i);
    EXPECT_EQ(m.gain, 1.0);
    EXPECT_EQ(m.participant_id, participant_name(i));
    EXPECT_EQ(m.bank_seed, cohort_member(spec, 0).bank_seed);
  }
  EXPECT_EQ(participant_name(0), "P01");
  EXPECT_EQ(participant_name(20), "P21");
  spec.gain_jitter = 0.3;
  EXPECT_NE(cohort_member(spec, 0).gain, cohort_member(spec, 1).gain);
  EXPECT_NE(cohort_member(spec, 0).seed, cohort_member(spec, 1).seed);
}
