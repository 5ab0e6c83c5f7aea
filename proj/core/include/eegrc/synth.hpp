#pragma once

// Synthetic reading sessions with known ERP effects.
//
// Every word adds a template of four Gaussian bumps (N100, P200, N400, P600),
// one per analysis window with sigma = window length / 4. Bump heights are
// solved jointly so that the template's mean over each window equals the
// requested component amplitude. Templates are scaled per region and per
// participant, then summed with pink noise, per-channel offsets and a
// common-mode drift that mastoid re-referencing cancels.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "eegrc/types.hpp"

namespace eegrc {

/// Window-mean amplitudes (µV) in the N100/P200/N400/P600 windows.
struct ComponentAmplitudes {
  double n100 = 0.0;
  double p200 = 0.0;
  double n400 = 0.0;
  double p600 = 0.0;
};

/// Change relative to ordinary words. The N100-P200 delta is split evenly:
/// N100 moves down by half, P200 up by half.
struct WordEffect {
  double n100_p200 = 0.0;
  double n400 = 0.0;
  double p600 = 0.0;
};

struct EffectSpec {
  ComponentAmplitudes ordinary{-2.0, 3.0, -2.5, 2.0};
  WordEffect semantic{0.0, 1.0, -1.0};
  WordEffect answer{3.0, 2.0, 2.0};
  // gain per region in kRegionNames order; mastoids always get 0
  std::array<double, 7> roi_gain{0.6, 0.9, 1.0, 1.0, 0.9, 0.9, 0.5};
  double noise_sigma_uv = 5.0;
  double artifact_rate = 0.05;
  double artifact_amplitude_uv = 200.0;
  double offset_uv = 20.0;  // per-channel constant, uniform in [-offset, offset]
  double drift_uv = 10.0;   // common-mode slow sinusoid on every channel

  static EffectSpec defaults() { return {}; }
  /// No template, noise, artifacts, offsets or drift.
  static EffectSpec silent();
  /// Word-type effects multiplied by k; the ordinary template is unchanged.
  EffectSpec with_effects_scaled(double k) const;

  ComponentAmplitudes amplitudes(WordType t) const;
};

inline constexpr double kSynthRateHz = 1000.0;
inline constexpr double kQuestionPhaseMs = 1000.0;
inline constexpr double kFixationMs = 1000.0;
inline constexpr double kWordSoaMs = 1000.0;
inline constexpr double kTrialTailMs = 500.0;
inline constexpr double kSessionPadMs = 2000.0;
/// Bump centres (ms) inside the N100/P200/N400/P600 windows.
inline constexpr std::array<double, 4> kBumpCentresMs{90.0, 220.0, 420.0, 635.0};

/// Peak heights of the four bumps whose window means equal `amps`.
std::array<double, 4> bump_peaks(const ComponentAmplitudes& amps);
/// Template value (gain 1) at `t_ms` after word onset.
double template_value(const std::array<double, 4>& peaks, double t_ms);

struct CandidateSentence {
  Relevance relevance = Relevance::kIrrelevant;
  std::vector<WordType> words;
};

struct Question {
  int question_id = 0;
  std::array<CandidateSentence, 3> candidates;  // perfectly relevant, relevant, irrelevant
};

/// Sentence lengths are uniform in [wps-2, wps+2] (at least 1) whatever the
/// relevance. Perfectly relevant sentences carry 1-2 answer words and one
/// semantic-related word, relevant ones 1-2 semantic-related words.
std::vector<Question> make_question_bank(int n_questions, int words_per_sentence,
                                         std::uint64_t seed);

struct EpochTruth {
  int trial_id = 0;
  int word_index = 0;
  int question_id = 0;
  WordType word_type = WordType::kOrdinary;
  Relevance relevance = Relevance::kIrrelevant;
  ComponentAmplitudes injected;  // after participant gain, before region gain
  bool artifact = false;
};

struct SyntheticSession {
  SessionRecording recording;
  std::vector<EpochTruth> truth;
};

struct SessionSpec {
  int n_trials = 150;
  int words_per_sentence = 5;
  EffectSpec effects;
  std::uint64_t seed = 0;
  std::string participant_id = "P01";
  double gain = 1.0;
  std::uint64_t bank_seed = 0;  // question bank shared across a cohort
};

/// Each participant reads every candidate of the first ceil(n_trials/3)
/// questions of the bank (truncated to n_trials), in shuffled order.
SyntheticSession generate_session(const SessionSpec& spec);

struct CohortSpec {
  int n_participants = 21;
  int n_trials = 150;
  int words_per_sentence = 5;
  EffectSpec effects;
  double gain_jitter = 0.1;  // gain = 1 + jitter * N(0,1), clipped to [0.2, 3]
  std::uint64_t seed = 0;
};

std::string participant_name(int index);  // "P01", "P02", ...
/// Session spec of cohort member `index` (seeds and gain derived from the cohort seed).
SessionSpec cohort_member(const CohortSpec& spec, int index);
/// Generates members one at a time so callers can stream them to disk.
void generate_cohort(const CohortSpec& spec, const std::function<void(SyntheticSession&&)>& sink);
std::vector<SyntheticSession> generate_cohort(const CohortSpec& spec);

void write_truth(const std::vector<EpochTruth>& truth, const std::string& participant_id,
                 const std::string& path);

}  // namespace eegrc
