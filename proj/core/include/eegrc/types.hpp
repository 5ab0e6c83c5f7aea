#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eegrc {

/// Library version string, e.g. "0.3.0".
const char* library_version();

enum class WordType { kAnswer, kSemanticRelated, kOrdinary };
enum class Relevance { kPerfectlyRelevant, kRelevant, kIrrelevant };
enum class EventCode { kWordOnset, kFixation, kQuestionOnset };

inline constexpr WordType kAllWordTypes[] = {WordType::kAnswer, WordType::kSemanticRelated,
                                             WordType::kOrdinary};

std::string_view to_string(WordType t);
std::string_view to_string(Relevance r);
std::string_view to_string(EventCode c);
WordType parse_word_type(std::string_view s);
Relevance parse_relevance(std::string_view s);
EventCode parse_event_code(std::string_view s);

struct WordLabel {
  WordType word_type = WordType::kOrdinary;
  Relevance sentence_relevance = Relevance::kIrrelevant;
  int trial_id = 0;
  int word_index = 0;
  std::string participant_id;
  int question_id = 0;  // from trials.csv; equals trial_id when unknown

  friend bool operator==(const WordLabel&, const WordLabel&) = default;
};

struct TriggerEvent {
  std::int64_t sample_index = 0;
  EventCode code = EventCode::kWordOnset;
  int trial_id = 0;
  std::optional<int> word_index;

  friend bool operator==(const TriggerEvent&, const TriggerEvent&) = default;
};

/// Continuous recording of one participant. `data` is channels x samples in µV.
struct SessionRecording {
  Eigen::MatrixXd data;
  double rate_hz = 0.0;
  std::vector<std::string> channel_names;
  std::vector<TriggerEvent> triggers;
  std::string participant_id;
  std::vector<WordLabel> labels;
  // trial_id -> question_id; trials missing here use their own id.
  std::vector<std::pair<int, int>> trial_questions;

  Eigen::Index n_channels() const { return data.rows(); }
  Eigen::Index n_samples() const { return data.cols(); }

  /// Throws DataError if any invariant is violated.
  void validate() const;

  std::optional<Eigen::Index> channel_index(std::string_view name) const;
  const WordLabel* find_label(int trial_id, int word_index) const;
  int question_of(int trial_id) const;
};

/// One stimulus-locked segment. Sample i sits at t0_ms + i * 1000 / rate_hz.
struct EpochMatrix {
  Eigen::MatrixXd data;
  double rate_hz = 0.0;
  double t0_ms = 0.0;
  std::vector<std::string> channel_names;
  WordLabel label;

  Eigen::Index n_channels() const { return data.rows(); }
  Eigen::Index n_samples() const { return data.cols(); }
  double step_ms() const { return 1000.0 / rate_hz; }
  double time_ms(Eigen::Index i) const { return t0_ms + static_cast<double>(i) * step_ms(); }
  double end_ms() const { return time_ms(n_samples()); }

  std::optional<Eigen::Index> channel_index(std::string_view name) const;
};

/// Half-open time interval in milliseconds relative to stimulus onset.
struct TimeSpan {
  double start_ms = 0.0;
  double end_ms = 0.0;

  double length() const { return end_ms - start_ms; }
  friend bool operator==(const TimeSpan&, const TimeSpan&) = default;
};

/// Sample count covering `span` at `rate_hz` (half-open convention).
Eigen::Index samples_for(TimeSpan span, double rate_hz);

/// Index range [first, last) of samples whose time t0 + i * step falls in
/// `span`, clamped to [0, n).
std::pair<Eigen::Index, Eigen::Index> sample_range(double t0_ms, double rate_hz, Eigen::Index n,
                                                   TimeSpan span);
std::pair<Eigen::Index, Eigen::Index> sample_range(const EpochMatrix& e, TimeSpan span);

}  // namespace eegrc
