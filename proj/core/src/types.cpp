#include "eegrc/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eegrc/error.hpp"

namespace eegrc {

const char* library_version() { return EEGRC_VERSION; }

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kData: return "data";
    case ErrorKind::kLeakage: return "leakage";
    case ErrorKind::kMetric: return "metric";
    case ErrorKind::kStructural: return "structural";
    case ErrorKind::kTraining: return "training";
  }
  return "unknown";
}

std::string_view to_string(WordType t) {
  switch (t) {
    case WordType::kAnswer: return "answer";
    case WordType::kSemanticRelated: return "semantic_related";
    case WordType::kOrdinary: return "ordinary";
  }
  return "ordinary";
}

std::string_view to_string(Relevance r) {
  switch (r) {
    case Relevance::kPerfectlyRelevant: return "perfectly_relevant";
    case Relevance::kRelevant: return "relevant";
    case Relevance::kIrrelevant: return "irrelevant";
  }
  return "irrelevant";
}

std::string_view to_string(EventCode c) {
  switch (c) {
    case EventCode::kWordOnset: return "word_onset";
    case EventCode::kFixation: return "fixation";
    case EventCode::kQuestionOnset: return "question_onset";
  }
  return "word_onset";
}

WordType parse_word_type(std::string_view s) {
  for (auto t : kAllWordTypes)
    if (to_string(t) == s) return t;
  throw DataError("unknown word_type '" + std::string(s) + "'");
}

Relevance parse_relevance(std::string_view s) {
  for (auto r : {Relevance::kPerfectlyRelevant, Relevance::kRelevant, Relevance::kIrrelevant})
    if (to_string(r) == s) return r;
  throw DataError("unknown sentence_relevance '" + std::string(s) + "'");
}

EventCode parse_event_code(std::string_view s) {
  for (auto c : {EventCode::kWordOnset, EventCode::kFixation, EventCode::kQuestionOnset})
    if (to_string(c) == s) return c;
  throw DataError("unknown trigger code '" + std::string(s) + "'");
}

void SessionRecording::validate() const {
  if (!(rate_hz > 0.0)) throw DataError("rate_hz must be positive");
  if (static_cast<std::size_t>(data.rows()) != channel_names.size())
    throw DataError("channel count does not match channel_names");
  std::set<std::string> seen;
  for (const auto& name : channel_names)
    if (!seen.insert(name).second) throw DataError("duplicate channel name '" + name + "'");
  if (!data.allFinite()) throw DataError("recording contains non-finite samples");
  for (const auto& t : triggers) {
    if (t.sample_index < 0 || t.sample_index >= data.cols())
      throw DataError("trigger sample index " + std::to_string(t.sample_index) +
                      " outside recording");
    if (t.code == EventCode::kWordOnset && !t.word_index)
      throw DataError("word-onset trigger without word_index (trial " +
                      std::to_string(t.trial_id) + ")");
  }
}

std::optional<Eigen::Index> SessionRecording::channel_index(std::string_view name) const {
  auto it = std::find(channel_names.begin(), channel_names.end(), name);
  if (it == channel_names.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - channel_names.begin());
}

const WordLabel* SessionRecording::find_label(int trial_id, int word_index) const {
  for (const auto& l : labels)
    if (l.trial_id == trial_id && l.word_index == word_index) return &l;
  return nullptr;
}

int SessionRecording::question_of(int trial_id) const {
  for (const auto& [trial, question] : trial_questions)
    if (trial == trial_id) return question;
  return trial_id;
}

std::optional<Eigen::Index> EpochMatrix::channel_index(std::string_view name) const {
  auto it = std::find(channel_names.begin(), channel_names.end(), name);
  if (it == channel_names.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - channel_names.begin());
}

Eigen::Index samples_for(TimeSpan span, double rate_hz) {
  return static_cast<Eigen::Index>(std::llround(span.length() * rate_hz / 1000.0));
}

std::pair<Eigen::Index, Eigen::Index> sample_range(double t0_ms, double rate_hz, Eigen::Index n,
                                                   TimeSpan span) {
  constexpr double kTol = 1e-6;
  const double step = 1000.0 / rate_hz;
  auto first = static_cast<Eigen::Index>(std::ceil((span.start_ms - t0_ms) / step - kTol));
  auto last = static_cast<Eigen::Index>(std::ceil((span.end_ms - t0_ms) / step - kTol));
  first = std::clamp<Eigen::Index>(first, 0, n);
  last = std::clamp<Eigen::Index>(last, first, n);
  return {first, last};
}

std::pair<Eigen::Index, Eigen::Index> sample_range(const EpochMatrix& e, TimeSpan span) {
  return sample_range(e.t0_ms, e.rate_hz, e.n_samples(), span);
}

}  // namespace eegrc
