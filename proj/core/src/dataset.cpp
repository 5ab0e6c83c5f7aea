#include "eegrc/dataset.hpp"

#include <algorithm>
#include <map>

namespace eegrc {

std::vector<Sentence> build_sentences(const std::vector<WordFeatureVector>& words) {
  std::map<std::pair<std::string, int>, std::vector<const WordFeatureVector*>> groups;
  for (const auto& w : words) groups[{w.label.participant_id, w.label.trial_id}].push_back(&w);

  std::vector<Sentence> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](const auto* a, const auto* b) {
      return a->label.word_index < b->label.word_index;
    });
    Sentence s;
    s.participant_id = key.first;
    s.trial_id = key.second;
    s.question_id = members.front()->label.question_id;
    s.relevance = members.front()->label.sentence_relevance;
    s.features.resize(static_cast<Eigen::Index>(members.size()),
                      static_cast<Eigen::Index>(kFeatureDim));
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t d = 0; d < kFeatureDim; ++d)
        s.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) =
            members[i]->values[d];
      s.word_indices.push_back(members[i]->label.word_index);
      s.answer.push_back(members[i]->label.word_type == WordType::kAnswer ? 1 : 0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<WordFeatureVector> sentence_words(const std::vector<Sentence>& sentences) {
  std::vector<WordFeatureVector> out;
  for (const auto& s : sentences) {
    for (Eigen::Index i = 0; i < s.length(); ++i) {
      WordFeatureVector v;
      for (std::size_t d = 0; d < kFeatureDim; ++d)
        v.values[d] = s.features(i, static_cast<Eigen::Index>(d));
      v.label.participant_id = s.participant_id;
      v.label.trial_id = s.trial_id;
      v.label.question_id = s.question_id;
      v.label.word_index = s.word_indices[static_cast<std::size_t>(i)];
      v.label.sentence_relevance = s.relevance;
      v.label.word_type = s.answer[static_cast<std::size_t>(i)] ? WordType::kAnswer
                                                                : WordType::kOrdinary;
      out.push_back(v);
    }
  }
  return out;
}

std::vector<Sentence> scale_sentences(const std::vector<Sentence>& sentences,
                                      const FeatureScaler& scaler) {
  Eigen::RowVectorXd mean(static_cast<Eigen::Index>(kFeatureDim));
  Eigen::RowVectorXd stddev(static_cast<Eigen::Index>(kFeatureDim));
  for (std::size_t d = 0; d < kFeatureDim; ++d) {
    mean(static_cast<Eigen::Index>(d)) = scaler.mean()[d];
    stddev(static_cast<Eigen::Index>(d)) = scaler.stddev()[d];
  }
  std::vector<Sentence> out = sentences;
  for (auto& s : out) {
    s.features.rowwise() -= mean;
    s.features.array().rowwise() /= stddev.array();
  }
  return out;
}

}  // namespace eegrc
