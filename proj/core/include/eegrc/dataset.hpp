#pragma once

#include <string>
#include <vector>

#include "eegrc/features.hpp"

namespace eegrc {

/// Words of one displayed sentence, in reading order.
struct Sentence {
  std::string participant_id;
  int trial_id = 0;
  int question_id = 0;
  Relevance relevance = Relevance::kIrrelevant;
  Eigen::MatrixXd features;      // words x kFeatureDim
  std::vector<int> word_indices;
  std::vector<int> answer;       // 1 for answer words

  Eigen::Index length() const { return features.rows(); }
  int positive() const { return relevance == Relevance::kPerfectlyRelevant ? 1 : 0; }
};

/// Groups word vectors by (participant, trial), ordered by word_index.
/// Output is sorted by participant then trial.
std::vector<Sentence> build_sentences(const std::vector<WordFeatureVector>& words);

/// Word vectors back out of sentences (labels reconstructed).
std::vector<WordFeatureVector> sentence_words(const std::vector<Sentence>& sentences);

/// Applies a scaler to every word of every sentence.
std::vector<Sentence> scale_sentences(const std::vector<Sentence>& sentences,
                                      const FeatureScaler& scaler);

}  // namespace eegrc
