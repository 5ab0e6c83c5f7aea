#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace eegrc {

enum class Scheme { kCvot, kLopo };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

struct Fold {
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;

  friend bool operator==(const Fold&, const Fold&) = default;
};

/// Units are question ids (CVOT, written in decimal) or participant ids (LOPO).
struct SplitPlan {
  Scheme scheme = Scheme::kCvot;
  std::uint64_t seed = 0;
  std::vector<Fold> folds;

  /// Throws LeakageError if a fold shares an id between train and
  /// validation, DataError if validation sets do not partition the ids.
  void check() const;

  friend bool operator==(const SplitPlan&, const SplitPlan&) = default;
};

/// Distinct ids shuffled by `seed` and dealt into k folds; the first n mod k
/// folds get one extra id. Throws ConfigError when there are fewer ids than folds.
SplitPlan split_cvot(const std::vector<int>& question_ids, int k = 10, std::uint64_t seed = 0);

/// One fold per distinct participant, in sorted order. Throws ConfigError
/// for fewer than two participants.
SplitPlan split_lopo(const std::vector<std::string>& participant_ids);

void to_json(nlohmann::json& j, const SplitPlan& p);
void from_json(const nlohmann::json& j, SplitPlan& p);

void save_plan(const std::filesystem::path& path, const SplitPlan& plan);
SplitPlan load_plan(const std::filesystem::path& path);

}  // namespace eegrc
