#include "eegrc/splits.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "eegrc/error.hpp"
#include "eegrc/random.hpp"

namespace eegrc {

std::string_view to_string(Scheme s) { return s == Scheme::kCvot ? "cvot" : "lopo"; }

Scheme parse_scheme(std::string_view s) {
  if (s == "cvot" || s == "CVOT") return Scheme::kCvot;
  if (s == "lopo" || s == "LOPO") return Scheme::kLopo;
  throw ConfigError("unknown split scheme '" + std::string(s) + "' (expected cvot or lopo)");
}

void SplitPlan::check() const {
  std::set<std::string> seen;
  std::set<std::string> universe;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::set<std::string> train(folds[f].train_ids.begin(), folds[f].train_ids.end());
    for (const auto& id : folds[f].validation_ids) {
      if (train.count(id)) {
        throw LeakageError("fold " + std::to_string(f) + ": id '" + id +
                           "' is in both train and validation");
      }
      if (!seen.insert(id).second) {
        throw DataError("id '" + id + "' is validated in more than one fold");
      }
    }
    universe.insert(train.begin(), train.end());
    universe.insert(folds[f].validation_ids.begin(), folds[f].validation_ids.end());
  }
  if (seen != universe) throw DataError("validation sets do not cover every id of the plan");
}

SplitPlan split_cvot(const std::vector<int>& question_ids, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("CVOT needs at least 2 folds");
  std::vector<int> ids(question_ids);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < static_cast<std::size_t>(k)) {
    throw ConfigError("CVOT with " + std::to_string(k) + " folds needs at least " +
                      std::to_string(k) + " questions, got " + std::to_string(ids.size()));
  }
  Rng rng(seed);
  rng.shuffle(std::span<int>(ids));

  SplitPlan plan;
  plan.scheme = Scheme::kCvot;
  plan.seed = seed;
  const std::size_t n = ids.size();
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::vector<std::vector<int>> parts;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    std::vector<int> part(ids.begin() + static_cast<std::ptrdiff_t>(pos),
                          ids.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(part.begin(), part.end());
    parts.push_back(std::move(part));
    pos += len;
  }
  for (std::size_t f = 0; f < parts.size(); ++f) {
    Fold fold;
    for (std::size_t g = 0; g < parts.size(); ++g) {
      auto& dst = g == f ? fold.validation_ids : fold.train_ids;
      for (int id : parts[g]) dst.push_back(std::to_string(id));
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

SplitPlan split_lopo(const std::vector<std::string>& participant_ids) {
  std::vector<std::string> ids(participant_ids);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < 2) throw ConfigError("LOPO needs at least 2 participants");
  SplitPlan plan;
  plan.scheme = Scheme::kLopo;
  for (const auto& held : ids) {
    Fold fold;
    fold.validation_ids.push_back(held);
    for (const auto& other : ids) {
      if (other != held) fold.train_ids.push_back(other);
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

void to_json(nlohmann::json& j, const SplitPlan& p) {
  j = nlohmann::json{{"scheme", to_string(p.scheme)}, {"seed", p.seed}, {"folds", nlohmann::json::array()}};
  for (const auto& f : p.folds) {
    j["folds"].push_back({{"train", f.train_ids}, {"validation", f.validation_ids}});
  }
}

void from_json(const nlohmann::json& j, SplitPlan& p) {
  try {
    SplitPlan out;
    out.scheme = parse_scheme(j.at("scheme").get<std::string>());
    out.seed = j.value("seed", std::uint64_t{0});
    for (const auto& f : j.at("folds")) {
      out.folds.push_back({f.at("train").get<std::vector<std::string>>(),
                           f.at("validation").get<std::vector<std::string>>()});
    }
    p = std::move(out);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("split plan: ") + e.what());
  }
}

void save_plan(const std::filesystem::path& path, const SplitPlan& plan) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write split plan " + path.string());
  f << nlohmann::json(plan).dump(2) << '\n';
}

SplitPlan load_plan(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open split plan " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("split plan " + path.string() + ": " + e.what());
  }
  SplitPlan plan = j.get<SplitPlan>();
  plan.check();
  return plan;
}

}  // namespace eegrc
