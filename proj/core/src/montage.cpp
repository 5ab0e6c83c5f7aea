#include "eegrc/montage.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "eegrc/error.hpp"

namespace eegrc {

namespace {

std::map<std::string, std::vector<std::string>> default_regions() {
  return {
      {"prefrontal", {"Fp1", "Fpz", "Fp2", "AF3", "AF4"}},
      {"frontal", {"F7", "F3", "Fz", "F4", "F8"}},
      {"central", {"Cz", "FCz", "C3", "C4", "FC3", "FC4"}},
      {"parietal", {"CP3", "CPz", "CP4", "P3", "Pz", "P4"}},
      {"l-temporal", {"FT7", "T3", "TP7", "T5"}},
      {"r-temporal", {"FT8", "T4", "TP8", "T6"}},
      {"occipital", {"O1", "Oz", "O2"}},
  };
}

}  // namespace

const std::vector<std::string>& default_montage() {
  static const std::vector<std::string> montage = [] {
    std::vector<std::string> names;
    const auto regions = default_regions();
    for (auto region : kRegionNames) {
      const auto& electrodes = regions.at(std::string(region));
      names.insert(names.end(), electrodes.begin(), electrodes.end());
    }
    names.emplace_back("A1");
    names.emplace_back("A2");
    return names;
  }();
  return montage;
}

RoiMap::RoiMap(std::map<std::string, std::vector<std::string>> regions)
    : regions_(std::move(regions)) {
  for (const auto& [name, electrodes] : regions_) {
    if (electrodes.empty()) throw ConfigError("ROI '" + name + "' has no electrodes");
    regions_by_name_.emplace(name, electrodes);
  }
}

const RoiMap& RoiMap::defaults() {
  static const RoiMap map(default_regions());
  return map;
}

RoiMap RoiMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ROI map " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("ROI map " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("ROI map must be a JSON object");
  std::map<std::string, std::vector<std::string>> regions;
  for (const auto& [name, list] : doc.items()) {
    if (!list.is_array()) throw ConfigError("ROI '" + name + "' must be an array");
    for (const auto& e : list) regions[name].push_back(e.get<std::string>());
  }
  return RoiMap(std::move(regions));
}

const std::vector<std::string>& RoiMap::electrodes(std::string_view region) const {
  auto it = regions_by_name_.find(region);
  if (it == regions_by_name_.end())
    throw ConfigError("unknown region '" + std::string(region) + "'");
  return it->second;
}

bool RoiMap::contains(std::string_view region) const {
  return regions_by_name_.find(region) != regions_by_name_.end();
}

void RoiMap::check_against(const std::vector<std::string>& montage) const {
  for (const auto& [name, electrodes] : regions_) {
    for (const auto& e : electrodes)
      if (std::find(montage.begin(), montage.end(), e) == montage.end())
        throw ConfigError("ROI '" + name + "' names electrode '" + e +
                          "' absent from the montage");
  }
}

std::string RoiMap::region_of(std::string_view electrode) const {
  for (const auto& [name, electrodes] : regions_)
    if (std::find(electrodes.begin(), electrodes.end(), electrode) != electrodes.end())
      return name;
  return {};
}

}  // namespace eegrc
