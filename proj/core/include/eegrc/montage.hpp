#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eegrc {

inline constexpr std::string_view kRegionNames[] = {
    "prefrontal", "frontal", "central", "parietal", "l-temporal", "r-temporal", "occipital"};

/// Default 10-20 montage used by the synthetic sessions: 33 scalp electrodes
/// followed by the mastoids A1 and A2.
const std::vector<std::string>& default_montage();

/// Region name -> electrode names. The default assignment is a convention
/// (only the central set is fixed by the study); load a JSON file to override.
class RoiMap {
 public:
  RoiMap() = default;
  explicit RoiMap(std::map<std::string, std::vector<std::string>> regions);

  static const RoiMap& defaults();
  /// Reads `{"central": ["Cz", ...], ...}`; throws ConfigError on bad input.
  static RoiMap load(const std::filesystem::path& path);

  /// Throws ConfigError for an unknown region.
  const std::vector<std::string>& electrodes(std::string_view region) const;
  bool contains(std::string_view region) const;
  const std::map<std::string, std::vector<std::string>>& regions() const { return regions_; }

  /// Throws ConfigError if a region is empty or names an electrode that is
  /// not in `montage`.
  void check_against(const std::vector<std::string>& montage) const;

  /// Region containing `electrode`, or empty if none.
  std::string region_of(std::string_view electrode) const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> regions_by_name_;
  std::map<std::string, std::vector<std::string>> regions_;
};

}  // namespace eegrc
