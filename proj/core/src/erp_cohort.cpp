#include "eegrc/erp_cohort.hpp"

#include "eegrc/error.hpp"
#include "eegrc/random.hpp"

namespace eegrc {

const ConditionWaveform* ParticipantErp::find(WordType t) const {
  for (const auto& c : conditions) {
    if (c.condition == t) return &c;
  }
  return nullptr;
}

std::string_view to_string(ComponentMeasure m) {
  switch (m) {
    case ComponentMeasure::kN100P200: return "n100_p200";
    case ComponentMeasure::kN400: return "n400";
    case ComponentMeasure::kP600: return "p600";
  }
  return "?";
}

double component_value(const ConditionWaveform& w, ComponentMeasure m, std::string_view region,
                       const TimeWindows& windows, const RoiMap& rois) {
  switch (m) {
    case ComponentMeasure::kN100P200: return n100_p200_amplitude(w, region, windows, rois);
    case ComponentMeasure::kN400: return roi_mean(w, region, windows.n400, rois);
    case ComponentMeasure::kP600: return roi_mean(w, region, windows.p600, rois);
  }
  return 0.0;
}

ComponentTest component_test(const std::vector<ParticipantErp>& cohort, ComponentMeasure m,
                             std::string_view region, const TimeWindows& windows,
                             const RoiMap& rois, int n_perm, std::uint64_t seed) {
  ComponentTest out;
  out.measure = m;
  out.region = std::string(region);
  std::vector<std::array<double, 3>> rows;
  for (const auto& p : cohort) {
    std::array<double, 3> row{};
    bool complete = true;
    for (std::size_t c = 0; c < kConditionOrder.size(); ++c) {
      const ConditionWaveform* w = p.find(kConditionOrder[c]);
      if (!w) {
        complete = false;
        break;
      }
      row[c] = component_value(*w, m, region, windows, rois);
    }
    if (!complete) continue;
    rows.push_back(row);
    out.participants.push_back(p.participant_id);
  }
  if (rows.size() < 2) {
    throw DataError("component test needs 2 participants with every condition, got " +
                    std::to_string(rows.size()));
  }
  out.values.resize(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      out.values(static_cast<Eigen::Index>(i), c) = rows[i][static_cast<std::size_t>(c)];
    }
  }
  out.means = out.values.colwise().mean().transpose();
  out.anova = rm_anova(out.values);
  if (n_perm > 0) {
    for (std::size_t k = 0; k < out.anova.pairwise.size(); ++k) {
      const auto& pw = out.anova.pairwise[k];
      const Eigen::VectorXd a = out.values.col(pw.a);
      const Eigen::VectorXd b = out.values.col(pw.b);
      out.permutation_p.push_back(permutation_paired_test(
          std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
          std::span<const double>(b.data(), static_cast<std::size_t>(b.size())), n_perm,
          derive_seed(seed, k)));
    }
  }
  return out;
}

ConditionWaveform cohort_average(const std::vector<ParticipantErp>& cohort) {
  std::vector<ConditionWaveform> all;
  for (const auto& p : cohort) all.insert(all.end(), p.conditions.begin(), p.conditions.end());
  return pooled_average(all);
}

ConditionWaveform cohort_condition(const std::vector<ParticipantErp>& cohort, WordType t) {
  std::vector<ConditionWaveform> parts;
  for (const auto& p : cohort) {
    if (const auto* w = p.find(t)) parts.push_back(*w);
  }
  if (parts.empty()) throw DataError(std::string("no participant has ") + std::string(to_string(t)) + " epochs");
  ConditionWaveform out = pooled_average(parts);
  out.condition = t;
  return out;
}

}  // namespace eegrc
