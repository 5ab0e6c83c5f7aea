#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eegrc/erp.hpp"
#include "eegrc/stats.hpp"

namespace eegrc {

/// Condition averages of one participant.
struct ParticipantErp {
  std::string participant_id;
  std::vector<ConditionWaveform> conditions;

  const ConditionWaveform* find(WordType t) const;
};

enum class ComponentMeasure { kN100P200, kN400, kP600 };

std::string_view to_string(ComponentMeasure m);

/// Column order of every component test.
inline constexpr std::array<WordType, 3> kConditionOrder{WordType::kAnswer,
                                                         WordType::kSemanticRelated,
                                                         WordType::kOrdinary};

/// N100-P200 amplitude, or the ROI mean in the N400 / P600 window.
double component_value(const ConditionWaveform& w, ComponentMeasure m, std::string_view region,
                       const TimeWindows& windows, const RoiMap& rois = RoiMap::defaults());

struct ComponentTest {
  ComponentMeasure measure = ComponentMeasure::kN100P200;
  std::string region;
  std::vector<std::string> participants;
  Eigen::MatrixXd values;  // participants x kConditionOrder
  Eigen::VectorXd means;
  AnovaResult anova;
  std::vector<double> permutation_p;  // parallel to anova.pairwise; empty if n_perm == 0
};

/// Repeated-measures test of one component in one region across
/// participants. Participants lacking a condition are left out; throws
/// DataError when fewer than two remain.
ComponentTest component_test(const std::vector<ParticipantErp>& cohort, ComponentMeasure m,
                             std::string_view region, const TimeWindows& windows,
                             const RoiMap& rois = RoiMap::defaults(), int n_perm = 0,
                             std::uint64_t seed = 0);

/// Pools every condition of every participant (epoch-weighted).
ConditionWaveform cohort_average(const std::vector<ParticipantErp>& cohort);
/// Cohort average of one condition.
ConditionWaveform cohort_condition(const std::vector<ParticipantErp>& cohort, WordType t);

}  // namespace eegrc
