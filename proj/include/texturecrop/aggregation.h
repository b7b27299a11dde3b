#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace texturecrop {

enum class AggregationKind { Average, MajorityVote, Max, Median, WeightedAverage };

struct AggregationMethod {
  AggregationKind kind = AggregationKind::Average;
  // Histogram interval for WeightedAverage; ignored otherwise.
  double interval_length = 0.1;

  static AggregationMethod average() { return {AggregationKind::Average}; }
  static AggregationMethod majority_vote() {
    return {AggregationKind::MajorityVote};
  }
  static AggregationMethod max() { return {AggregationKind::Max}; }
  static AggregationMethod median() { return {AggregationKind::Median}; }
  static AggregationMethod weighted_average(double interval = 0.1) {
    return {AggregationKind::WeightedAverage, interval};
  }
};

// "average", "majority", "max", "median", "weighted" (and a few aliases).
std::optional<AggregationKind> parse_aggregation_kind(std::string_view s);
std::string_view to_string(AggregationKind kind);
// Round-trippable label, e.g. "weighted_average(0.1)".
std::string describe(const AggregationMethod& method);

// Decision boundary used when MajorityVote binarizes crop scores.
inline constexpr double kVoteThreshold = 0.5;

// Fuses per-crop probabilities into one image-level probability.
// Throws EmptyInput for an empty list, RangeViolation for scores outside
// [0,1], InvalidArgument for an interval length outside (0,1].
double aggregate(std::span<const double> scores, const AggregationMethod& method);

}  // namespace texturecrop
