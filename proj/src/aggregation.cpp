#include "texturecrop/aggregation.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <vector>

#include "texturecrop/error.h"

namespace texturecrop {

namespace {

// Sums run over a sorted copy so every method is exactly invariant to the
// order crops were scored in. They accumulate offsets from the minimum,
// which also makes identical inputs return their common value exactly.
std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

double mean_of(std::span<const double> s) {
  const auto v = sorted_copy(s);
  const double lo = v.front();
  double sum = 0.0;
  for (double x : v) sum += x - lo;
  return lo + sum / static_cast<double>(v.size());
}

double median_of(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

double majority_vote(std::span<const double> s) {
  const auto synthetic = std::count_if(
      s.begin(), s.end(), [](double v) { return v >= kVoteThreshold; });
  const auto real = static_cast<std::ptrdiff_t>(s.size()) - synthetic;
  if (synthetic != real) return synthetic > real ? 1.0 : 0.0;
  return mean_of(s) >= kVoteThreshold ? 1.0 : 0.0;
}

double weighted_average(std::span<const double> unsorted, double interval) {
  if (!(interval > 0.0 && interval <= 1.0)) {
    throw InvalidArgument("weighted average interval must lie in (0,1]");
  }
  // Half-open bins [kL, (k+1)L); the last bin also holds 1.0.
  const auto bins = static_cast<std::size_t>(std::ceil(1.0 / interval - 1e-9));
  auto bin_of = [&](double v) {
    // The quotient can round across an edge; settle against kL directly.
    auto k = static_cast<long>(std::floor(v / interval));
    if (k > 0 && k * interval > v) --k;
    if ((k + 1) * interval <= v) ++k;
    return std::min(static_cast<std::size_t>(std::max(k, 0L)), bins - 1);
  };
  const auto s = sorted_copy(unsorted);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : s) ++counts[bin_of(v)];
  const double n = static_cast<double>(s.size());
  const double lo = s.front();
  double num = 0.0, den = 0.0;
  for (double v : s) {
    const double w = counts[bin_of(v)] / n;
    num += w * (v - lo);
    den += w;
  }
  return lo + num / den;
}

}  // namespace

std::optional<AggregationKind> parse_aggregation_kind(std::string_view s) {
  std::string k(s);
  std::transform(k.begin(), k.end(), k.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::replace(k.begin(), k.end(), '-', '_');
  if (k == "average" || k == "mean" || k == "avg") return AggregationKind::Average;
  if (k == "majority" || k == "majority_vote" || k == "vote") {
    return AggregationKind::MajorityVote;
  }
  if (k == "max") return AggregationKind::Max;
  if (k == "median") return AggregationKind::Median;
  if (k == "weighted" || k == "weighted_average" || k == "wavg") {
    return AggregationKind::WeightedAverage;
  }
  return std::nullopt;
}

std::string_view to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::Average:
      return "average";
    case AggregationKind::MajorityVote:
      return "majority_vote";
    case AggregationKind::Max:
      return "max";
    case AggregationKind::Median:
      return "median";
    case AggregationKind::WeightedAverage:
      return "weighted_average";
  }
  return "unknown";
}

std::string describe(const AggregationMethod& method) {
  std::string out(to_string(method.kind));
  if (method.kind == AggregationKind::WeightedAverage) {
    std::ostringstream os;
    os << '(' << method.interval_length << ')';
    out += os.str();
  }
  return out;
}

double aggregate(std::span<const double> scores, const AggregationMethod& method) {
  if (scores.empty()) throw EmptyInput("cannot aggregate an empty score list");
  for (double v : scores) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw RangeViolation("crop score outside [0,1]: " + std::to_string(v));
    }
  }
  switch (method.kind) {
    case AggregationKind::Average:
      return mean_of(scores);
    case AggregationKind::Max:
      return *std::max_element(scores.begin(), scores.end());
    case AggregationKind::Median:
      return median_of(scores);
    case AggregationKind::MajorityVote:
      return majority_vote(scores);
    case AggregationKind::WeightedAverage:
      return weighted_average(scores, method.interval_length);
  }
  throw InvalidArgument("unknown aggregation method");
}

}  // namespace texturecrop
