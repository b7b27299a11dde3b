#pragma once

#include <nlohmann/json.hpp>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "texturecrop/manifest.h"

namespace texturecrop {

struct LabeledScore {
  std::string image_id;
  double score = 0.0;
  int label = 0;
  std::string subset;
};

// Subset name reserved for the shared pool of real images that
// synthetic-only subsets are evaluated against.
inline constexpr std::string_view kRealPoolSubset = "real-pool";

// (TPR + TNR) / 2 with prediction = score >= threshold. Throws SingleClass.
double balanced_accuracy(std::span<const LabeledScore> items,
                         double threshold = 0.5);

// Mann-Whitney pairwise win rate with half credit for ties. Throws
// SingleClass.
double auc(std::span<const LabeledScore> items);

// Mean precision@k over the ranks of positives; ranking is by descending
// score with ties kept in input order. Throws NoPositives.
double average_precision(std::span<const LabeledScore> items);

struct MetricTriple {
  double ba = 0.0;
  double ap = 0.0;
  double auc = 0.0;
};

struct SubsetReport {
  std::string name;
  MetricTriple metrics;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  bool uses_real_pool = false;
};

struct EvalReport {
  std::vector<SubsetReport> subsets;
  // Unweighted mean over subsets.
  MetricTriple overall;
  double threshold = 0.5;
  // Free-form echo of the run configuration (cropper, aggregation, scorer).
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
};

// Per-subset metrics in order of first appearance. Subsets holding a single
// class borrow the `real-pool` subset's items; the pool itself is not
// reported separately. Throws MissingScore naming the manifest path of any
// entry without an aggregated score, and SingleClass for a subset that
// cannot be paired.
EvalReport evaluate(const DatasetManifest& manifest,
                    std::span<const AggregatedScore> aggregated,
                    double threshold = 0.5);

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
// Fixed-width text table, one row per subset plus the overall row.
void print_report(std::ostream& out, const EvalReport& report);

}  // namespace texturecrop
