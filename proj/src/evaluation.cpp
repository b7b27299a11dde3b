#include "texturecrop/evaluation.h"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "texturecrop/error.h"

namespace texturecrop {

namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts count_classes(std::span<const LabeledScore> items) {
  ClassCounts c;
  for (const auto& it : items) (it.label == 1 ? c.positives : c.negatives)++;
  return c;
}

void require_both_classes(std::span<const LabeledScore> items,
                          std::string_view metric) {
  const auto c = count_classes(items);
  if (c.positives == 0 || c.negatives == 0) {
    throw SingleClass(std::string(metric) + " needs both real and synthetic items");
  }
}

}  // namespace

double balanced_accuracy(std::span<const LabeledScore> items, double threshold) {
  require_both_classes(items, "balanced accuracy");
  std::size_t tp = 0, tn = 0;
  const auto c = count_classes(items);
  for (const auto& it : items) {
    const bool predicted_fake = it.score >= threshold;
    if (it.label == 1 && predicted_fake) ++tp;
    if (it.label == 0 && !predicted_fake) ++tn;
  }
  const double tpr = static_cast<double>(tp) / c.positives;
  const double tnr = static_cast<double>(tn) / c.negatives;
  return 0.5 * (tpr + tnr);
}

double auc(std::span<const LabeledScore> items) {
  require_both_classes(items, "AUC");
  // Walk tie groups in ascending score order; every positive in a group
  // beats all negatives seen so far and ties the group's negatives.
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].score < items[b].score;
  });
  // Twice the Mann-Whitney U, kept integral so the result is exact.
  unsigned long long twice_u = 0;
  std::size_t negatives_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos = 0, neg = 0;
    while (j < order.size() && items[order[j]].score == items[order[i]].score) {
      (items[order[j]].label == 1 ? pos : neg)++;
      ++j;
    }
    twice_u += pos * (2 * negatives_below + neg);
    negatives_below += neg;
    i = j;
  }
  const auto c = count_classes(items);
  return (static_cast<double>(twice_u) / 2.0) /
         (static_cast<double>(c.positives) * static_cast<double>(c.negatives));
}

double average_precision(std::span<const LabeledScore> items) {
  const auto c = count_classes(items);
  if (c.positives == 0) throw NoPositives("average precision needs a positive item");
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].score > items[b].score;
  });
  double sum = 0.0;
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (items[order[k]].label != 1) continue;
    ++tp;
    sum += static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(c.positives);
}

EvalReport evaluate(const DatasetManifest& manifest,
                    std::span<const AggregatedScore> aggregated,
                    double threshold) {
  std::unordered_map<std::string_view, double> by_id;
  for (const auto& a : aggregated) by_id.emplace(a.image_id, a.score);

  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<LabeledScore>> groups;
  for (const auto& e : manifest.entries) {
    const auto it = by_id.find(e.image_id);
    if (it == by_id.end()) {
      throw MissingScore("no aggregated score for '" + e.path + "'");
    }
    auto [g, inserted] = groups.try_emplace(e.subset);
    if (inserted && e.subset != kRealPoolSubset) order.push_back(e.subset);
    g->second.push_back({e.image_id, it->second, e.label, e.subset});
  }
  const auto pool_it = groups.find(std::string(kRealPoolSubset));
  const std::vector<LabeledScore>* pool =
      pool_it == groups.end() ? nullptr : &pool_it->second;

  EvalReport report;
  report.threshold = threshold;
  for (const auto& name : order) {
    std::vector<LabeledScore> items = groups.at(name);
    SubsetReport sub;
    sub.name = name;
    const auto c = count_classes(items);
    if (c.negatives == 0 && pool != nullptr) {
      items.insert(items.end(), pool->begin(), pool->end());
      sub.uses_real_pool = true;
    }
    const auto counts = count_classes(items);
    if (counts.positives == 0 || counts.negatives == 0) {
      throw SingleClass("subset '" + name + "' has a single class and no " +
                        std::string(kRealPoolSubset) + " to pair with");
    }
    sub.positives = counts.positives;
    sub.negatives = counts.negatives;
    sub.metrics = {balanced_accuracy(items, threshold), average_precision(items),
                   auc(items)};
    report.subsets.push_back(std::move(sub));
  }
  if (report.subsets.empty()) {
    throw SingleClass("manifest has no evaluable subset");
  }
  const double n = static_cast<double>(report.subsets.size());
  for (const auto& s : report.subsets) {
    report.overall.ba += s.metrics.ba;
    report.overall.ap += s.metrics.ap;
    report.overall.auc += s.metrics.auc;
  }
  report.overall.ba /= n;
  report.overall.ap /= n;
  report.overall.auc /= n;
  return report;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
  using oj = nlohmann::ordered_json;
  auto triple = [](const MetricTriple& m) {
    oj j;
    j["ba"] = m.ba;
    j["ap"] = m.ap;
    j["auc"] = m.auc;
    return j;
  };
  oj j;
  j["config"] = report.config;
  j["threshold"] = report.threshold;
  j["overall"] = triple(report.overall);
  oj subsets = oj::array();
  for (const auto& s : report.subsets) {
    oj sj;
    sj["name"] = s.name;
    sj["ba"] = s.metrics.ba;
    sj["ap"] = s.metrics.ap;
    sj["auc"] = s.metrics.auc;
    sj["positives"] = s.positives;
    sj["negatives"] = s.negatives;
    sj["uses_real_pool"] = s.uses_real_pool;
    subsets.push_back(std::move(sj));
  }
  j["subsets"] = std::move(subsets);
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  auto triple = [](const nlohmann::json& t) {
    return MetricTriple{t.at("ba").get<double>(), t.at("ap").get<double>(),
                        t.at("auc").get<double>()};
  };
  EvalReport r;
  r.threshold = j.value("threshold", 0.5);
  r.overall = triple(j.at("overall"));
  if (j.contains("config")) r.config = nlohmann::ordered_json(j.at("config"));
  for (const auto& s : j.at("subsets")) {
    SubsetReport sub;
    sub.name = s.at("name").get<std::string>();
    sub.metrics = triple(s);
    sub.positives = s.at("positives").get<std::size_t>();
    sub.negatives = s.at("negatives").get<std::size_t>();
    sub.uses_real_pool = s.value("uses_real_pool", false);
    r.subsets.push_back(std::move(sub));
  }
  return r;
}

void print_report(std::ostream& out, const EvalReport& report) {
  std::size_t width = 7;
  for (const auto& s : report.subsets) width = std::max(width, s.name.size());
  const auto flags = out.flags();
  out << std::left << std::setw(static_cast<int>(width)) << "subset"
      << "  " << std::right << std::setw(7) << "BA" << std::setw(8) << "AP"
      << std::setw(8) << "AUC" << std::setw(7) << "pos" << std::setw(7) << "neg"
      << '\n';
  auto row = [&](const std::string& name, const MetricTriple& m,
                 const std::string& pos, const std::string& neg) {
    out << std::left << std::setw(static_cast<int>(width)) << name << "  "
        << std::right << std::fixed << std::setprecision(4) << std::setw(7)
        << m.ba << std::setw(8) << m.ap << std::setw(8) << m.auc
        << std::setw(7) << pos << std::setw(7) << neg << '\n';
  };
  for (const auto& s : report.subsets) {
    row(s.name, s.metrics, std::to_string(s.positives),
        std::to_string(s.negatives));
  }
  row("overall", report.overall, "", "");
  out.flags(flags);
}

}  // namespace texturecrop
