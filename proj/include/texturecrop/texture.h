#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "texturecrop/image.h"

namespace texturecrop {

enum class TextureMetricKind { SD, Entropy, Autocorrelation };

struct MetricValue {
  TextureMetricKind kind = TextureMetricKind::SD;
  double value = 0.0;
};

std::string_view to_string(TextureMetricKind kind);
// Accepts "sd", "entropy", "autocorrelation" (case-insensitive) and the
// short forms "std", "ent", "autocorr".
std::optional<TextureMetricKind> parse_metric_kind(std::string_view s);

// Population standard deviation of the luma values.
double std_dev(const GrayView& gray);

// Shannon entropy (bits) of the 256-bin luma histogram, bin = floor(v*255).
double entropy(const GrayView& gray);

// Mean of the lag-1 horizontal and vertical Pearson correlations. A flat
// patch returns 1.0. Per direction, if both sides of the pairing are
// constant the correlation is 1.0; if only one side is constant it is 0.0.
// Throws DegenerateGeometry when width or height is below 2.
double autocorrelation(const GrayView& gray);

MetricValue compute_metric(TextureMetricKind kind, const GrayView& gray);

inline double std_dev(const GrayImage& g) { return std_dev(g.view()); }
inline double entropy(const GrayImage& g) { return entropy(g.view()); }
inline double autocorrelation(const GrayImage& g) {
  return autocorrelation(g.view());
}

}  // namespace texturecrop
