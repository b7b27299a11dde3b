#include "texturecrop/texture.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>

#include "texturecrop/error.h"

namespace texturecrop {

std::string_view to_string(TextureMetricKind kind) {
  switch (kind) {
    case TextureMetricKind::SD:
      return "sd";
    case TextureMetricKind::Entropy:
      return "entropy";
    case TextureMetricKind::Autocorrelation:
      return "autocorrelation";
  }
  return "unknown";
}

std::optional<TextureMetricKind> parse_metric_kind(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "sd" || lower == "std") return TextureMetricKind::SD;
  if (lower == "entropy" || lower == "ent") return TextureMetricKind::Entropy;
  if (lower == "autocorrelation" || lower == "autocorr") {
    return TextureMetricKind::Autocorrelation;
  }
  return std::nullopt;
}

double std_dev(const GrayView& gray) {
  if (gray.size() == 0) throw EmptyInput("std_dev of an empty patch");
  // Two passes: the mean first keeps the variance free of cancellation.
  double sum = 0.0;
  for (int y = 0; y < gray.height(); ++y) {
    const float* row = gray.row(y);
    for (int x = 0; x < gray.width(); ++x) sum += row[x];
  }
  const double n = static_cast<double>(gray.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (int y = 0; y < gray.height(); ++y) {
    const float* row = gray.row(y);
    for (int x = 0; x < gray.width(); ++x) {
      const double d = row[x] - mean;
      ss += d * d;
    }
  }
  return std::sqrt(ss / n);
}

double entropy(const GrayView& gray) {
  if (gray.size() == 0) throw EmptyInput("entropy of an empty patch");
  std::array<std::size_t, 256> hist{};
  for (int y = 0; y < gray.height(); ++y) {
    const float* row = gray.row(y);
    for (int x = 0; x < gray.width(); ++x) {
      const double b = std::floor(static_cast<double>(row[x]) * 255.0);
      ++hist[static_cast<std::size_t>(std::clamp(b, 0.0, 255.0))];
    }
  }
  // H = log2(n) - sum(c * log2 c) / n. The sum is taken as log2 of
  // prod(c^c) through its prime exponents: equal entropies then share an
  // exponent vector and come out bit-identical, so ranking ties stay ties.
  std::size_t nonzero = 0;
  std::map<std::size_t, std::uint64_t> exponents;
  auto add_factors = [&exponents](std::size_t v, std::uint64_t times) {
    for (std::size_t p = 2; p * p <= v; ++p) {
      while (v % p == 0) {
        exponents[p] += times;
        v /= p;
      }
    }
    if (v > 1) exponents[v] += times;
  };
  for (std::size_t count : hist) {
    if (count == 0) continue;
    ++nonzero;
    add_factors(count, count);
  }
  if (nonzero <= 1) return 0.0;
  double sum = 0.0;
  for (const auto& [p, e] : exponents) {
    sum += static_cast<double>(e) * std::log2(static_cast<double>(p));
  }
  const double n = static_cast<double>(gray.size());
  return std::max(0.0, std::log2(n) - sum / n);
}

namespace {

// Pearson correlation between pixel (x,y) and (x+dx,y+dy) over all pairs
// that stay inside the view.
double lag_correlation(const GrayView& g, int dx, int dy) {
  const int w = g.width() - dx;
  const int h = g.height() - dy;
  const double n = static_cast<double>(w) * h;
  double sa = 0.0, sb = 0.0;
  for (int y = 0; y < h; ++y) {
    const float* a = g.row(y);
    const float* b = g.row(y + dy) + dx;
    for (int x = 0; x < w; ++x) {
      sa += a[x];
      sb += b[x];
    }
  }
  const double ma = sa / n;
  const double mb = sb / n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (int y = 0; y < h; ++y) {
    const float* a = g.row(y);
    const float* b = g.row(y + dy) + dx;
    for (int x = 0; x < w; ++x) {
      const double da = a[x] - ma;
      const double db = b[x] - mb;
      saa += da * da;
      sbb += db * db;
      sab += da * db;
    }
  }
  if (saa == 0.0 && sbb == 0.0) return 1.0;
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

double autocorrelation(const GrayView& gray) {
  if (gray.width() < 2 || gray.height() < 2) {
    throw DegenerateGeometry("autocorrelation needs a patch of at least 2x2");
  }
  if (std_dev(gray) == 0.0) return 1.0;
  return 0.5 * (lag_correlation(gray, 1, 0) + lag_correlation(gray, 0, 1));
}

MetricValue compute_metric(TextureMetricKind kind, const GrayView& gray) {
  switch (kind) {
    case TextureMetricKind::SD:
      return {kind, std_dev(gray)};
    case TextureMetricKind::Entropy:
      return {kind, entropy(gray)};
    case TextureMetricKind::Autocorrelation:
      return {kind, autocorrelation(gray)};
  }
  throw InvalidArgument("unknown texture metric");
}

}  // namespace texturecrop
