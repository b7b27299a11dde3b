#include "texturecrop/cropper.h"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_map>

#include "texturecrop/error.h"

namespace texturecrop {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](char c) { return c == '-' || c == '_'; }),
            out.end());
  return out;
}

// Regenerates crop ids from rect/flip; repeated geometry (ten-crop on a
// small image) gets an occurrence suffix so ids stay unique.
void assign_crop_ids(CropSet& set) {
  std::unordered_map<std::string, int> seen;
  for (auto& rec : set.records) {
    rec.image_id = set.image_id;
    std::string id =
        make_crop_id(set.image_id, rec.rect.x, rec.rect.y, rec.flipped);
    const int n = seen[id]++;
    if (n > 0) id += "_" + std::to_string(n);
    rec.crop_id = std::move(id);
  }
}

struct Candidate {
  Rect rect;
  MetricValue metric;
};

std::vector<Candidate> sliding_candidates(const GrayImage& gray,
                                          const CropperConfig& cfg,
                                          TextureMetricKind kind) {
  const auto xs = window_positions(gray.width(), cfg.window, cfg.stride);
  const auto ys = window_positions(gray.height(), cfg.window, cfg.stride);
  std::vector<Candidate> out;
  out.reserve(xs.offsets.size() * ys.offsets.size());
  for (int y : ys.offsets) {
    for (int x : xs.offsets) {
      const Rect r{x, y, xs.window, ys.window};
      out.push_back({r, compute_metric(kind, gray.view(r))});
    }
  }
  return out;
}

CropRecord record_for(const Candidate& c) {
  CropRecord rec;
  rec.rect = c.rect;
  rec.metric = c.metric;
  return rec;
}

CropSet finish(std::string_view image_id, std::vector<CropRecord> records,
               std::size_t total) {
  CropSet set;
  set.image_id = std::string(image_id);
  set.records = std::move(records);
  set.total_candidates = total;
  assign_crop_ids(set);
  return set;
}

CropSet texture_crop_gray(const GrayImage& gray, const CropperConfig& cfg,
                          std::string_view image_id) {
  const auto candidates =
      sliding_candidates(gray, cfg, TextureMetricKind::SD);
  std::vector<CropRecord> kept;
  for (const auto& c : candidates) {
    if (c.metric.value > cfg.sd_threshold) kept.push_back(record_for(c));
  }
  if (kept.empty()) {
    const Rect r =
        center_rect(gray.width(), gray.height(), kFallbackSide, kFallbackSide);
    CropRecord rec;
    rec.rect = r;
    rec.metric = {TextureMetricKind::SD, std_dev(gray.view(r))};
    rec.fallback = true;
    kept.push_back(rec);
  }
  return finish(image_id, std::move(kept), candidates.size());
}

CropSet slide_crop_gray(const GrayImage& gray, const CropperConfig& cfg,
                        std::string_view image_id) {
  const auto candidates = sliding_candidates(gray, cfg, cfg.metric);
  std::vector<CropRecord> records;
  records.reserve(candidates.size());
  for (const auto& c : candidates) records.push_back(record_for(c));
  return finish(image_id, std::move(records), candidates.size());
}

CropSet fixed_texture_crop_gray(const GrayImage& gray,
                                const CropperConfig& cfg,
                                std::string_view image_id) {
  auto candidates = sliding_candidates(gray, cfg, cfg.metric);
  // Candidates arrive in (y, x) order, so a stable sort on the metric
  // alone gives the (y, x) tie-break.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.metric.value > b.metric.value;
                   });
  const auto ranks = select_ranks(cfg.part, static_cast<std::size_t>(cfg.count),
                                  candidates.size());
  std::vector<CropRecord> records;
  records.reserve(ranks.size());
  for (std::size_t r : ranks) records.push_back(record_for(candidates[r]));
  return finish(image_id, std::move(records), candidates.size());
}

CropSet ten_crop_gray(const GrayImage& gray, int window,
                      std::string_view image_id) {
  if (window < 1) throw InvalidArgument("window must be positive");
  const int W = gray.width();
  const int H = gray.height();
  const int w = std::min(window, W);
  const int h = std::min(window, H);
  const Rect geometric[5] = {
      {0, 0, w, h},
      {W - w, 0, w, h},
      {0, H - h, w, h},
      {W - w, H - h, w, h},
      center_rect(W, H, w, h),
  };
  std::vector<CropRecord> records;
  for (bool flipped : {false, true}) {
    for (const Rect& r : geometric) {
      CropRecord rec;
      rec.rect = r;
      rec.metric = {TextureMetricKind::SD, std_dev(gray.view(r))};
      rec.flipped = flipped;
      records.push_back(rec);
    }
  }
  return finish(image_id, std::move(records), 10);
}

}  // namespace

std::string_view to_string(CropMethod m) {
  switch (m) {
    case CropMethod::TextureCrop:
      return "texturecrop";
    case CropMethod::SlideCrop:
      return "slidecrop";
    case CropMethod::FixedTextureCrop:
      return "fixedtexturecrop";
    case CropMethod::CenterCrop:
      return "centercrop";
    case CropMethod::Resize:
      return "resize";
    case CropMethod::TenCrop:
      return "tencrop";
  }
  return "unknown";
}

std::string_view to_string(SelectionPart p) {
  switch (p) {
    case SelectionPart::Top:
      return "top";
    case SelectionPart::Bottom:
      return "bottom";
    case SelectionPart::TBI:
      return "tbi";
  }
  return "unknown";
}

std::optional<CropMethod> parse_crop_method(std::string_view s) {
  const std::string k = lowercase(s);
  for (auto m : {CropMethod::TextureCrop, CropMethod::SlideCrop,
                 CropMethod::FixedTextureCrop, CropMethod::CenterCrop,
                 CropMethod::Resize, CropMethod::TenCrop}) {
    if (k == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<SelectionPart> parse_selection_part(std::string_view s) {
  const std::string k = lowercase(s);
  if (k == "top") return SelectionPart::Top;
  if (k == "bottom") return SelectionPart::Bottom;
  if (k == "tbi") return SelectionPart::TBI;
  return std::nullopt;
}

void CropperConfig::validate() const {
  if (window < 1) throw InvalidArgument("window must be >= 1");
  if (stride < 1) throw InvalidArgument("stride must be >= 1");
  if (!(sd_threshold >= 0.0)) throw InvalidArgument("sd threshold must be >= 0");
  if (count < 1) throw InvalidArgument("crop count must be >= 1");
  if (max_side < 1) throw InvalidArgument("max side must be >= 1");
}

WindowPositions window_positions(int extent, int window, int stride) {
  if (extent < 1) throw InvalidArgument("extent must be >= 1");
  if (window < 1 || stride < 1) {
    throw InvalidArgument("window and stride must be >= 1");
  }
  WindowPositions out;
  if (extent <= window) {
    out.offsets = {0};
    out.window = extent;
    return out;
  }
  out.window = window;
  int off = 0;
  for (; off + window <= extent; off += stride) out.offsets.push_back(off);
  if (out.offsets.back() != extent - window) {
    out.offsets.push_back(extent - window);
  }
  return out;
}

std::string make_crop_id(std::string_view image_id, int x, int y,
                         bool flipped) {
  std::string id(image_id);
  id += '_';
  id += std::to_string(x);
  id += '_';
  id += std::to_string(y);
  if (flipped) id += "_f";
  return id;
}

CropSet slide_crop(const PixelImage& img, const CropperConfig& cfg,
                   std::string_view image_id) {
  cfg.validate();
  return slide_crop_gray(to_grayscale(img), cfg, image_id);
}

CropSet texture_crop(const PixelImage& img, const CropperConfig& cfg,
                     std::string_view image_id) {
  cfg.validate();
  return texture_crop_gray(to_grayscale(img), cfg, image_id);
}

TbiSlices tbi_slices(std::size_t count, std::size_t candidates) {
  const std::size_t n = std::min(count, candidates);
  const std::size_t third = (count + 2) / 3;
  TbiSlices s;
  if (count >= candidates) {
    s.top = n;
    return s;
  }
  s.top = std::min(third, n);
  s.bottom = std::min(third, n - s.top);
  s.middle = n - s.top - s.bottom;
  return s;
}

std::vector<std::size_t> select_ranks(SelectionPart part, std::size_t count,
                                      std::size_t candidates) {
  const std::size_t n = std::min(count, candidates);
  std::vector<std::size_t> ranks;
  ranks.reserve(n);
  switch (part) {
    case SelectionPart::Top:
      for (std::size_t i = 0; i < n; ++i) ranks.push_back(i);
      break;
    case SelectionPart::Bottom:
      for (std::size_t i = candidates - n; i < candidates; ++i) {
        ranks.push_back(i);
      }
      break;
    case SelectionPart::TBI: {
      const TbiSlices s = tbi_slices(count, candidates);
      for (std::size_t i = 0; i < s.top; ++i) ranks.push_back(i);
      if (s.middle > 0) {
        // Window of s.middle ranks centered on the median, shifted to stay
        // clear of the top and bottom slices.
        const std::size_t median = (candidates - 1) / 2;
        const std::size_t lo = s.top;
        const std::size_t hi = candidates - s.bottom - s.middle;
        const std::size_t want =
            median >= (s.middle - 1) / 2 ? median - (s.middle - 1) / 2 : 0;
        const std::size_t start = std::clamp(want, lo, hi);
        for (std::size_t i = 0; i < s.middle; ++i) ranks.push_back(start + i);
      }
      for (std::size_t i = candidates - s.bottom; i < candidates; ++i) {
        ranks.push_back(i);
      }
      break;
    }
  }
  return ranks;
}

CropSet fixed_texture_crop(const PixelImage& img, const CropperConfig& cfg,
                           std::string_view image_id) {
  cfg.validate();
  return fixed_texture_crop_gray(to_grayscale(img), cfg, image_id);
}

CropSet ten_crop(const PixelImage& img, int window, std::string_view image_id) {
  return ten_crop_gray(to_grayscale(img), window, image_id);
}

CropSet center_crop_plan(const PixelImage& img, int window,
                         std::string_view image_id) {
  const Rect r = center_rect(img.width(), img.height(), window, window);
  const GrayImage gray = to_grayscale(img);
  CropRecord rec;
  rec.rect = r;
  rec.metric = {TextureMetricKind::SD, std_dev(gray.view(r))};
  return finish(image_id, {rec}, 1);
}

CropSet resize_plan(const PixelImage& img, int window,
                    std::string_view image_id) {
  if (window < 1) throw InvalidArgument("window must be positive");
  const GrayImage gray = to_grayscale(img);
  CropRecord rec;
  rec.rect = Rect{0, 0, img.width(), img.height()};
  rec.metric = {TextureMetricKind::SD, std_dev(gray.view())};
  rec.resize_to = window;
  return finish(image_id, {rec}, 1);
}

CropSet plan_crops(const PixelImage& img, const CropperConfig& cfg,
                   std::string_view image_id) {
  cfg.validate();
  const Rect region = oversize_rect(img.width(), img.height(), cfg.max_side);
  const PixelImage clamped = clamp_oversize(img, cfg.max_side);

  CropSet set;
  switch (cfg.method) {
    case CropMethod::TextureCrop:
      set = texture_crop_gray(to_grayscale(clamped), cfg, image_id);
      break;
    case CropMethod::SlideCrop:
      set = slide_crop_gray(to_grayscale(clamped), cfg, image_id);
      break;
    case CropMethod::FixedTextureCrop:
      set = fixed_texture_crop_gray(to_grayscale(clamped), cfg, image_id);
      break;
    case CropMethod::TenCrop:
      set = ten_crop_gray(to_grayscale(clamped), cfg.window, image_id);
      break;
    case CropMethod::CenterCrop:
      set = center_crop_plan(clamped, cfg.window, image_id);
      break;
    case CropMethod::Resize:
      set = resize_plan(clamped, cfg.window, image_id);
      break;
  }
  if (region.x != 0 || region.y != 0) {
    for (auto& rec : set.records) {
      rec.rect.x += region.x;
      rec.rect.y += region.y;
    }
    assign_crop_ids(set);
  }
  return set;
}

PixelImage extract_pixels(const PixelImage& img, const CropRecord& rec) {
  PixelImage out = crop(img, rec.rect, rec.flipped);
  if (rec.resize_to) out = resize(out, *rec.resize_to, *rec.resize_to);
  return out;
}

}  // namespace texturecrop
