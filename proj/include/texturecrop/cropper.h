#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "texturecrop/image.h"
#include "texturecrop/texture.h"

namespace texturecrop {

enum class CropMethod {
  TextureCrop,
  SlideCrop,
  FixedTextureCrop,
  CenterCrop,
  Resize,
  TenCrop,
};

// Which part of the metric-ranked candidate list FixedTextureCrop keeps.
enum class SelectionPart { Top, Bottom, TBI };

std::string_view to_string(CropMethod m);
std::string_view to_string(SelectionPart p);
std::optional<CropMethod> parse_crop_method(std::string_view s);
std::optional<SelectionPart> parse_selection_part(std::string_view s);

// Fallback crop side used when TextureCrop keeps nothing. Independent of
// the configured window.
inline constexpr int kFallbackSide = 224;
inline constexpr int kDefaultMaxSide = 2048;

struct CropperConfig {
  int window = 224;
  int stride = 200;
  double sd_threshold = 0.1;
  TextureMetricKind metric = TextureMetricKind::SD;
  SelectionPart part = SelectionPart::Top;
  int count = 15;
  CropMethod method = CropMethod::TextureCrop;
  int max_side = kDefaultMaxSide;

  // Throws InvalidArgument when window/stride/count < 1, threshold < 0 or
  // max_side < 1.
  void validate() const;
};

struct CropRecord {
  std::string image_id;
  std::string crop_id;
  Rect rect;
  MetricValue metric;
  bool flipped = false;
  bool fallback = false;
  // Set for the Resize baseline: the rect's pixels are resampled to a
  // resize_to x resize_to square on extraction.
  std::optional<int> resize_to;
};

struct CropSet {
  std::string image_id;
  std::vector<CropRecord> records;
  // Number of sliding-window candidates considered before filtering.
  std::size_t total_candidates = 0;

  std::size_t retained() const { return records.size(); }
};

struct WindowPositions {
  std::vector<int> offsets;
  // Effective window along this axis; smaller than requested when the
  // extent itself is smaller.
  int window = 0;
};

// Offsets 0, stride, 2*stride, ... that fit, plus a final window flush
// with the far edge when the grid leaves a remainder.
WindowPositions window_positions(int extent, int window, int stride);

// `<image_id>_<x>_<y>` with an `_f` suffix for mirrored crops.
std::string make_crop_id(std::string_view image_id, int x, int y,
                         bool flipped);

// Every sliding-window candidate, ordered by (y, x). Records carry
// cfg.metric evaluated on the candidate.
CropSet slide_crop(const PixelImage& img, const CropperConfig& cfg,
                   std::string_view image_id = "img");

// Candidates whose grayscale SD strictly exceeds cfg.sd_threshold, or a
// single 224x224 center fallback record when none survive.
CropSet texture_crop(const PixelImage& img, const CropperConfig& cfg,
                     std::string_view image_id = "img");

struct TbiSlices {
  std::size_t top = 0;
  std::size_t middle = 0;
  std::size_t bottom = 0;
  std::size_t total() const { return top + middle + bottom; }
};

// Slice sizes for a TBI selection of `count` out of `candidates`:
// ceil(n/3) from each end, the remainder from around the median.
TbiSlices tbi_slices(std::size_t count, std::size_t candidates);

// Candidate indices (0 = highest metric) chosen for `part`, ascending.
std::vector<std::size_t> select_ranks(SelectionPart part, std::size_t count,
                                      std::size_t candidates);

// cfg.count candidates ranked by cfg.metric (descending, ties by (y, x)),
// emitted in rank order.
CropSet fixed_texture_crop(const PixelImage& img, const CropperConfig& cfg,
                           std::string_view image_id = "img");

// Four corners and center, followed by their horizontal mirrors.
CropSet ten_crop(const PixelImage& img, int window,
                 std::string_view image_id = "img");

// Single centered window x window record.
CropSet center_crop_plan(const PixelImage& img, int window,
                         std::string_view image_id = "img");

// Single whole-image record resampled to window x window on extraction.
CropSet resize_plan(const PixelImage& img, int window,
                    std::string_view image_id = "img");

// Full planning path: pre-clamp to cfg.max_side, dispatch on cfg.method,
// and report rects in the coordinates of `img`.
CropSet plan_crops(const PixelImage& img, const CropperConfig& cfg,
                   std::string_view image_id);

// Pixels for one record, mirrored and/or resized as the record requires.
// `img` is the image the record's rect refers to. Throws OutOfBounds.
PixelImage extract_pixels(const PixelImage& img, const CropRecord& rec);

}  // namespace texturecrop
