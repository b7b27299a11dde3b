#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "texturecrop/cropper.h"
#include "texturecrop/image.h"

namespace texturecrop {

struct ScoreRecord {
  std::string crop_id;
  double score = 0.0;
};

// Detector stand-ins. Neural detectors live outside the library and attach
// through the External kind (a score manifest written by another process).
struct ScorerSpec {
  enum class Kind { Constant, TextureProxy, SidecarOracle, External };
  Kind kind = Kind::TextureProxy;
  // Constant: the score. TextureProxy: the SD multiplier.
  double param = 2.0;
  // SidecarOracle / External: score table to read.
  std::filesystem::path path;

  static ScorerSpec constant(double c) { return {Kind::Constant, c, {}}; }
  static ScorerSpec texture_proxy(double scale) {
    return {Kind::TextureProxy, scale, {}};
  }
  static ScorerSpec sidecar(std::filesystem::path p) {
    return {Kind::SidecarOracle, 0.0, std::move(p)};
  }
  static ScorerSpec external(std::filesystem::path p) {
    return {Kind::External, 0.0, std::move(p)};
  }
};

// "constant:0.7", "texture_proxy:2", "sidecar:<path>", "external[:<path>]".
// Throws InvalidArgument on malformed input.
ScorerSpec parse_scorer_spec(std::string_view s);
std::string describe(const ScorerSpec& spec);

class Scorer {
 public:
  // Loads any score table the spec refers to. Throws InvalidArgument for a
  // constant outside [0,1] or a negative proxy scale.
  explicit Scorer(const ScorerSpec& spec);

  const ScorerSpec& spec() const { return spec_; }
  bool needs_pixels() const {
    return spec_.kind == ScorerSpec::Kind::TextureProxy;
  }

  // Score of one crop. `pixels` may be null for table-backed scorers.
  // Throws ScorerFailure for unknown crop ids or out-of-range scores.
  double score(const CropRecord& rec, const PixelImage* pixels) const;

 private:
  ScorerSpec spec_;
  std::unordered_map<std::string, double> table_;
};

// score = min(1, scale * SD(luma of crop)).
double texture_proxy_score(const PixelImage& crop_pixels, double scale);

// One record per crop, in CropSet order. `source` is the image the crop
// rects refer to.
std::vector<ScoreRecord> score_crops(const Scorer& scorer, const CropSet& crops,
                                     const PixelImage& source);
// Table-backed scorers only; throws ScorerFailure if pixels are required.
std::vector<ScoreRecord> score_crops(const Scorer& scorer, const CropSet& crops);

// Checks that `records` cover exactly the expected crop ids once each with
// scores in [0,1]. Throws MissingScore, DuplicateScore, RangeViolation, or
// ScorerFailure for ids that were never planned.
void validate_scores(std::span<const ScoreRecord> records,
                     std::span<const CropSet> expected);
void validate_scores(std::span<const ScoreRecord> records,
                     const CropSet& expected);

}  // namespace texturecrop
