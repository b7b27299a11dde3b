#include "texturecrop/scoring.h"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "texturecrop/error.h"
#include "texturecrop/manifest.h"
#include "texturecrop/texture.h"

namespace texturecrop {

namespace {

double parse_number(std::string_view s, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("bad " + std::string(what) + " value '" +
                          std::string(s) + "'");
  }
}

}  // namespace

ScorerSpec parse_scorer_spec(std::string_view s) {
  const auto colon = s.find(':');
  std::string kind(s.substr(0, colon));
  std::transform(kind.begin(), kind.end(), kind.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::replace(kind.begin(), kind.end(), '-', '_');
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : s.substr(colon + 1);

  if (kind == "constant") {
    if (arg.empty()) throw InvalidArgument("constant scorer needs a value");
    return ScorerSpec::constant(parse_number(arg, "constant"));
  }
  if (kind == "texture_proxy" || kind == "proxy") {
    return ScorerSpec::texture_proxy(arg.empty() ? 2.0
                                                 : parse_number(arg, "scale"));
  }
  if (kind == "sidecar" || kind == "sidecar_oracle") {
    if (arg.empty()) throw InvalidArgument("sidecar scorer needs a file path");
    return ScorerSpec::sidecar(std::filesystem::path(std::string(arg)));
  }
  if (kind == "external") {
    return ScorerSpec::external(std::filesystem::path(std::string(arg)));
  }
  throw InvalidArgument("unknown scorer '" + std::string(s) + "'");
}

std::string describe(const ScorerSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case ScorerSpec::Kind::Constant:
      os << "constant:" << spec.param;
      break;
    case ScorerSpec::Kind::TextureProxy:
      os << "texture_proxy:" << spec.param;
      break;
    case ScorerSpec::Kind::SidecarOracle:
      os << "sidecar:" << spec.path.string();
      break;
    case ScorerSpec::Kind::External:
      os << "external";
      if (!spec.path.empty()) os << ':' << spec.path.string();
      break;
  }
  return os.str();
}

Scorer::Scorer(const ScorerSpec& spec) : spec_(spec) {
  switch (spec.kind) {
    case ScorerSpec::Kind::Constant:
      if (!(spec.param >= 0.0 && spec.param <= 1.0)) {
        throw InvalidArgument("constant score must lie in [0,1]");
      }
      break;
    case ScorerSpec::Kind::TextureProxy:
      if (!(spec.param >= 0.0)) {
        throw InvalidArgument("texture proxy scale must be non-negative");
      }
      break;
    case ScorerSpec::Kind::SidecarOracle:
    case ScorerSpec::Kind::External:
      if (spec.path.empty()) throw InvalidArgument("scorer needs a score file");
      for (auto& rec : read_score_manifest(spec.path)) {
        if (!table_.emplace(rec.crop_id, rec.score).second) {
          throw DuplicateScore("score file lists crop_id '" + rec.crop_id +
                               "' twice");
        }
      }
      break;
  }
}

double Scorer::score(const CropRecord& rec, const PixelImage* pixels) const {
  double s = 0.0;
  switch (spec_.kind) {
    case ScorerSpec::Kind::Constant:
      return spec_.param;
    case ScorerSpec::Kind::TextureProxy:
      if (pixels == nullptr) {
        throw ScorerFailure("texture proxy scorer needs crop pixels");
      }
      return texture_proxy_score(*pixels, spec_.param);
    case ScorerSpec::Kind::SidecarOracle:
    case ScorerSpec::Kind::External: {
      const auto it = table_.find(rec.crop_id);
      if (it == table_.end()) {
        throw ScorerFailure("no score for crop_id '" + rec.crop_id + "' in " +
                            spec_.path.string());
      }
      s = it->second;
      break;
    }
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ScorerFailure("score " + std::to_string(s) + " for crop_id '" +
                        rec.crop_id + "' is outside [0,1]");
  }
  return s;
}

double texture_proxy_score(const PixelImage& crop_pixels, double scale) {
  const double sd = std_dev(to_grayscale(crop_pixels));
  return std::min(1.0, scale * sd);
}

std::vector<ScoreRecord> score_crops(const Scorer& scorer, const CropSet& crops,
                                     const PixelImage& source) {
  std::vector<ScoreRecord> out;
  out.reserve(crops.records.size());
  for (const auto& rec : crops.records) {
    if (scorer.needs_pixels()) {
      const PixelImage px = extract_pixels(source, rec);
      out.push_back({rec.crop_id, scorer.score(rec, &px)});
    } else {
      out.push_back({rec.crop_id, scorer.score(rec, nullptr)});
    }
  }
  return out;
}

std::vector<ScoreRecord> score_crops(const Scorer& scorer, const CropSet& crops) {
  if (scorer.needs_pixels()) {
    throw ScorerFailure(describe(scorer.spec()) + " needs crop pixels");
  }
  std::vector<ScoreRecord> out;
  out.reserve(crops.records.size());
  for (const auto& rec : crops.records) {
    out.push_back({rec.crop_id, scorer.score(rec, nullptr)});
  }
  return out;
}

void validate_scores(std::span<const ScoreRecord> records,
                     std::span<const CropSet> expected) {
  std::unordered_set<std::string_view> planned;
  for (const auto& set : expected) {
    for (const auto& rec : set.records) planned.insert(rec.crop_id);
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& r : records) {
    if (!planned.contains(r.crop_id)) {
      throw ScorerFailure("score for unknown crop_id '" + r.crop_id + "'");
    }
    if (!seen.insert(r.crop_id).second) {
      throw DuplicateScore("crop_id '" + r.crop_id + "' scored more than once");
    }
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      throw RangeViolation("score " + std::to_string(r.score) +
                           " for crop_id '" + r.crop_id + "' is outside [0,1]");
    }
  }
  for (const auto& set : expected) {
    for (const auto& rec : set.records) {
      if (!seen.contains(rec.crop_id)) {
        throw MissingScore("missing score for crop_id '" + rec.crop_id + "'");
      }
    }
  }
}

void validate_scores(std::span<const ScoreRecord> records,
                     const CropSet& expected) {
  validate_scores(records, std::span<const CropSet>(&expected, 1));
}

}  // namespace texturecrop
