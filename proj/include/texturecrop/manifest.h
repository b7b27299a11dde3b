#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "texturecrop/aggregation.h"
#include "texturecrop/cropper.h"
#include "texturecrop/scoring.h"

// JSON Lines / CSV file formats shared with external tools.
namespace texturecrop {

struct DatasetEntry {
  std::string path;  // as written in the manifest
  int label = 0;     // 0 real, 1 synthetic
  std::string subset;
  std::string image_id;
};

struct DatasetManifest {
  std::filesystem::path base_dir;  // relative entry paths resolve here
  std::vector<DatasetEntry> entries;

  std::filesystem::path resolve(const DatasetEntry& e) const;
};

// Stable identifier derived from a manifest path: the extension is dropped
// and every character outside [A-Za-z0-9.-] becomes '_'.
std::string image_id_from_path(std::string_view path);

// CSV with header `path,label,subset`, or JSON Lines with the same keys
// (chosen by the .jsonl/.json extension). Throws FormatError on malformed
// rows, bad labels, duplicate paths or colliding image ids.
DatasetManifest read_dataset_manifest(const std::filesystem::path& path);
DatasetManifest parse_dataset_manifest(std::istream& in, bool jsonl,
                                       std::filesystem::path base_dir = {});
void write_dataset_csv(std::ostream& out, std::span<const DatasetEntry> entries);

// {image_id, crop_id, x, y, w, h, metric_kind, metric_value, flipped,
//  fallback} per line; resized records add out_w/out_h.
void write_crop_manifest(std::ostream& out, std::span<const CropSet> sets);
// Groups consecutive lines by image_id.
std::vector<CropSet> read_crop_manifest(std::istream& in);
std::vector<CropSet> read_crop_manifest(const std::filesystem::path& path);

// {crop_id, score} per line. Scores are read as-is; range checking is
// validate_scores' job.
void write_score_manifest(std::ostream& out, std::span<const ScoreRecord> scores);
std::vector<ScoreRecord> read_score_manifest(std::istream& in);
// JSON Lines, or CSV `crop_id,score` for a .csv path.
std::vector<ScoreRecord> read_score_manifest(const std::filesystem::path& path);

struct AggregatedScore {
  std::string image_id;
  double score = 0.0;
  std::size_t n_crops = 0;
  std::string method;
};

void write_aggregated_manifest(std::ostream& out,
                               std::span<const AggregatedScore> scores);
std::vector<AggregatedScore> read_aggregated_manifest(std::istream& in);
std::vector<AggregatedScore> read_aggregated_manifest(
    const std::filesystem::path& path);

}  // namespace texturecrop
