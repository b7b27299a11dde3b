#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "texturecrop/aggregation.h"
#include "texturecrop/cropper.h"
#include "texturecrop/evaluation.h"
#include "texturecrop/manifest.h"
#include "texturecrop/scoring.h"

namespace texturecrop {

struct RunOptions {
  CropperConfig cropper;
  AggregationMethod aggregation;
  ScorerSpec scorer = ScorerSpec::texture_proxy(2.0);
  double threshold = 0.5;
  int jobs = 1;
};

nlohmann::ordered_json config_json(const RunOptions& opts);

struct ItemFailure {
  std::string item;  // dataset path or crop id
  std::string message;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions escaping
// fn terminate the batch and are rethrown on the calling thread.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

// Decoded-image cache with a byte budget; once full, further images are
// decoded on demand and not retained. Thread-safe.
class ImageCache {
 public:
  explicit ImageCache(std::size_t budget_bytes) : budget_(budget_bytes) {}
  std::shared_ptr<const PixelImage> get(const std::filesystem::path& path);

 private:
  std::size_t budget_;
  std::size_t used_ = 0;
  std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const PixelImage>> images_;
};

using ImageLoader =
    std::function<std::shared_ptr<const PixelImage>(const std::filesystem::path&)>;
ImageLoader disk_loader();
ImageLoader cached_loader(ImageCache& cache);

struct CropStage {
  // One entry per manifest entry that planned successfully, manifest order.
  std::vector<std::size_t> entry_index;
  std::vector<CropSet> sets;
  std::vector<ItemFailure> failures;
};

// Plans crops for every manifest entry. With `export_dir`, each record's
// pixels are written there as `<crop_id>.png`.
CropStage crop_stage(const DatasetManifest& manifest, const CropperConfig& cfg,
                     int jobs, const ImageLoader& load,
                     const std::filesystem::path* export_dir = nullptr);

// Scores planned crops; built-in pixel scorers re-load the source images.
// Images that fail to load or score are reported and left unscored.
struct ScoreStage {
  std::vector<ScoreRecord> scores;
  std::vector<ItemFailure> failures;
};
ScoreStage score_stage(const DatasetManifest& manifest, const CropStage& crops,
                       const Scorer& scorer, int jobs, const ImageLoader& load);

// One aggregated score per crop set, in set order. Validates the score set
// against the plan first (MissingScore etc. propagate).
std::vector<AggregatedScore> aggregate_sets(std::span<const CropSet> sets,
                                            std::span<const ScoreRecord> scores,
                                            const AggregationMethod& method);

// Manifest restricted to the entries that have an aggregated score.
DatasetManifest restrict_manifest(const DatasetManifest& manifest,
                                  std::span<const AggregatedScore> aggregated);

struct PipelineResult {
  CropStage crops;
  std::vector<ScoreRecord> scores;
  std::vector<AggregatedScore> aggregated;
  EvalReport report;
  std::vector<ItemFailure> failures;
};

// crop -> score -> aggregate -> evaluate, entirely in memory.
PipelineResult run_pipeline(const DatasetManifest& manifest,
                            const RunOptions& opts, const ImageLoader& load);

// ---------------------------------------------------------------------------
// Work-directory commands. Layout under <work>:
//   crops/<crop_id>.png  crops.jsonl  scores.jsonl  aggregated.jsonl
//   report.json  run.json
// Each returns the number of per-item failures (exit status is nonzero iff
// that count is nonzero).

struct WorkPaths {
  std::filesystem::path root;
  std::filesystem::path crops_dir() const { return root / "crops"; }
  std::filesystem::path crops() const { return root / "crops.jsonl"; }
  std::filesystem::path scores() const { return root / "scores.jsonl"; }
  std::filesystem::path aggregated() const { return root / "aggregated.jsonl"; }
  std::filesystem::path report() const { return root / "report.json"; }
  std::filesystem::path run() const { return root / "run.json"; }
};

std::size_t cmd_crop(const std::filesystem::path& manifest_path,
                     const WorkPaths& work, const RunOptions& opts,
                     bool export_crops, std::ostream& log);

// Built-in scorers write scores.jsonl. External scorers optionally run
// `exec_command` (with `{work}` replaced by the work directory), then
// import and validate the score manifest (default <work>/scores.jsonl).
std::size_t cmd_score(const std::filesystem::path& manifest_path,
                      const WorkPaths& work, const RunOptions& opts,
                      const std::string& exec_command, std::ostream& log);

std::size_t cmd_aggregate(const WorkPaths& work, const AggregationMethod& method,
                          std::ostream& log);

std::size_t cmd_evaluate(const std::filesystem::path& manifest_path,
                         const WorkPaths& work, double threshold,
                         std::ostream& out);

struct AblationGrid {
  std::vector<int> windows;
  std::vector<int> strides;
  std::vector<double> thresholds;
  std::vector<int> counts;
};

struct AblationPoint {
  std::string label;
  CropperConfig cropper;
  std::optional<EvalReport> report;
  std::string error;
};

// Grid points in nested order window > stride > threshold > count; an empty
// axis uses the base config's value.
std::vector<AblationPoint> expand_grid(const CropperConfig& base,
                                       const AblationGrid& grid);

// Sorted by descending overall AUC, stable on grid order; failed points
// last.
std::vector<AblationPoint> sort_by_auc(std::vector<AblationPoint> points);

struct AblationResult {
  std::vector<AblationPoint> points;   // grid order
  std::vector<AblationPoint> summary;  // sort_by_auc(points)
  std::size_t failures = 0;
};

// Runs every grid point; reports go to <work>/ablation/<label>/report.json
// and the ranked summary to <work>/ablation_summary.json. External scorers
// read <work>/ablation/<label>/scores.jsonl (crops.jsonl is written there
// for the scorer to consume).
AblationResult cmd_ablate(const std::filesystem::path& manifest_path,
                          const WorkPaths& work, const RunOptions& base,
                          const AblationGrid& grid, std::size_t cache_bytes,
                          std::ostream& out);

}  // namespace texturecrop
