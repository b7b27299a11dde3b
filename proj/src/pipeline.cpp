#include "texturecrop/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "texturecrop/error.h"
#include "texturecrop/image_io.h"

namespace texturecrop {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw FormatError("cannot write " + path.string());
}

nlohmann::ordered_json read_json_or_empty(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return nlohmann::ordered_json::object();
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void update_run_json(const WorkPaths& work, const std::string& key,
                     const nlohmann::ordered_json& value) {
  auto j = read_json_or_empty(work.run());
  j[key] = value;
  write_text(work.run(), j.dump(2) + "\n");
}

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void log_failures(std::ostream& log, const std::vector<ItemFailure>& failures) {
  for (const auto& f : failures) log << "error: " << f.item << ": " << f.message << '\n';
}

std::unordered_map<std::string, std::size_t> index_by_image_id(
    const DatasetManifest& manifest) {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    out.emplace(manifest.entries[i].image_id, i);
  }
  return out;
}

// Rebuilds a CropStage from a crop manifest read back from disk.
CropStage stage_from_sets(const DatasetManifest& manifest,
                          std::vector<CropSet> sets) {
  const auto ids = index_by_image_id(manifest);
  CropStage stage;
  for (auto& s : sets) {
    const auto it = ids.find(s.image_id);
    if (it == ids.end()) {
      stage.failures.push_back({s.image_id, "image_id not present in dataset manifest"});
      continue;
    }
    stage.entry_index.push_back(it->second);
    stage.sets.push_back(std::move(s));
  }
  return stage;
}

struct ScoredStage {
  ScoreStage stage;
  std::vector<bool> ok;
};

ScoredStage score_stage_impl(const DatasetManifest& manifest,
                             const CropStage& crops, const Scorer& scorer,
                             int jobs, const ImageLoader& load) {
  const std::size_t n = crops.sets.size();
  std::vector<std::vector<ScoreRecord>> per_set(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t k) {
    const auto& entry = manifest.entries[crops.entry_index[k]];
    try {
      if (scorer.needs_pixels()) {
        const auto img = load(manifest.resolve(entry));
        per_set[k] = score_crops(scorer, crops.sets[k], *img);
      } else {
        per_set[k] = score_crops(scorer, crops.sets[k]);
      }
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });
  ScoredStage out;
  out.ok.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (!errors[k].empty()) {
      out.stage.failures.push_back(
          {manifest.entries[crops.entry_index[k]].path, errors[k]});
      continue;
    }
    out.ok[k] = true;
    for (auto& r : per_set[k]) out.stage.scores.push_back(std::move(r));
  }
  return out;
}

}  // namespace

nlohmann::ordered_json config_json(const RunOptions& opts) {
  nlohmann::ordered_json j;
  const auto& c = opts.cropper;
  j["method"] = std::string(to_string(c.method));
  j["window"] = c.window;
  j["stride"] = c.stride;
  j["sd_threshold"] = c.sd_threshold;
  j["metric"] = std::string(to_string(c.metric));
  j["part"] = std::string(to_string(c.part));
  j["n_crops"] = c.count;
  j["max_side"] = c.max_side;
  j["aggregation"] = describe(opts.aggregation);
  j["scorer"] = describe(opts.scorer);
  return j;
}

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::shared_ptr<const PixelImage> ImageCache::get(const fs::path& path) {
  const std::string key = path.string();
  {
    std::lock_guard lock(mu_);
    if (auto it = images_.find(key); it != images_.end()) return it->second;
  }
  auto img = std::make_shared<const PixelImage>(read_image(path));
  const std::size_t bytes = img->data().size_bytes();
  std::lock_guard lock(mu_);
  if (used_ + bytes <= budget_) {
    auto [it, inserted] = images_.emplace(key, img);
    if (inserted) used_ += bytes;
    return it->second;
  }
  return img;
}

ImageLoader disk_loader() {
  return [](const fs::path& p) {
    return std::make_shared<const PixelImage>(read_image(p));
  };
}

ImageLoader cached_loader(ImageCache& cache) {
  return [&cache](const fs::path& p) { return cache.get(p); };
}

CropStage crop_stage(const DatasetManifest& manifest, const CropperConfig& cfg,
                     int jobs, const ImageLoader& load,
                     const fs::path* export_dir) {
  cfg.validate();
  const std::size_t n = manifest.entries.size();
  std::vector<std::optional<CropSet>> sets(n);
  std::vector<std::string> errors(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const auto& entry = manifest.entries[i];
    try {
      const auto img = load(manifest.resolve(entry));
      CropSet set = plan_crops(*img, cfg, entry.image_id);
      if (export_dir != nullptr) {
        for (const auto& rec : set.records) {
          write_png(*export_dir / (rec.crop_id + ".png"), extract_pixels(*img, rec));
        }
      }
      sets[i] = std::move(set);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  CropStage stage;
  for (std::size_t i = 0; i < n; ++i) {
    if (sets[i]) {
      stage.entry_index.push_back(i);
      stage.sets.push_back(std::move(*sets[i]));
    } else {
      stage.failures.push_back({manifest.entries[i].path, errors[i]});
    }
  }
  return stage;
}

ScoreStage score_stage(const DatasetManifest& manifest, const CropStage& crops,
                       const Scorer& scorer, int jobs, const ImageLoader& load) {
  return score_stage_impl(manifest, crops, scorer, jobs, load).stage;
}

std::vector<AggregatedScore> aggregate_sets(std::span<const CropSet> sets,
                                            std::span<const ScoreRecord> scores,
                                            const AggregationMethod& method) {
  validate_scores(scores, sets);
  std::unordered_map<std::string_view, double> by_crop;
  for (const auto& s : scores) by_crop.emplace(s.crop_id, s.score);
  std::vector<AggregatedScore> out;
  out.reserve(sets.size());
  std::vector<double> values;
  for (const auto& set : sets) {
    values.clear();
    for (const auto& rec : set.records) values.push_back(by_crop.at(rec.crop_id));
    if (values.empty()) {
      throw EmptyInput("image '" + set.image_id + "' has no crops to aggregate");
    }
    out.push_back({set.image_id, aggregate(values, method), values.size(),
                   describe(method)});
  }
  return out;
}

DatasetManifest restrict_manifest(const DatasetManifest& manifest,
                                  std::span<const AggregatedScore> aggregated) {
  std::unordered_set<std::string_view> ids;
  for (const auto& a : aggregated) ids.insert(a.image_id);
  DatasetManifest out;
  out.base_dir = manifest.base_dir;
  for (const auto& e : manifest.entries) {
    if (ids.contains(e.image_id)) out.entries.push_back(e);
  }
  return out;
}

PipelineResult run_pipeline(const DatasetManifest& manifest,
                            const RunOptions& opts, const ImageLoader& load) {
  PipelineResult result;
  const Scorer scorer(opts.scorer);
  result.crops = crop_stage(manifest, opts.cropper, opts.jobs, load);
  auto scored = score_stage_impl(manifest, result.crops, scorer, opts.jobs, load);
  result.failures = result.crops.failures;
  result.failures.insert(result.failures.end(), scored.stage.failures.begin(),
                         scored.stage.failures.end());

  std::vector<CropSet> ok_sets;
  for (std::size_t k = 0; k < result.crops.sets.size(); ++k) {
    if (scored.ok[k]) ok_sets.push_back(result.crops.sets[k]);
  }
  result.scores = std::move(scored.stage.scores);
  result.aggregated = aggregate_sets(ok_sets, result.scores, opts.aggregation);
  result.report = evaluate(restrict_manifest(manifest, result.aggregated),
                           result.aggregated, opts.threshold);
  result.report.config = config_json(opts);
  return result;
}

std::size_t cmd_crop(const fs::path& manifest_path, const WorkPaths& work,
                     const RunOptions& opts, bool export_crops, std::ostream& log) {
  const auto manifest = read_dataset_manifest(manifest_path);
  fs::create_directories(work.root);
  std::optional<fs::path> export_dir;
  if (export_crops) {
    fs::remove_all(work.crops_dir());
    fs::create_directories(work.crops_dir());
    export_dir = work.crops_dir();
  }
  const auto stage = crop_stage(manifest, opts.cropper, opts.jobs, disk_loader(),
                                export_dir ? &*export_dir : nullptr);
  {
    auto out = open_output(work.crops());
    write_crop_manifest(out, stage.sets);
  }
  auto run = read_json_or_empty(work.run());
  run["cropper"] = config_json(opts);
  run["cropper"].erase("aggregation");
  run["cropper"].erase("scorer");
  write_text(work.run(), run.dump(2) + "\n");

  std::size_t crops = 0;
  for (const auto& s : stage.sets) crops += s.records.size();
  log << "planned " << crops << " crops for " << stage.sets.size() << " images";
  if (!stage.failures.empty()) log << " (" << stage.failures.size() << " skipped)";
  log << '\n';
  log_failures(log, stage.failures);
  return stage.failures.size();
}

std::size_t cmd_score(const fs::path& manifest_path, const WorkPaths& work,
                      const RunOptions& opts, const std::string& exec_command,
                      std::ostream& log) {
  const auto manifest = read_dataset_manifest(manifest_path);
  auto stage = stage_from_sets(manifest, read_crop_manifest(work.crops()));
  std::vector<ItemFailure> failures = stage.failures;

  if (opts.scorer.kind == ScorerSpec::Kind::External) {
    if (!exec_command.empty()) {
      std::string cmd = exec_command;
      const std::string root = work.root.string();
      for (auto pos = cmd.find("{work}"); pos != std::string::npos;
           pos = cmd.find("{work}", pos + root.size())) {
        cmd.replace(pos, 6, root);
      }
      log << "running external scorer: " << cmd << '\n';
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        throw ScorerFailure("external scorer exited with status " + std::to_string(rc));
      }
    }
    const fs::path source = opts.scorer.path.empty() ? work.scores() : opts.scorer.path;
    const auto scores = read_score_manifest(source);
    validate_scores(scores, stage.sets);
    if (fs::weakly_canonical(source) != fs::weakly_canonical(work.scores())) {
      auto out = open_output(work.scores());
      write_score_manifest(out, scores);
    }
    log << "imported " << scores.size() << " scores from " << source.string() << '\n';
  } else {
    const Scorer scorer(opts.scorer);
    const auto scored = score_stage(manifest, stage, scorer, opts.jobs, disk_loader());
    auto out = open_output(work.scores());
    write_score_manifest(out, scored.scores);
    failures.insert(failures.end(), scored.failures.begin(), scored.failures.end());
    log << "scored " << scored.scores.size() << " crops with "
        << describe(opts.scorer) << '\n';
  }
  update_run_json(work, "scorer", describe(opts.scorer));
  log_failures(log, failures);
  return failures.size();
}

std::size_t cmd_aggregate(const WorkPaths& work, const AggregationMethod& method,
                          std::ostream& log) {
  const auto sets = read_crop_manifest(work.crops());
  const auto scores = read_score_manifest(work.scores());
  const auto aggregated = aggregate_sets(sets, scores, method);
  auto out = open_output(work.aggregated());
  write_aggregated_manifest(out, aggregated);
  update_run_json(work, "aggregation", describe(method));
  log << "aggregated " << aggregated.size() << " images with " << describe(method)
      << '\n';
  return 0;
}

std::size_t cmd_evaluate(const fs::path& manifest_path, const WorkPaths& work,
                         double threshold, std::ostream& out) {
  const auto manifest = read_dataset_manifest(manifest_path);
  const auto aggregated = read_aggregated_manifest(work.aggregated());
  EvalReport report = evaluate(manifest, aggregated, threshold);
  report.config = read_json_or_empty(work.run());
  write_text(work.report(), to_json(report).dump(2) + "\n");
  print_report(out, report);
  return 0;
}

std::vector<AblationPoint> expand_grid(const CropperConfig& base,
                                       const AblationGrid& grid) {
  auto or_base = [](const auto& axis, auto value) {
    using T = std::decay_t<decltype(value)>;
    return axis.empty() ? std::vector<T>{value}
                        : std::vector<T>(axis.begin(), axis.end());
  };
  std::vector<AblationPoint> points;
  for (int w : or_base(grid.windows, base.window)) {
    for (int s : or_base(grid.strides, base.stride)) {
      for (double t : or_base(grid.thresholds, base.sd_threshold)) {
        for (int n : or_base(grid.counts, base.count)) {
          AblationPoint p;
          p.cropper = base;
          p.cropper.window = w;
          p.cropper.stride = s;
          p.cropper.sd_threshold = t;
          p.cropper.count = n;
          p.label = "w" + std::to_string(w) + "_s" + std::to_string(s) + "_t" +
                    format_number(t) + "_n" + std::to_string(n);
          points.push_back(std::move(p));
        }
      }
    }
  }
  return points;
}

std::vector<AblationPoint> sort_by_auc(std::vector<AblationPoint> points) {
  std::stable_sort(points.begin(), points.end(),
                   [](const AblationPoint& a, const AblationPoint& b) {
                     if (a.report.has_value() != b.report.has_value()) {
                       return a.report.has_value();
                     }
                     if (!a.report) return false;
                     return a.report->overall.auc > b.report->overall.auc;
                   });
  return points;
}

AblationResult cmd_ablate(const fs::path& manifest_path, const WorkPaths& work,
                          const RunOptions& base, const AblationGrid& grid,
                          std::size_t cache_bytes, std::ostream& out) {
  const auto manifest = read_dataset_manifest(manifest_path);
  ImageCache cache(cache_bytes);
  const ImageLoader load = cached_loader(cache);
  const bool external = base.scorer.kind == ScorerSpec::Kind::External;

  AblationResult result;
  result.points = expand_grid(base.cropper, grid);
  for (auto& point : result.points) {
    const fs::path dir = work.root / "ablation" / point.label;
    RunOptions opts = base;
    opts.cropper = point.cropper;
    try {
      fs::create_directories(dir);
      std::vector<ItemFailure> failures;
      EvalReport report;
      if (external) {
        const auto stage = crop_stage(manifest, opts.cropper, opts.jobs, load);
        failures = stage.failures;
        {
          auto crops_out = open_output(dir / "crops.jsonl");
          write_crop_manifest(crops_out, stage.sets);
        }
        const fs::path scores_path = dir / "scores.jsonl";
        if (!fs::exists(scores_path)) {
          throw ScorerFailure("no precomputed scores at " + scores_path.string());
        }
        const auto scores = read_score_manifest(scores_path);
        const auto aggregated = aggregate_sets(stage.sets, scores, opts.aggregation);
        report = evaluate(restrict_manifest(manifest, aggregated), aggregated,
                          opts.threshold);
        report.config = config_json(opts);
      } else {
        auto res = run_pipeline(manifest, opts, load);
        failures = std::move(res.failures);
        report = std::move(res.report);
      }
      write_text(dir / "report.json", to_json(report).dump(2) + "\n");
      if (!failures.empty()) {
        result.failures += failures.size();
        for (const auto& f : failures) {
          out << "error: " << point.label << ": " << f.item << ": " << f.message
              << '\n';
        }
      }
      point.report = std::move(report);
    } catch (const std::exception& e) {
      point.error = e.what();
      ++result.failures;
      out << "error: " << point.label << ": " << point.error << '\n';
    }
  }

  result.summary = sort_by_auc(result.points);
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  std::size_t label_width = 5;
  for (const auto& p : result.summary) {
    label_width = std::max(label_width, p.label.size());
  }
  out << std::left << std::setw(5) << "rank" << std::setw(static_cast<int>(label_width) + 2)
      << "point" << std::right << std::setw(8) << "AUC" << std::setw(8) << "AP"
      << std::setw(8) << "BA" << '\n';
  std::size_t rank = 0;
  for (const auto& p : result.summary) {
    ++rank;
    nlohmann::ordered_json j;
    j["rank"] = rank;
    j["label"] = p.label;
    j["window"] = p.cropper.window;
    j["stride"] = p.cropper.stride;
    j["sd_threshold"] = p.cropper.sd_threshold;
    j["n_crops"] = p.cropper.count;
    out << std::left << std::setw(5) << rank
        << std::setw(static_cast<int>(label_width) + 2) << p.label << std::right;
    if (p.report) {
      j["status"] = "ok";
      j["auc"] = p.report->overall.auc;
      j["ap"] = p.report->overall.ap;
      j["ba"] = p.report->overall.ba;
      out << std::fixed << std::setprecision(4) << std::setw(8)
          << p.report->overall.auc << std::setw(8) << p.report->overall.ap
          << std::setw(8) << p.report->overall.ba << '\n';
      out.unsetf(std::ios::floatfield);
    } else {
      j["status"] = "failed";
      j["error"] = p.error;
      out << "  failed: " << p.error << '\n';
    }
    summary.push_back(std::move(j));
  }
  fs::create_directories(work.root);
  write_text(work.root / "ablation_summary.json", summary.dump(2) + "\n");
  return result;
}

}  // namespace texturecrop
