// Batch CLI: crop, score, aggregate, evaluate, run, ablate.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "texturecrop/error.h"
#include "texturecrop/pipeline.h"

namespace tc = texturecrop;

namespace {

struct Flags {
  std::string manifest;
  std::string work = "work";
  std::string method = "texturecrop";
  int window = 224;
  int stride = 200;
  double sd_threshold = 0.1;
  std::string metric = "sd";
  std::string part = "top";
  int n_crops = 15;
  int max_side = tc::kDefaultMaxSide;
  std::string agg = "average";
  double interval = 0.1;
  std::string scorer = "texture_proxy:2";
  double threshold = 0.5;
  int jobs = 1;
  bool export_crops = false;
  std::string exec;
  std::vector<int> grid_windows, grid_strides, grid_counts;
  std::vector<double> grid_thresholds;
  std::size_t cache_mb = 1024;
};

void add_cropper_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--method", f.method,
                  "texturecrop|slidecrop|fixedtexturecrop|centercrop|resize|tencrop")
      ->capture_default_str();
  cmd->add_option("--window", f.window, "crop window side in pixels")
      ->capture_default_str();
  cmd->add_option("--stride", f.stride, "sliding-window stride in pixels")
      ->capture_default_str();
  cmd->add_option("--sd-threshold", f.sd_threshold,
                  "minimum grayscale SD a crop must exceed")
      ->capture_default_str();
  cmd->add_option("--metric", f.metric, "sd|entropy|autocorrelation")
      ->capture_default_str();
  cmd->add_option("--part", f.part, "top|bottom|tbi")->capture_default_str();
  cmd->add_option("--n-crops", f.n_crops, "crops kept by fixedtexturecrop")
      ->capture_default_str();
  cmd->add_option("--max-side", f.max_side, "oversize pre-clamp per axis")
      ->capture_default_str();
}

void add_agg_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--agg", f.agg, "average|majority|max|median|weighted")
      ->capture_default_str();
  cmd->add_option("--interval", f.interval, "weighted-average interval length")
      ->capture_default_str();
}

void add_scorer_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--scorer", f.scorer,
                  "constant:<c> | texture_proxy:<scale> | sidecar:<file> | "
                  "external[:<file>]")
      ->capture_default_str();
}

tc::RunOptions to_options(const Flags& f) {
  tc::RunOptions o;
  auto method = tc::parse_crop_method(f.method);
  if (!method) throw tc::InvalidArgument("unknown --method '" + f.method + "'");
  auto metric = tc::parse_metric_kind(f.metric);
  if (!metric) throw tc::InvalidArgument("unknown --metric '" + f.metric + "'");
  auto part = tc::parse_selection_part(f.part);
  if (!part) throw tc::InvalidArgument("unknown --part '" + f.part + "'");
  auto agg = tc::parse_aggregation_kind(f.agg);
  if (!agg) throw tc::InvalidArgument("unknown --agg '" + f.agg + "'");

  o.cropper.method = *method;
  o.cropper.window = f.window;
  o.cropper.stride = f.stride;
  o.cropper.sd_threshold = f.sd_threshold;
  o.cropper.metric = *metric;
  o.cropper.part = *part;
  o.cropper.count = f.n_crops;
  o.cropper.max_side = f.max_side;
  o.cropper.validate();
  o.aggregation = {*agg, f.interval};
  o.scorer = tc::parse_scorer_spec(f.scorer);
  o.threshold = f.threshold;
  o.jobs = f.jobs;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Texture-filtered cropping and evaluation for synthetic image detection"};
  app.require_subcommand(1);
  Flags f;

  auto* crop = app.add_subcommand("crop", "plan crops for every dataset image");
  auto* score = app.add_subcommand("score", "score planned crops");
  auto* aggregate = app.add_subcommand("aggregate", "fuse crop scores per image");
  auto* evaluate = app.add_subcommand("evaluate", "compute BA/AP/AUC per subset");
  auto* run = app.add_subcommand("run", "crop, score, aggregate and evaluate");
  auto* ablate = app.add_subcommand("ablate", "evaluate a grid of cropper settings");

  for (auto* cmd : {crop, score, evaluate, run, ablate}) {
    cmd->add_option("--manifest", f.manifest, "dataset manifest (CSV or JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
  }
  for (auto* cmd : {crop, score, aggregate, evaluate, run, ablate}) {
    cmd->add_option("--work", f.work, "work directory")->capture_default_str();
  }
  for (auto* cmd : {crop, score, run, ablate}) {
    cmd->add_option("--jobs", f.jobs, "parallel images")->capture_default_str();
  }
  for (auto* cmd : {crop, run, ablate}) add_cropper_flags(cmd, f);
  for (auto* cmd : {aggregate, run, ablate}) add_agg_flags(cmd, f);
  for (auto* cmd : {score, run, ablate}) add_scorer_flags(cmd, f);
  for (auto* cmd : {evaluate, run, ablate}) {
    cmd->add_option("--threshold", f.threshold, "balanced-accuracy decision threshold")
        ->capture_default_str();
  }
  for (auto* cmd : {crop, run}) {
    cmd->add_flag("--export-crops", f.export_crops, "write <work>/crops/<crop_id>.png");
  }
  score->add_option("--exec", f.exec,
                    "external scorer command; {work} expands to the work directory");
  ablate->add_option("--grid-windows", f.grid_windows, "window sizes, comma separated")
      ->delimiter(',');
  ablate->add_option("--grid-strides", f.grid_strides, "strides, comma separated")
      ->delimiter(',');
  ablate->add_option("--grid-thresholds", f.grid_thresholds, "SD thresholds, comma separated")
      ->delimiter(',');
  ablate->add_option("--grid-n-crops", f.grid_counts, "fixedtexturecrop counts, comma separated")
      ->delimiter(',');
  ablate->add_option("--cache-mb", f.cache_mb, "decoded-image cache budget")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const tc::RunOptions opts = to_options(f);
    const tc::WorkPaths work{f.work};
    std::size_t failures = 0;
    if (crop->parsed()) {
      failures = tc::cmd_crop(f.manifest, work, opts, f.export_crops, std::cerr);
    } else if (score->parsed()) {
      failures = tc::cmd_score(f.manifest, work, opts, f.exec, std::cerr);
    } else if (aggregate->parsed()) {
      failures = tc::cmd_aggregate(work, opts.aggregation, std::cerr);
    } else if (evaluate->parsed()) {
      failures = tc::cmd_evaluate(f.manifest, work, opts.threshold, std::cout);
    } else if (run->parsed()) {
      if (opts.scorer.kind == tc::ScorerSpec::Kind::External) {
        throw tc::InvalidArgument(
            "run needs a built-in scorer; use crop/score/aggregate/evaluate for "
            "external scorers");
      }
      failures += tc::cmd_crop(f.manifest, work, opts, f.export_crops, std::cerr);
      failures += tc::cmd_score(f.manifest, work, opts, "", std::cerr);
      failures += tc::cmd_aggregate(work, opts.aggregation, std::cerr);
      // Skipped images have no score; evaluate what made it through.
      const auto manifest = tc::read_dataset_manifest(f.manifest);
      const auto aggregated = tc::read_aggregated_manifest(work.aggregated());
      auto report = tc::evaluate(tc::restrict_manifest(manifest, aggregated),
                                 aggregated, opts.threshold);
      report.config = tc::config_json(opts);
      std::ofstream(work.report()) << tc::to_json(report).dump(2) << '\n';
      tc::print_report(std::cout, report);
    } else if (ablate->parsed()) {
      const tc::AblationGrid grid{f.grid_windows, f.grid_strides,
                                  f.grid_thresholds, f.grid_counts};
      failures = tc::cmd_ablate(f.manifest, work, opts, grid,
                                f.cache_mb * 1024 * 1024, std::cout)
                     .failures;
    }
    if (failures != 0) {
      std::cerr << failures << " item(s) failed\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
