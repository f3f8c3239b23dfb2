// Copyright 2026 The segvote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "segvote/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "segvote/analysis.hpp"
#include "segvote/dataset.hpp"
#include "segvote/ensemble.hpp"
#include "segvote/error.hpp"
#include "segvote/harness.hpp"
#include "segvote/json_io.hpp"
#include "segvote/mask.hpp"
#include "segvote/metrics.hpp"
#include "segvote/noise.hpp"
#include "segvote/random.hpp"
#include "segvote/synth.hpp"
#include "segvote/version.hpp"

namespace segvote {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fixed6(const std::optional<double>& v) { return v ? fixed6(*v) : "NA"; }

// Writes to the named file, or to `out` when the path is empty or "-".
void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create directory '" + dir.string() + "'");
}

std::optional<int> opt_classes(int k) { return k > 0 ? std::optional<int>(k) : std::nullopt; }

bool is_image_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  int verbosity = 0;

  void note(const std::string& msg) const {
    if (verbosity > 0) err << msg << "\n";
  }
};

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string pred, gt, out, format = "text";
  int num_classes = 0;
  std::vector<int> classes;
};

void add_score(CLI::App& app, ScoreArgs& a) {
  auto* sub = app.add_subcommand("score", "Score a prediction mask against ground truth (IoU / mIOU)");
  sub->add_option("--pred", a.pred, "Prediction mask (8-bit PNG)")->required();
  sub->add_option("--gt", a.gt, "Ground-truth mask (8-bit PNG)")->required();
  sub->add_option("--num-classes", a.num_classes, "Class count K (default: inferred from both masks)");
  sub->add_option("--classes", a.classes, "Average mIOU over these class ids only")->delimiter(',');
  sub->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--out", a.out, "Output file (default: stdout)");
}

void run_score(const ScoreArgs& a, const Context& ctx) {
  LabelMask pred = load_mask(a.pred, opt_classes(a.num_classes));
  LabelMask gt = load_mask(a.gt, opt_classes(a.num_classes));
  const int k = a.num_classes > 0 ? a.num_classes : std::max(pred.num_classes(), gt.num_classes());
  ConfusionMatrix m(k);
  m.accumulate(pred.with_num_classes(k), gt.with_num_classes(k));
  const IouBreakdown b = iou_breakdown(m, a.classes);
  std::ostringstream text;
  if (a.format == "json") {
    json j = to_json(b);
    j["confusion_matrix"] = to_json(m);
    text << j.dump(2) << "\n";
  } else {
    for (std::size_t c = 0; c < b.per_class.size(); ++c) {
      text << "class " << c << " iou " << fixed6(b.per_class[c]) << "\n";
    }
    text << "miou " << fixed6(b.miou) << "\n";
  }
  write_output(a.out, text.str(), ctx.out);
}

// ---- ensemble --------------------------------------------------------------

struct EnsembleArgs {
  std::vector<std::string> masks, names;
  std::vector<double> weights;
  std::string config, out, margin_out;
  int num_classes = 0;
};

void add_ensemble(CLI::App& app, EnsembleArgs& a) {
  auto* sub = app.add_subcommand("ensemble", "Fuse prediction masks by pixel-wise majority vote");
  sub->add_option("--masks", a.masks, "Member masks, in priority order (first wins ties)")
      ->required()
      ->expected(2, -1);
  sub->add_option("--names", a.names, "Member names (default: m0, m1, ...)");
  sub->add_option("--weights", a.weights, "Positive vote weight per member (default: 1)");
  sub->add_option("--config", a.config,
                  "JSON file {\"members\": [...], \"weights\": [...]} naming the members");
  sub->add_option("--num-classes", a.num_classes, "Class count K (default: inferred)");
  sub->add_option("--out", a.out, "Fused mask PNG")->required();
  sub->add_option("--margin-out", a.margin_out, "Optional CSV of per-pixel vote margins");
}

void run_ensemble(const EnsembleArgs& a, const Context& ctx) {
  std::vector<std::string> names = a.names;
  std::vector<double> weights = a.weights;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw Error("cannot open ensemble config '" + a.config + "'");
    json j;
    try {
      j = json::parse(in);
      names = j.at("members").get<std::vector<std::string>>();
      if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw Error("ensemble config: " + std::string(e.what()));
    }
  }
  if (names.empty()) {
    for (std::size_t i = 0; i < a.masks.size(); ++i) names.push_back("m" + std::to_string(i));
  }
  if (weights.empty()) weights.assign(names.size(), 1.0);
  const EnsembleConfig config(names, weights);

  std::vector<LabelMask> masks;
  for (const auto& p : a.masks) masks.push_back(load_mask(p, opt_classes(a.num_classes)));
  if (a.num_classes == 0) {
    int k = 1;
    for (const auto& m : masks) k = std::max(k, m.num_classes());
    for (auto& m : masks) m = m.with_num_classes(k);
  }
  save_mask(majority_vote(masks, config), a.out);
  ctx.note("wrote " + a.out);
  if (!a.margin_out.empty()) {
    const MarginRaster margin = vote_margin(masks, config);
    std::ostringstream csv;
    for (int y = 0; y < margin.height; ++y) {
      for (int x = 0; x < margin.width; ++x) {
        if (x > 0) csv << ",";
        csv << margin.values[static_cast<std::size_t>(y) * margin.width + x];
      }
      csv << "\n";
    }
    write_output(a.margin_out, csv.str(), ctx.out);
  }
}

// ---- noise -----------------------------------------------------------------

struct NoiseArgs {
  std::string image, input_dir, family, level, out;
  std::optional<double> sigma;
  std::uint64_t seed = 0;
  int depth = 8;
};

void add_noise(CLI::App& app, NoiseArgs& a) {
  auto* sub = app.add_subcommand("noise", "Perturb an image (or a directory of images) with noise");
  auto* image = sub->add_option("--image", a.image, "Input image (PNG, PGM or PPM)");
  auto* dir = sub->add_option("--input-dir", a.input_dir, "Batch mode: perturb every image here");
  image->excludes(dir);
  sub->add_option("--family", a.family, "gaussian, salt_pepper or speckle")->required();
  auto* level = sub->add_option("--level", a.level, "low (0.01), medium (0.05) or high (0.1)");
  auto* sigma = sub->add_option("--sigma", a.sigma,
                                "Explicit sigma (salt_pepper: corrupted-pixel fraction)");
  level->excludes(sigma);
  sub->add_option("--seed", a.seed, "Random seed");
  sub->add_option("--depth", a.depth, "Output bit depth")->check(CLI::IsMember({8, 16}));
  sub->add_option("--out", a.out, "Output image, or output directory in batch mode")->required();
}

NoiseSpec noise_spec(const NoiseArgs& a, std::uint64_t seed) {
  const NoiseFamily family = parse_family(a.family);
  if (!a.level.empty()) return NoiseSpec::at_level(family, parse_level(a.level), seed);
  if (!a.sigma) throw Error("noise needs --level or --sigma");
  return NoiseSpec::with_sigma(family, *a.sigma, seed);
}

void run_noise(const NoiseArgs& a, const Context& ctx) {
  if (a.image.empty() == a.input_dir.empty()) throw Error("noise needs exactly one of --image or --input-dir");
  if (!a.image.empty()) {
    save_image(apply_noise(load_image(a.image), noise_spec(a, a.seed)), a.out, a.depth);
    ctx.note("wrote " + a.out);
    return;
  }
  std::vector<fs::path> inputs;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(a.input_dir, ec)) {
    if (e.is_regular_file() && is_image_file(e.path())) inputs.push_back(e.path());
  }
  if (ec) throw Error("cannot read directory '" + a.input_dir + "'");
  std::sort(inputs.begin(), inputs.end());
  ensure_dir(a.out);
  for (const auto& p : inputs) {
    // Per-file seed so batch output does not depend on directory listing order.
    const auto spec = noise_spec(a, derive_key(a.seed, hash_name(p.filename().string())));
    const fs::path dest = fs::path(a.out) / p.filename();
    save_image(apply_noise(load_image(p), spec), dest, a.depth);
    ctx.note("wrote " + dest.string());
  }
}

// ---- corrupt ---------------------------------------------------------------

struct CorruptArgs {
  std::string gt, mode = "iid", out;
  double p = 0.0;
  double magnitude = 1.0;
  int target_class = 1;
  int num_classes = 0;
  std::uint64_t seed = 0;
};

void add_corrupt(CLI::App& app, CorruptArgs& a) {
  auto* sub = app.add_subcommand("corrupt", "Synthesize a degraded prediction from ground truth");
  sub->add_option("--gt", a.gt, "Ground-truth mask")->required();
  sub->add_option("--mode", a.mode, "iid, dilate, erode or drop_component");
  sub->add_option("--p", a.p, "iid flip probability in [0, 1)");
  sub->add_option("--magnitude", a.magnitude,
                  "Radius (dilate/erode) or component fraction (drop_component)");
  sub->add_option("--target-class", a.target_class, "Class affected by structured modes");
  sub->add_option("--num-classes", a.num_classes, "Class count K (default: inferred)");
  sub->add_option("--seed", a.seed, "Random seed");
  sub->add_option("--out", a.out, "Output mask PNG")->required();
}

void run_corrupt(const CorruptArgs& a, const Context& ctx) {
  const LabelMask gt = load_mask(a.gt, opt_classes(a.num_classes));
  const Structure mode = parse_structure(a.mode);
  const LabelMask out = mode == Structure::kIid
                            ? corrupt_iid(gt, a.p, a.seed)
                            : corrupt_structured(gt, mode, a.magnitude, a.target_class, a.seed);
  save_mask(out, a.out);
  ctx.note("wrote " + a.out);
}

// ---- split / validate-manifest ---------------------------------------------

struct SplitArgs {
  std::string manifest, out;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

void add_split(CLI::App& app, SplitArgs& a) {
  auto* sub = app.add_subcommand("split", "Seeded train/test split of a manifest");
  sub->add_option("--manifest", a.manifest, "Dataset manifest JSON")->required();
  sub->add_option("--test-fraction", a.test_fraction, "Share of entries held out for testing");
  sub->add_option("--seed", a.seed, "Random seed");
  sub->add_option("--out", a.out, "Output JSON (default: stdout)");
}

void run_split(const SplitArgs& a, const Context& ctx) {
  const DatasetManifest m = load_manifest(a.manifest);
  const SplitResult s = split(m, a.test_fraction, a.seed);
  const json j{{"seed", s.seed},
               {"test_fraction", a.test_fraction},
               {"train", s.train_ids},
               {"test", s.test_ids}};
  write_output(a.out, j.dump(2) + "\n", ctx.out);
  ctx.note(std::to_string(s.train_ids.size()) + " train / " + std::to_string(s.test_ids.size()) +
           " test");
}

struct ValidateArgs {
  std::string manifest;
  bool deep = false;
};

void add_validate(CLI::App& app, ValidateArgs& a) {
  auto* sub = app.add_subcommand("validate-manifest", "Check a manifest's schema and file references");
  sub->add_option("--manifest", a.manifest, "Dataset manifest JSON")->required();
  sub->add_flag("--deep", a.deep, "Also decode every ground-truth and prediction mask");
}

void run_validate(const ValidateArgs& a, const Context& ctx) {
  const DatasetManifest m = load_manifest(a.manifest);
  if (a.deep) {
    for (const auto& e : m.entries) {
      try {
        const LabelMask gt = load_mask(e.gt_mask, m.num_classes);
        for (const auto& [name, p] : e.predictions) {
          const LabelMask pred = load_mask(p, m.num_classes);
          if (!pred.same_shape(gt)) throw Error("prediction '" + name + "' differs in size from gt");
        }
      } catch (const Error& err) {
        throw Error("entry '" + e.id + "': " + err.what());
      }
    }
  }
  ctx.out << "ok " << m.entries.size() << " entries\n";
}

// ---- augment ---------------------------------------------------------------

struct AugmentArgs {
  std::string image, mask, out_image, out_mask;
  double prob = 0.2;
  int num_classes = 0;
  std::uint64_t seed = 0;
};

void add_augment(CLI::App& app, AugmentArgs& a) {
  auto* sub = app.add_subcommand("augment", "Randomly flip, rotate or scale an image/mask pair");
  sub->add_option("--image", a.image, "Input image")->required();
  sub->add_option("--mask", a.mask, "Input mask")->required();
  sub->add_option("--prob", a.prob, "Probability that a transform is applied");
  sub->add_option("--num-classes", a.num_classes, "Class count K (default: inferred)");
  sub->add_option("--seed", a.seed, "Random seed");
  sub->add_option("--out-image", a.out_image, "Output image")->required();
  sub->add_option("--out-mask", a.out_mask, "Output mask")->required();
}

void run_augment(const AugmentArgs& a, const Context& ctx) {
  const Augmented r =
      augment(load_image(a.image), load_mask(a.mask, opt_classes(a.num_classes)), a.prob, a.seed);
  save_image(r.image, a.out_image);
  save_mask(r.mask, a.out_mask);
  ctx.out << json{{"applied", r.applied.to_string()}}.dump() << "\n";
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string config, out, format = "csv", profile;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* sub = app.add_subcommand("sweep", "Run the noise-robustness sweep and emit report tables");
  sub->add_option("--config", a.config, "Sweep config JSON")->required();
  sub->add_option("--out", a.out,
                  "Output directory for report, summary and profile (default: report to stdout)");
  sub->add_option("--format", a.format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "markdown"}));
  sub->add_option("--seed", a.seed, "Override the config's master_seed");
  sub->add_option("--workers", a.workers, "Override the config's worker_count");
}

void run_sweep_cmd(const SweepArgs& a, const Context& ctx) {
  SweepConfig cfg = load_sweep_config(a.config);
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.workers) cfg.worker_count = *a.workers;
  const ReportFormat fmt = parse_report_format(a.format);
  const SweepReport report = run_sweep(cfg);
  if (a.out.empty()) {
    ctx.out << emit_report(report, fmt);
    return;
  }
  const fs::path dir(a.out);
  ensure_dir(dir);
  const std::string ext(extension(fmt));
  write_output((dir / ("report." + ext)).string(), emit_report(report, fmt), ctx.out);
  write_output((dir / ("summary." + ext)).string(),
               render_summary(summarize_ensemble(report), fmt), ctx.out);
  if (!cfg.noise_families.empty() && cfg.levels.size() == std::size(kAllLevels)) {
    write_output((dir / "profile.csv").string(), render_profile(degradation_profile(report)),
                 ctx.out);
  }
  ctx.note("wrote report to " + dir.string());
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  std::string pred, gt, id, manifest, pred_set, out;
  int class_id = 1;
  ErrorThresholds thresholds;
};

void add_analyze(CLI::App& app, AnalyzeArgs& a) {
  auto* sub = app.add_subcommand("analyze", "Classify segmentation failures of one class");
  auto* pred = sub->add_option("--pred", a.pred, "Single-pair mode: prediction mask");
  auto* gt = sub->add_option("--gt", a.gt, "Single-pair mode: ground-truth mask");
  sub->add_option("--id", a.id, "Entry id recorded in the single-pair report");
  auto* manifest = sub->add_option("--manifest", a.manifest, "Batch mode: dataset manifest");
  auto* set = sub->add_option("--pred-set", a.pred_set, "Batch mode: prediction set key");
  pred->needs(gt);
  gt->needs(pred);
  manifest->needs(set);
  set->needs(manifest);
  manifest->excludes(pred);
  sub->add_option("--class", a.class_id, "Class id to analyze");
  sub->add_option("--recall-hi", a.thresholds.recall_hi, "Minimum recall for over-segmentation");
  sub->add_option("--recall-lo", a.thresholds.recall_lo, "Recall below this is under-segmentation");
  sub->add_option("--epsilon", a.thresholds.epsilon, "Tolerance for an ideal segmentation");
  sub->add_option("--out", a.out,
                  "Single-pair: output JSON file; batch: output directory (default: stdout)");
}

void run_analyze(const AnalyzeArgs& a, const Context& ctx) {
  if (!a.pred.empty()) {
    const ErrorReport r =
        classify_errors(load_mask(a.pred), load_mask(a.gt), a.class_id, a.thresholds, a.id);
    write_output(a.out, to_json(r).dump(2) + "\n", ctx.out);
    return;
  }
  if (a.manifest.empty()) throw Error("analyze needs --pred/--gt or --manifest/--pred-set");
  const DatasetManifest m = load_manifest(a.manifest);
  json reports = json::array();
  std::map<std::string, int> histogram;
  for (Verdict v : {Verdict::kOverSegmentation, Verdict::kUnderSegmentation,
                    Verdict::kRegionExclusion, Verdict::kIdeal}) {
    histogram[std::string(to_string(v))] = 0;
  }
  histogram["unclassified"] = 0;
  for (const auto& e : m.entries) {
    auto it = e.predictions.find(a.pred_set);
    if (it == e.predictions.end()) {
      throw Error("entry '" + e.id + "' has no prediction set '" + a.pred_set + "'");
    }
    const ErrorReport r = classify_errors(load_mask(it->second, m.num_classes),
                                          load_mask(e.gt_mask, m.num_classes), a.class_id,
                                          a.thresholds, e.id);
    for (Verdict v : r.verdicts) ++histogram[std::string(to_string(v))];
    if (r.verdicts.empty()) ++histogram["unclassified"];
    reports.push_back(to_json(r));
  }
  std::ostringstream csv;
  csv << "verdict,count\n";
  for (const char* v : {"over_segmentation", "under_segmentation", "region_exclusion", "ideal",
                        "unclassified"}) {
    csv << v << "," << histogram[v] << "\n";
  }
  if (a.out.empty()) {
    ctx.out << reports.dump(2) << "\n" << csv.str();
    return;
  }
  ensure_dir(a.out);
  write_output((fs::path(a.out) / "reports.json").string(), reports.dump(2) + "\n", ctx.out);
  write_output((fs::path(a.out) / "verdicts.csv").string(), csv.str(), ctx.out);
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Majority-vote ensembling, mIOU scoring and noise-robustness sweeps for "
               "semantic segmentation masks.",
               "segvote"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Context ctx{out, err};
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Print progress diagnostics to stderr")->multi_option_policy(CLI::MultiOptionPolicy::Sum);
  app.fallthrough();

  ScoreArgs score;
  EnsembleArgs ens;
  NoiseArgs noise;
  CorruptArgs corrupt;
  SplitArgs split_args;
  AugmentArgs aug;
  ValidateArgs validate;
  SweepArgs sweep;
  AnalyzeArgs analyze;
  add_score(app, score);
  add_ensemble(app, ens);
  add_noise(app, noise);
  add_corrupt(app, corrupt);
  add_split(app, split_args);
  add_augment(app, aug);
  add_validate(app, validate);
  add_sweep(app, sweep);
  add_analyze(app, analyze);

  std::vector<std::string> argv_storage{"segvote"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }
  ctx.verbosity = verbosity;

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string& name = sub->get_name();
    if (name == "score") run_score(score, ctx);
    else if (name == "ensemble") run_ensemble(ens, ctx);
    else if (name == "noise") run_noise(noise, ctx);
    else if (name == "corrupt") run_corrupt(corrupt, ctx);
    else if (name == "split") run_split(split_args, ctx);
    else if (name == "augment") run_augment(aug, ctx);
    else if (name == "validate-manifest") run_validate(validate, ctx);
    else if (name == "sweep") run_sweep_cmd(sweep, ctx);
    else if (name == "analyze") run_analyze(analyze, ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

}  // namespace segvote
