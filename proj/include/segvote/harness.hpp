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


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segvote/dataset.hpp"
#include "segvote/ensemble.hpp"
#include "segvote/metrics.hpp"
#include "segvote/noise.hpp"
#include "segvote/synth.hpp"

namespace segvote {

/// A predictor in a sweep: synthetic (corrupted ground truth) when `synthetic`
/// is set, otherwise an external prediction set read from the manifest under
/// the key `name` (clean) or `name@family:level` (noisy cells).
struct SweepPredictor {
  std::string name;
  std::optional<PredictorSpec> synthetic;
};

struct SweepConfig {
  /// As written in the config; resolved against base_dir.
  std::string manifest;
  std::filesystem::path base_dir;
  std::vector<SweepPredictor> predictors;
  std::optional<EnsembleConfig> ensemble;
  std::vector<NoiseFamily> noise_families{std::begin(kAllFamilies), std::end(kAllFamilies)};
  std::vector<NoiseLevel> levels{std::begin(kAllLevels), std::end(kAllLevels)};
  std::vector<int> class_filter;
  std::optional<int> num_classes;
  std::uint64_t master_seed = 0;
  int worker_count = 1;
  /// Independent perturbed replicas per (entry, cell).
  int replicas = 1;
  /// When set, only the test side of split(manifest, fraction, split_seed) is scored.
  std::optional<double> test_fraction;
  std::uint64_t split_seed = 0;
  bool record_timestamps = false;

  void validate() const;
  std::filesystem::path manifest_path() const;
};

/// Config file schema (JSON):
///
///   {
///     "manifest": "manifest.json",
///     "num_classes": 2,                                  (optional)
///     "predictors": [
///       {"name": "hamm", "type": "synthetic", "base_flip_prob": 0.05,
///        "noise_sensitivity": {"gaussian": 0.5, "salt_pepper": 0.6, "speckle": 0.4},
///        "structure": "iid", "magnitude": 1, "target_class": 1, "seed": 11},
///       {"name": "deeplab", "type": "external"}
///     ],
///     "ensemble": {"members": ["hamm", "deeplab", "yolact"], "weights": [1, 1, 1]},
///     "noise_families": ["gaussian", "salt_pepper", "speckle"],  (default: all)
///     "levels": ["low", "medium", "high"],                       (default: all)
///     "class_filter": [1],                                       (optional)
///     "master_seed": 7, "worker_count": 4, "replicas": 1,
///     "split": {"test_fraction": 0.2, "seed": 0},                (optional)
///     "record_timestamps": false
///   }
SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir);
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Hex FNV-1a digest of the canonical config. Execution-only knobs
/// (worker_count, record_timestamps) are excluded so they cannot change output.
std::string config_digest(const SweepConfig& config);

struct SweepRow {
  /// "none" / "clean" for the baseline row.
  std::string noise_type;
  std::string noise_level;
  double sigma = 0.0;
  std::vector<std::optional<double>> predictor_miou;
  std::optional<double> ensemble_miou;
  std::vector<ConfusionMatrix> predictor_matrices;
  std::optional<ConfusionMatrix> ensemble_matrix;

  bool is_baseline() const { return noise_type == "none"; }
  bool operator==(const SweepRow&) const = default;
};

struct SweepMetadata {
  std::string config_digest;
  std::uint64_t master_seed = 0;
  std::string toolkit_version;
  int num_classes = 0;
  std::size_t entries = 0;
  int replicas = 1;
  std::vector<int> class_filter;
  std::optional<std::string> generated_at;

  bool operator==(const SweepMetadata&) const = default;
};

/// rows[0] is the clean baseline; noisy rows follow in family-major order.
struct SweepReport {
  std::vector<std::string> predictor_names;
  std::vector<std::string> ensemble_members;
  std::vector<double> ensemble_weights;
  std::vector<SweepRow> rows;
  SweepMetadata metadata;

  const SweepRow& baseline() const;
  const SweepRow* find(NoiseFamily family, NoiseLevel level) const;
  bool operator==(const SweepReport&) const = default;
};

SweepReport run_sweep(const SweepConfig& config);
/// Same, with an already loaded manifest.
SweepReport run_sweep(const SweepConfig& config, const DatasetManifest& manifest);

enum class ReportFormat { kCsv, kJson, kMarkdown };
ReportFormat parse_report_format(std::string_view name);
std::string_view extension(ReportFormat format);

/// CSV header: noise_type,noise_level,<predictor...>,ensemble.
/// mIOUs print with 6 decimals; undefined prints as "NA".
std::string emit_report(const SweepReport& report, ReportFormat format);
/// Inverse of the JSON form of emit_report.
SweepReport report_from_json(const std::string& json_text);

struct EnsembleSummary {
  struct Member {
    std::string name;
    std::optional<double> miou;
  };
  std::vector<Member> members;
  std::optional<double> ensemble_miou;
};

/// Clean-baseline member scores next to the ensembled score.
EnsembleSummary summarize_ensemble(const SweepReport& report);
std::string render_summary(const EnsembleSummary& summary, ReportFormat format);

/// Ordinary least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

struct DegradationSeries {
  /// Predictor name, or "ensemble".
  std::string name;
  std::vector<std::pair<NoiseFamily, double>> slopes;
};

/// mIOU-vs-sigma slope over {0, low, medium, high} for every predictor and the
/// ensemble, per noise family present in the report.
std::vector<DegradationSeries> degradation_profile(const SweepReport& report);
std::string render_profile(const std::vector<DegradationSeries>& profile);

}  // namespace segvote
