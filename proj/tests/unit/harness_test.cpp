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


#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "segvote/error.hpp"
#include "segvote/harness.hpp"
#include "segvote/synth.hpp"
#include "test_support.hpp"

namespace segvote {
namespace {

using testing::read_file;
using testing::TempDir;
using testing::write_file;

const std::filesystem::path kGolden = std::filesystem::path(SEGVOTE_FIXTURES) / "golden";

/// Compares against a frozen file; SEGVOTE_UPDATE_GOLDEN=1 rewrites it instead.
void expect_golden(const std::string& actual, const std::string& name) {
  const auto path = kGolden / name;
  if (std::getenv("SEGVOTE_UPDATE_GOLDEN")) {
    std::filesystem::create_directories(kGolden);
    write_file(path, actual);
    return;
  }
  ASSERT_TRUE(std::filesystem::exists(path)) << path;
  EXPECT_EQ(actual, read_file(path)) << name;
}

std::string synthetic_config(const std::string& extra = "") {
  return R"({
    "manifest": "manifest.json",
    "num_classes": 3,
    "master_seed": 7,
    "predictors": [
      {"name": "a", "base_flip_prob": 0.05, "noise_sensitivity": 0.5, "seed": 1},
      {"name": "b", "base_flip_prob": 0.08, "noise_sensitivity": {"gaussian": 0.2, "speckle": 1.0}, "seed": 2},
      {"name": "c", "base_flip_prob": 0.02, "structure": "erode", "magnitude": 1, "seed": 3}
    ],
    "ensemble": {"members": ["a", "b", "c"]})" +
         extra + "}";
}

struct Fixture {
  TempDir dir;
  testing::SceneDataset data;
  explicit Fixture(int entries = 6) : data(testing::write_dataset(dir.path(), entries, 32, 24, 3, 99)) {}
  SweepConfig config(const std::string& extra = "") const {
    return parse_sweep_config(synthetic_config(extra), dir.path());
  }
};

TEST(SweepConfig, ParsesAndValidates) {
  Fixture f;
  const SweepConfig cfg = f.config();
  EXPECT_EQ(cfg.predictors.size(), 3u);
  ASSERT_TRUE(cfg.predictors[1].synthetic);
  EXPECT_EQ(cfg.predictors[1].synthetic->noise_sensitivity[2], 1.0);
  EXPECT_EQ(cfg.predictors[1].synthetic->noise_sensitivity[1], 0.0);
  EXPECT_EQ(cfg.noise_families.size(), 3u);
  EXPECT_EQ(cfg.manifest_path(), f.dir / "manifest.json");
}

TEST(SweepConfig, RejectsBadConfigs) {
  const auto bad = [](const std::string& text) {
    EXPECT_THROW(parse_sweep_config(text, "/"), Error) << text;
  };
  bad("{");
  bad(R"({"manifest": "m", "predictors": [{"name": "a"}, {"name": "b"}],
          "ensemble": {"members": ["a"]}})");
  bad(R"({"manifest": "m", "predictors": [{"name": "a"}, {"name": "b"}],
          "ensemble": {"members": ["a", "z"]}})");
  bad(R"({"manifest": "m", "predictors": [{"name": "a"}, {"name": "a"}],
          "ensemble": {"members": ["a", "a"]}})");
  bad(R"({"manifest": "m", "predictors": [{"name": "a", "type": "oracle"}, {"name": "b"}],
          "ensemble": {"members": ["a", "b"]}})");
  bad(R"({"manifest": "m", "predictors": [{"name": "a", "base_flip_prob": "x"}, {"name": "b"}],
          "ensemble": {"members": ["a", "b"]}})");
  bad(R"({"manifest": "m", "predictors": [{"name": "a"}, {"name": "b"}],
          "ensemble": {"members": ["a", "b"], "weights": [1, -1]}})");
  bad(R"({"manifest": "m", "predictors": [{"name": "a"}, {"name": "b"}],
          "ensemble": {"members": ["a", "b"]}, "worker_count": 0})");
}

TEST(SweepConfig, DigestIgnoresWorkerCount) {
  Fixture f;
  const std::string d = config_digest(f.config());
  EXPECT_EQ(d, config_digest(f.config(R"(, "worker_count": 8)")));
  EXPECT_NE(d, config_digest(f.config(R"(, "master_seed": 8)")));
}

TEST(RunSweep, FullGridHasTenRowsBaselineFirst) {
  Fixture f;
  const SweepReport r = run_sweep(f.config());
  ASSERT_EQ(r.rows.size(), 10u);
  EXPECT_TRUE(r.rows[0].is_baseline());
  EXPECT_EQ(r.rows[0].noise_type, "none");
  EXPECT_EQ(r.rows[1].noise_type, "gaussian");
  EXPECT_EQ(r.rows[1].noise_level, "low");
  EXPECT_EQ(r.rows[9].noise_type, "speckle");
  EXPECT_EQ(r.rows[9].noise_level, "high");
  EXPECT_EQ(r.metadata.entries, 6u);
  EXPECT_EQ(r.metadata.num_classes, 3);
  EXPECT_FALSE(r.metadata.generated_at);
  for (const auto& row : r.rows) {
    for (const auto& m : row.predictor_matrices) EXPECT_EQ(m.total(), 6 * 32 * 24);
  }
}

TEST(RunSweep, InsensitivePredictorIsFlatAcrossNoise) {
  Fixture f;
  const SweepReport r = run_sweep(f.config());
  // "c" has no sensitivity, and its corruption stream is shared by all cells.
  for (const auto& row : r.rows) EXPECT_EQ(row.predictor_miou[2], r.rows[0].predictor_miou[2]);
  // "b" ignores salt-and-pepper but degrades under speckle.
  EXPECT_EQ(r.find(NoiseFamily::kSaltPepper, NoiseLevel::kHigh)->predictor_miou[1],
            r.rows[0].predictor_miou[1]);
  EXPECT_LT(*r.find(NoiseFamily::kSpeckle, NoiseLevel::kHigh)->predictor_miou[1],
            *r.rows[0].predictor_miou[1]);
}

TEST(RunSweep, IndependentMembersVoteAboveEach) {
  TempDir dir;
  // Binary scenes so every flip lands on the other class.
  testing::write_dataset(dir.path(), 4, 250, 250, 2, 5);
  const SweepConfig cfg = parse_sweep_config(R"({
    "manifest": "manifest.json", "num_classes": 2, "noise_families": [],
    "predictors": [{"name": "a", "base_flip_prob": 0.1, "seed": 1},
                   {"name": "b", "base_flip_prob": 0.1, "seed": 2},
                   {"name": "c", "base_flip_prob": 0.1, "seed": 3}],
    "ensemble": {"members": ["a", "b", "c"]}})",
                                             dir.path());
  const SweepReport r = run_sweep(cfg);
  ASSERT_EQ(r.rows.size(), 1u);
  const ConfusionMatrix& m = *r.rows[0].ensemble_matrix;
  EXPECT_NEAR(static_cast<double>(m.correct()) / m.total(), 0.972, 0.003);
  for (const auto& v : r.rows[0].predictor_miou) EXPECT_GT(*r.rows[0].ensemble_miou, *v);
}

TEST(RunSweep, WorkerCountDoesNotChangeOutput) {
  Fixture f(9);
  const SweepReport one = run_sweep(f.config());
  const SweepReport eight = run_sweep(f.config(R"(, "worker_count": 8)"));
  for (auto fmt : {ReportFormat::kCsv, ReportFormat::kJson, ReportFormat::kMarkdown}) {
    EXPECT_EQ(emit_report(one, fmt), emit_report(eight, fmt));
  }
  EXPECT_EQ(emit_report(one, ReportFormat::kJson), emit_report(run_sweep(f.config()), ReportFormat::kJson));
}

TEST(RunSweep, ReplicasAndSplitAreHonoured) {
  Fixture f(10);
  const SweepReport r = run_sweep(f.config(R"(, "replicas": 2, "split": {"test_fraction": 0.2, "seed": 4})"));
  EXPECT_EQ(r.metadata.entries, 2u);
  EXPECT_EQ(r.metadata.replicas, 2);
  EXPECT_EQ(r.rows[0].predictor_matrices[0].total(), 2 * 2 * 32 * 24);
}

TEST(RunSweep, ConsumesExternalPredictionSets) {
  TempDir dir;
  std::map<std::string, testing::PredictionFn> sets;
  sets["ext"] = [](const LabelMask& gt, int) { return gt; };
  sets["ext@gaussian:low"] = [](const LabelMask& gt, int i) { return corrupt_iid(gt, 0.3, i); };
  testing::write_dataset(dir.path(), 3, 20, 20, 3, 8, sets);
  const SweepConfig cfg = parse_sweep_config(R"({
    "manifest": "manifest.json", "num_classes": 3,
    "noise_families": ["gaussian"], "levels": ["low"],
    "predictors": [{"name": "ext", "type": "external"},
                   {"name": "syn", "base_flip_prob": 0.1}],
    "ensemble": {"members": ["ext", "syn"]}})",
                                             dir.path());
  const SweepReport r = run_sweep(cfg);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].predictor_miou[0], 1.0);
  EXPECT_LT(*r.rows[1].predictor_miou[0], 1.0);
  // With two members the first listed wins every disagreement.
  EXPECT_EQ(r.rows[0].ensemble_miou, 1.0);
}

TEST(RunSweep, MissingExternalSetIsAnError) {
  TempDir dir;
  std::map<std::string, testing::PredictionFn> sets;
  sets["ext"] = [](const LabelMask& gt, int) { return gt; };
  testing::write_dataset(dir.path(), 2, 8, 8, 2, 8, sets);
  const SweepConfig cfg = parse_sweep_config(R"({
    "manifest": "manifest.json", "noise_families": ["speckle"], "levels": ["high"],
    "predictors": [{"name": "ext", "type": "external"}, {"name": "syn"}],
    "ensemble": {"members": ["ext", "syn"]}})",
                                             dir.path());
  try {
    run_sweep(cfg);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("ext@speckle:high"), std::string::npos) << e.what();
  }
}

TEST(Report, CsvShapeAndBaselineOnly) {
  Fixture f;
  const SweepReport r = run_sweep(f.config());
  const std::string csv = emit_report(r, ReportFormat::kCsv);
  std::istringstream in(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3 + 2) << line;
  }
  EXPECT_EQ(lines, r.rows.size() + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "noise_type,noise_level,a,b,c,ensemble");

  const SweepReport base = run_sweep(f.config(R"(, "noise_families": [])"));
  const std::string b = emit_report(base, ReportFormat::kCsv);
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 2);
  EXPECT_EQ(b.substr(b.find('\n') + 1, 10), "none,clean");
}

TEST(Report, JsonRoundTripIsByteIdentical) {
  Fixture f;
  const std::string text = emit_report(run_sweep(f.config()), ReportFormat::kJson);
  EXPECT_EQ(emit_report(report_from_json(text), ReportFormat::kJson), text);
  EXPECT_THROW(report_from_json("{}"), Error);
}

TEST(Report, UnknownFormatIsRejected) {
  EXPECT_THROW(parse_report_format("xml"), Error);
  EXPECT_EQ(parse_report_format("md"), ReportFormat::kMarkdown);
}

TEST(Report, UndefinedScoresPrintAsNA) {
  SweepReport r;
  r.predictor_names = {"a", "b"};
  r.ensemble_members = {"a", "b"};
  r.ensemble_weights = {1, 1};
  SweepRow row;
  row.noise_type = "none";
  row.noise_level = "clean";
  row.predictor_miou = {std::nullopt, 0.5};
  row.predictor_matrices = {ConfusionMatrix(2), ConfusionMatrix(2)};
  r.rows.push_back(row);
  EXPECT_EQ(emit_report(r, ReportFormat::kCsv),
            "noise_type,noise_level,a,b,ensemble\nnone,clean,NA,0.500000,NA\n");
}

TEST(Degradation, OlsSlope) {
  const std::vector<double> x{0.0, 0.01, 0.05, 0.1};
  const std::vector<double> y{0.8, 0.78, 0.70, 0.60};
  EXPECT_NEAR(ols_slope(x, y), -2.0, 1e-9);
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(ols_slope(x, flat), 0.0);
  EXPECT_THROW(ols_slope(flat, y), Error);
  EXPECT_THROW(ols_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST(Degradation, ProfileNeedsAllLevels) {
  Fixture f;
  const SweepReport full = run_sweep(f.config());
  const auto profile = degradation_profile(full);
  ASSERT_EQ(profile.size(), 4u);
  EXPECT_EQ(profile.back().name, "ensemble");
  EXPECT_EQ(profile[2].slopes.size(), 3u);
  EXPECT_EQ(profile[2].slopes[0].second, 0.0);
  EXPECT_LT(profile[0].slopes[0].second, 0.0);
  const SweepReport partial = run_sweep(f.config(R"(, "levels": ["low"])"));
  EXPECT_THROW(degradation_profile(partial), Error);
}

TEST(Golden, SweepOutputsAreFrozen) {
  TempDir dir;
  testing::write_dataset(dir.path(), 5, 40, 30, 3, 2024);
  const SweepConfig cfg = load_sweep_config(kGolden / "sweep.json");
  const SweepReport r = run_sweep(cfg, load_manifest(dir / "manifest.json"));
  expect_golden(emit_report(r, ReportFormat::kCsv), "report.csv");
  expect_golden(emit_report(r, ReportFormat::kJson), "report.json");
  expect_golden(render_summary(summarize_ensemble(r), ReportFormat::kMarkdown), "summary.md");
  expect_golden(render_summary(summarize_ensemble(r), ReportFormat::kCsv), "summary.csv");
  expect_golden(render_profile(degradation_profile(r)), "profile.csv");
}

}  // namespace
}  // namespace segvote
