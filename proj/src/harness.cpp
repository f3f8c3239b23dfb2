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


#include "segvote/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "segvote/error.hpp"
#include "segvote/json_io.hpp"
#include "segvote/random.hpp"
#include "segvote/version.hpp"

namespace segvote {

using nlohmann::json;

namespace {

constexpr std::uint64_t kEntryStream = hash_name("harness/entry");
constexpr std::uint64_t kReplicaStream = hash_name("harness/replica");

std::string cell_key(NoiseFamily family, NoiseLevel level) {
  return std::string(to_string(family)) + ":" + std::string(to_string(level));
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(std::string("sweep config: '") + key + "' has the wrong type");
  }
}

PredictorSpec parse_synthetic(const json& p, const std::string& name) {
  PredictorSpec spec;
  spec.name = name;
  spec.base_flip_prob = get_or(p, "base_flip_prob", 0.0);
  if (auto it = p.find("noise_sensitivity"); it != p.end()) {
    if (it->is_number()) {
      spec.noise_sensitivity.fill(it->get<double>());
    } else if (it->is_object()) {
      for (const auto& [fam, v] : it->items()) {
        if (!v.is_number()) throw Error("predictor '" + name + "': sensitivity must be a number");
        spec.noise_sensitivity[static_cast<std::size_t>(parse_family(fam))] = v.get<double>();
      }
    } else {
      throw Error("predictor '" + name + "': 'noise_sensitivity' must be a number or object");
    }
  }
  spec.structure = parse_structure(get_or<std::string>(p, "structure", "iid"));
  spec.magnitude = get_or(p, "magnitude", 1.0);
  spec.target_class = get_or(p, "target_class", 1);
  spec.seed = get_or<std::uint64_t>(p, "seed", 0);
  spec.validate();
  return spec;
}

json predictor_to_json(const SweepPredictor& p) {
  if (!p.synthetic) return json{{"name", p.name}, {"type", "external"}};
  const PredictorSpec& s = *p.synthetic;
  json sens;
  for (NoiseFamily f : kAllFamilies) {
    sens[std::string(to_string(f))] = s.noise_sensitivity[static_cast<std::size_t>(f)];
  }
  return json{{"name", p.name},
              {"type", "synthetic"},
              {"base_flip_prob", s.base_flip_prob},
              {"noise_sensitivity", std::move(sens)},
              {"structure", std::string(to_string(s.structure))},
              {"magnitude", s.magnitude},
              {"target_class", s.target_class},
              {"seed", s.seed}};
}

std::string format_miou(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Cell {
  std::optional<NoiseFamily> family;
  std::optional<NoiseLevel> level;
};

}  // namespace

void SweepConfig::validate() const {
  if (predictors.empty()) throw Error("sweep config: at least one predictor is required");
  std::set<std::string> names;
  for (const auto& p : predictors) {
    if (p.name.empty()) throw Error("sweep config: predictor names must be non-empty");
    if (p.name.find('@') != std::string::npos) {
      throw Error("sweep config: predictor name '" + p.name + "' must not contain '@'");
    }
    if (!names.insert(p.name).second) {
      throw Error("sweep config: duplicate predictor '" + p.name + "'");
    }
    if (p.synthetic) p.synthetic->validate();
  }
  if (!ensemble) throw Error("sweep config: an ensemble is required");
  for (const auto& m : ensemble->member_names()) {
    if (!names.count(m)) throw Error("sweep config: ensemble member '" + m + "' is not a predictor");
  }
  if (worker_count < 1) throw Error("sweep config: worker_count must be positive");
  if (replicas < 1) throw Error("sweep config: replicas must be positive");
  if (test_fraction && !(*test_fraction > 0.0 && *test_fraction < 1.0)) {
    throw Error("sweep config: split test_fraction must be strictly between 0 and 1");
  }
  if (num_classes && (*num_classes < 1 || *num_classes > kMaxClasses)) {
    throw Error("sweep config: num_classes must be in [1, 255]");
  }
  std::set<NoiseFamily> fams(noise_families.begin(), noise_families.end());
  if (fams.size() != noise_families.size()) throw Error("sweep config: repeated noise family");
  std::set<NoiseLevel> lvls(levels.begin(), levels.end());
  if (lvls.size() != levels.size()) throw Error("sweep config: repeated noise level");
}

std::filesystem::path SweepConfig::manifest_path() const {
  std::filesystem::path p(manifest);
  return p.is_absolute() ? p : base_dir / p;
}

namespace {

SweepConfig parse_config_document(const std::string& json_text,
                                  const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("sweep config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("sweep config must be a JSON object");

  SweepConfig cfg;
  cfg.base_dir = base_dir;
  cfg.manifest = get_or<std::string>(doc, "manifest", "");
  if (cfg.manifest.empty()) throw Error("sweep config: 'manifest' is required");

  const json& preds = doc.value("predictors", json::array());
  if (!preds.is_array()) throw Error("sweep config: 'predictors' must be an array");
  for (const json& p : preds) {
    if (!p.is_object()) throw Error("sweep config: each predictor must be an object");
    SweepPredictor sp;
    sp.name = get_or<std::string>(p, "name", "");
    const auto type = get_or<std::string>(p, "type", "synthetic");
    if (type == "synthetic") {
      sp.synthetic = parse_synthetic(p, sp.name);
    } else if (type != "external") {
      throw Error("sweep config: predictor '" + sp.name + "' has unknown type '" + type + "'");
    }
    cfg.predictors.push_back(std::move(sp));
  }

  if (auto it = doc.find("ensemble"); it != doc.end()) {
    const auto members = get_or<std::vector<std::string>>(*it, "members", {});
    if (auto w = it->find("weights"); w != it->end() && !w->is_null()) {
      cfg.ensemble.emplace(members, w->get<std::vector<double>>());
    } else {
      cfg.ensemble.emplace(members);
    }
  }
  if (auto it = doc.find("noise_families"); it != doc.end()) {
    cfg.noise_families.clear();
    for (const auto& f : it->get<std::vector<std::string>>()) cfg.noise_families.push_back(parse_family(f));
  }
  if (auto it = doc.find("levels"); it != doc.end()) {
    cfg.levels.clear();
    for (const auto& l : it->get<std::vector<std::string>>()) cfg.levels.push_back(parse_level(l));
  }
  cfg.class_filter = get_or<std::vector<int>>(doc, "class_filter", {});
  if (auto it = doc.find("num_classes"); it != doc.end() && !it->is_null()) {
    cfg.num_classes = it->get<int>();
  }
  cfg.master_seed = get_or<std::uint64_t>(doc, "master_seed", 0);
  cfg.worker_count = get_or(doc, "worker_count", 1);
  cfg.replicas = get_or(doc, "replicas", 1);
  if (auto it = doc.find("split"); it != doc.end() && !it->is_null()) {
    cfg.test_fraction = get_or(*it, "test_fraction", 0.2);
    cfg.split_seed = get_or<std::uint64_t>(*it, "seed", 0);
  }
  cfg.record_timestamps = get_or(doc, "record_timestamps", false);
  cfg.validate();
  return cfg;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  try {
    return parse_config_document(json_text, base_dir);
  } catch (const json::exception& e) {
    throw Error(std::string("sweep config: ") + e.what());
  }
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open sweep config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_sweep_config(text.str(), path.parent_path());
}

std::string config_digest(const SweepConfig& config) {
  json canon;
  canon["manifest"] = config.manifest;
  json preds = json::array();
  for (const auto& p : config.predictors) preds.push_back(predictor_to_json(p));
  canon["predictors"] = std::move(preds);
  if (config.ensemble) {
    canon["ensemble"] = {{"members", config.ensemble->member_names()},
                         {"weights", config.ensemble->weights()}};
  }
  json fams = json::array();
  for (auto f : config.noise_families) fams.push_back(std::string(to_string(f)));
  canon["noise_families"] = std::move(fams);
  json lvls = json::array();
  for (auto l : config.levels) lvls.push_back(std::string(to_string(l)));
  canon["levels"] = std::move(lvls);
  canon["class_filter"] = config.class_filter;
  canon["num_classes"] = config.num_classes ? json(*config.num_classes) : json(nullptr);
  canon["master_seed"] = config.master_seed;
  canon["replicas"] = config.replicas;
  canon["split"] = config.test_fraction
                       ? json{{"test_fraction", *config.test_fraction}, {"seed", config.split_seed}}
                       : json(nullptr);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_name(canon.dump())));
  return buf;
}

const SweepRow& SweepReport::baseline() const {
  if (rows.empty() || !rows.front().is_baseline()) throw Error("report has no baseline row");
  return rows.front();
}

const SweepRow* SweepReport::find(NoiseFamily family, NoiseLevel level) const {
  for (const auto& r : rows) {
    if (r.noise_type == to_string(family) && r.noise_level == to_string(level)) return &r;
  }
  return nullptr;
}

SweepReport run_sweep(const SweepConfig& config) {
  config.validate();
  return run_sweep(config, load_manifest(config.manifest_path()));
}

SweepReport run_sweep(const SweepConfig& config, const DatasetManifest& manifest) {
  config.validate();
  const EnsembleConfig& ens = *config.ensemble;

  // Test entries, in manifest order.
  std::vector<const ManifestEntry*> entries;
  if (config.test_fraction) {
    const SplitResult s = split(manifest, *config.test_fraction, config.split_seed);
    std::set<std::string> test(s.test_ids.begin(), s.test_ids.end());
    for (const auto& e : manifest.entries) {
      if (test.count(e.id)) entries.push_back(&e);
    }
  } else {
    for (const auto& e : manifest.entries) entries.push_back(&e);
  }
  if (entries.empty()) throw Error("sweep: no entries to evaluate");

  std::vector<Cell> cells{Cell{}};
  for (auto f : config.noise_families) {
    for (auto l : config.levels) cells.push_back(Cell{f, l});
  }

  // Every external prediction set must exist for every cell before any work starts.
  for (const auto& p : config.predictors) {
    if (p.synthetic) continue;
    for (const auto& cell : cells) {
      const std::string key = cell.family ? p.name + "@" + cell_key(*cell.family, *cell.level) : p.name;
      for (const auto* e : entries) {
        if (!e->predictions.count(key)) {
          throw Error("missing prediction set '" + key + "' for entry '" + e->id + "'");
        }
      }
    }
  }

  std::vector<LabelMask> gts;
  gts.reserve(entries.size());
  const std::optional<int> k_override = config.num_classes ? config.num_classes : manifest.num_classes;
  for (const auto* e : entries) gts.push_back(load_mask(e->gt_mask, k_override));
  int k = k_override.value_or(0);
  if (!k_override) {
    for (const auto& g : gts) k = std::max(k, g.num_classes());
  }
  for (auto& g : gts) {
    if (g.num_classes() != k) g = g.with_num_classes(k);
  }

  std::map<std::string, std::size_t> predictor_index;
  for (std::size_t i = 0; i < config.predictors.size(); ++i) {
    predictor_index[config.predictors[i].name] = i;
  }
  std::vector<std::size_t> member_index;
  for (const auto& m : ens.member_names()) member_index.push_back(predictor_index.at(m));

  const std::size_t n_pred = config.predictors.size();
  const std::size_t n_cells = cells.size();
  // Slot layout per cell: predictors then the ensemble.
  using Accumulators = std::vector<ConfusionMatrix>;
  auto fresh = [&] { return Accumulators(n_cells * (n_pred + 1), ConfusionMatrix(k)); };

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::optional<std::string> failure;
  const int workers = std::min<int>(config.worker_count, static_cast<int>(entries.size()));
  std::vector<Accumulators> partials(workers);

  auto work = [&](int w) {
    Accumulators acc = fresh();
    try {
      for (std::size_t ei = next++; ei < entries.size(); ei = next++) {
        const ManifestEntry& entry = *entries[ei];
        const LabelMask& gt = gts[ei];
        const std::uint64_t entry_seed =
            derive_key(config.master_seed, kEntryStream ^ hash_name(entry.id));
        std::vector<std::optional<LabelMask>> preds(n_pred);
        for (std::size_t c = 0; c < n_cells; ++c) {
          const Cell& cell = cells[c];
          for (int r = 0; r < config.replicas; ++r) {
            const std::uint64_t replica_seed =
                derive_key(entry_seed, kReplicaStream + static_cast<std::uint64_t>(r));
            std::optional<NoiseSpec> noise;
            if (cell.family) {
              noise = NoiseSpec::at_level(
                  *cell.family, *cell.level,
                  derive_key(replica_seed, hash_name(cell_key(*cell.family, *cell.level))));
            }
            for (std::size_t p = 0; p < n_pred; ++p) {
              const SweepPredictor& sp = config.predictors[p];
              if (sp.synthetic) {
                // The corruption stream does not depend on the cell, so cells
                // differ only through the noise level (common random numbers).
                preds[p] = predict(*sp.synthetic, gt, noise, replica_seed);
              } else if (r == 0) {
                const std::string key =
                    cell.family ? sp.name + "@" + cell_key(*cell.family, *cell.level) : sp.name;
                preds[p] = load_mask(entry.predictions.at(key), k);
              }
              acc[c * (n_pred + 1) + p].accumulate(*preds[p], gt);
            }
            std::vector<LabelMask> members;
            members.reserve(member_index.size());
            for (std::size_t m : member_index) members.push_back(*preds[m]);
            acc[c * (n_pred + 1) + n_pred].accumulate(majority_vote(members, ens), gt);
          }
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = e.what();
      next = entries.size();
    }
    partials[w] = std::move(acc);
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  if (failure) throw Error(*failure);

  Accumulators total = fresh();
  for (const auto& part : partials) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(part[i]);
  }

  SweepReport report;
  for (const auto& p : config.predictors) report.predictor_names.push_back(p.name);
  report.ensemble_members = ens.member_names();
  report.ensemble_weights = ens.weights();
  for (std::size_t c = 0; c < n_cells; ++c) {
    SweepRow row;
    const Cell& cell = cells[c];
    row.noise_type = cell.family ? std::string(to_string(*cell.family)) : "none";
    row.noise_level = cell.level ? std::string(to_string(*cell.level)) : "clean";
    row.sigma = cell.level ? resolve_level(*cell.level) : 0.0;
    for (std::size_t p = 0; p < n_pred; ++p) {
      const ConfusionMatrix& m = total[c * (n_pred + 1) + p];
      row.predictor_miou.push_back(miou(m, config.class_filter));
      row.predictor_matrices.push_back(m);
    }
    row.ensemble_matrix = total[c * (n_pred + 1) + n_pred];
    row.ensemble_miou = miou(*row.ensemble_matrix, config.class_filter);
    report.rows.push_back(std::move(row));
  }
  report.metadata.config_digest = config_digest(config);
  report.metadata.master_seed = config.master_seed;
  report.metadata.toolkit_version = kVersion;
  report.metadata.num_classes = k;
  report.metadata.entries = entries.size();
  report.metadata.replicas = config.replicas;
  report.metadata.class_filter = config.class_filter;
  if (config.record_timestamps) report.metadata.generated_at = utc_timestamp();
  return report;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  throw Error("unknown report format '" + std::string(name) + "' (expected csv, json or markdown)");
}

std::string_view extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return "csv";
    case ReportFormat::kJson:
      return "json";
    case ReportFormat::kMarkdown:
      return "md";
  }
  return "txt";
}

namespace {

json report_to_json(const SweepReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json mious = json::object();
    json matrices = json::object();
    for (std::size_t p = 0; p < report.predictor_names.size(); ++p) {
      mious[report.predictor_names[p]] = optional_to_json(r.predictor_miou[p]);
      matrices[report.predictor_names[p]] = to_json(r.predictor_matrices[p]);
    }
    rows.push_back(json{{"noise_type", r.noise_type},
                        {"noise_level", r.noise_level},
                        {"sigma", r.sigma},
                        {"miou", std::move(mious)},
                        {"ensemble_miou", optional_to_json(r.ensemble_miou)},
                        {"matrices", std::move(matrices)},
                        {"ensemble_matrix", r.ensemble_matrix ? to_json(*r.ensemble_matrix)
                                                              : json(nullptr)}});
  }
  const SweepMetadata& md = report.metadata;
  json meta{{"config_digest", md.config_digest},
            {"master_seed", md.master_seed},
            {"toolkit_version", md.toolkit_version},
            {"num_classes", md.num_classes},
            {"entries", md.entries},
            {"replicas", md.replicas},
            {"class_filter", md.class_filter},
            {"generated_at", md.generated_at ? json(*md.generated_at) : json(nullptr)}};
  return json{{"metadata", std::move(meta)},
              {"predictors", report.predictor_names},
              {"ensemble", {{"members", report.ensemble_members},
                            {"weights", report.ensemble_weights}}},
              {"rows", std::move(rows)}};
}

std::string to_table(const SweepReport& report, bool markdown) {
  std::vector<std::string> header{"noise_type", "noise_level"};
  for (const auto& n : report.predictor_names) header.push_back(n);
  header.push_back("ensemble");
  std::vector<std::vector<std::string>> body;
  for (const auto& r : report.rows) {
    std::vector<std::string> line{r.noise_type, r.noise_level};
    for (const auto& v : r.predictor_miou) line.push_back(format_miou(v));
    line.push_back(format_miou(r.ensemble_miou));
    body.push_back(std::move(line));
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& cells) {
    if (markdown) out << "| ";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << (markdown ? " | " : ",");
      out << cells[i];
    }
    out << (markdown ? " |\n" : "\n");
  };
  emit(header);
  if (markdown) {
    out << "|";
    for (std::size_t i = 0; i < header.size(); ++i) out << (i < 2 ? "---|" : "---:|");
    out << "\n";
  }
  for (const auto& line : body) emit(line);
  return out.str();
}

std::optional<double> optional_from_json(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

}  // namespace

std::string emit_report(const SweepReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kCsv:
      return to_table(report, false);
    case ReportFormat::kMarkdown:
      return to_table(report, true);
    case ReportFormat::kJson:
      return report_to_json(report).dump(2) + "\n";
  }
  throw Error("unknown report format");
}

SweepReport report_from_json(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    SweepReport report;
    report.predictor_names = doc.at("predictors").get<std::vector<std::string>>();
    report.ensemble_members = doc.at("ensemble").at("members").get<std::vector<std::string>>();
    report.ensemble_weights = doc.at("ensemble").at("weights").get<std::vector<double>>();
    const json& md = doc.at("metadata");
    report.metadata.config_digest = md.at("config_digest").get<std::string>();
    report.metadata.master_seed = md.at("master_seed").get<std::uint64_t>();
    report.metadata.toolkit_version = md.at("toolkit_version").get<std::string>();
    report.metadata.num_classes = md.at("num_classes").get<int>();
    report.metadata.entries = md.at("entries").get<std::size_t>();
    report.metadata.replicas = md.at("replicas").get<int>();
    report.metadata.class_filter = md.at("class_filter").get<std::vector<int>>();
    if (!md.at("generated_at").is_null()) {
      report.metadata.generated_at = md.at("generated_at").get<std::string>();
    }
    for (const json& r : doc.at("rows")) {
      SweepRow row;
      row.noise_type = r.at("noise_type").get<std::string>();
      row.noise_level = r.at("noise_level").get<std::string>();
      row.sigma = r.at("sigma").get<double>();
      for (const auto& name : report.predictor_names) {
        row.predictor_miou.push_back(optional_from_json(r.at("miou").at(name)));
        row.predictor_matrices.push_back(matrix_from_json(r.at("matrices").at(name)));
      }
      row.ensemble_miou = optional_from_json(r.at("ensemble_miou"));
      if (!r.at("ensemble_matrix").is_null()) {
        row.ensemble_matrix = matrix_from_json(r.at("ensemble_matrix"));
      }
      report.rows.push_back(std::move(row));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(std::string("report JSON: ") + e.what());
  }
}

EnsembleSummary summarize_ensemble(const SweepReport& report) {
  const SweepRow& base = report.baseline();
  EnsembleSummary s;
  for (const auto& m : report.ensemble_members) {
    const auto it = std::find(report.predictor_names.begin(), report.predictor_names.end(), m);
    if (it == report.predictor_names.end()) {
      throw Error("ensemble member '" + m + "' missing from report");
    }
    s.members.push_back({m, base.predictor_miou[static_cast<std::size_t>(
                                 it - report.predictor_names.begin())]});
  }
  s.ensemble_miou = base.ensemble_miou;
  return s;
}

std::string render_summary(const EnsembleSummary& summary, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kCsv:
      out << "member,miou\n";
      for (const auto& m : summary.members) out << m.name << "," << format_miou(m.miou) << "\n";
      out << "ensembled_score," << format_miou(summary.ensemble_miou) << "\n";
      break;
    case ReportFormat::kMarkdown:
      out << "| member | mIOU | ensembled score |\n|---|---:|---:|\n";
      for (const auto& m : summary.members) {
        out << "| " << m.name << " | " << format_miou(m.miou) << " | - |\n";
      }
      out << "| ensemble | - | " << format_miou(summary.ensemble_miou) << " |\n";
      break;
    case ReportFormat::kJson: {
      json members = json::array();
      for (const auto& m : summary.members) {
        members.push_back({{"name", m.name}, {"miou", optional_to_json(m.miou)}});
      }
      out << json{{"members", std::move(members)},
                  {"ensembled_score", optional_to_json(summary.ensemble_miou)}}
                 .dump(2)
          << "\n";
      break;
    }
  }
  return out.str();
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("least-squares slope needs at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error("least-squares slope is undefined for constant x");
  return sxy / sxx;
}

std::vector<DegradationSeries> degradation_profile(const SweepReport& report) {
  const SweepRow& base = report.baseline();
  std::vector<NoiseFamily> families;
  for (NoiseFamily f : kAllFamilies) {
    const bool present = std::any_of(report.rows.begin(), report.rows.end(),
                                     [&](const SweepRow& r) { return r.noise_type == to_string(f); });
    if (!present) continue;
    for (NoiseLevel l : kAllLevels) {
      if (report.find(f, l) == nullptr) {
        throw Error("degradation profile: " + std::string(to_string(f)) + " is missing level " +
                    std::string(to_string(l)));
      }
    }
    families.push_back(f);
  }
  if (families.empty()) throw Error("degradation profile: report has no noisy cells");

  const std::size_t n_series = report.predictor_names.size() + 1;
  std::vector<DegradationSeries> out(n_series);
  for (std::size_t s = 0; s < n_series; ++s) {
    const bool is_ens = s + 1 == n_series;
    out[s].name = is_ens ? "ensemble" : report.predictor_names[s];
    auto value = [&](const SweepRow& row) {
      const auto v = is_ens ? row.ensemble_miou : row.predictor_miou[s];
      if (!v) throw Error("degradation profile: undefined mIOU for '" + out[s].name + "'");
      return *v;
    };
    for (NoiseFamily f : families) {
      std::vector<double> xs{0.0}, ys{value(base)};
      for (NoiseLevel l : kAllLevels) {
        xs.push_back(resolve_level(l));
        ys.push_back(value(*report.find(f, l)));
      }
      out[s].slopes.emplace_back(f, ols_slope(xs, ys));
    }
  }
  return out;
}

std::string render_profile(const std::vector<DegradationSeries>& profile) {
  std::ostringstream out;
  out << "series,noise_type,slope\n";
  for (const auto& s : profile) {
    for (const auto& [f, slope] : s.slopes) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", slope);
      out << s.name << "," << to_string(f) << "," << buf << "\n";
    }
  }
  return out.str();
}

}  // namespace segvote
