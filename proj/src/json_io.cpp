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


#include "segvote/json_io.hpp"

#include "segvote/error.hpp"

namespace segvote {

using nlohmann::json;

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json to_json(const ConfusionMatrix& matrix) {
  const int k = matrix.num_classes();
  json rows = json::array();
  for (int g = 0; g < k; ++g) {
    json row = json::array();
    for (int p = 0; p < k; ++p) row.push_back(matrix.at(g, p));
    rows.push_back(std::move(row));
  }
  return json{{"num_classes", k}, {"counts", std::move(rows)}};
}

ConfusionMatrix matrix_from_json(const json& j) {
  try {
    const int k = j.at("num_classes").get<int>();
    const json& rows = j.at("counts");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(k)) {
      throw Error("confusion matrix JSON: 'counts' must have num_classes rows");
    }
    std::vector<std::int64_t> counts;
    counts.reserve(static_cast<std::size_t>(k) * k);
    for (const json& row : rows) {
      if (!row.is_array() || row.size() != static_cast<std::size_t>(k)) {
        throw Error("confusion matrix JSON: every row must have num_classes entries");
      }
      for (const json& c : row) counts.push_back(c.get<std::int64_t>());
    }
    return ConfusionMatrix(k, std::move(counts));
  } catch (const json::exception& e) {
    throw Error(std::string("confusion matrix JSON: ") + e.what());
  }
}

json to_json(const IouBreakdown& breakdown) {
  json per_class = json::array();
  for (const auto& v : breakdown.per_class) per_class.push_back(optional_to_json(v));
  return json{{"per_class", std::move(per_class)}, {"miou", optional_to_json(breakdown.miou)}};
}

json to_json(const ErrorReport& report) {
  json verdicts = json::array();
  for (Verdict v : report.verdicts) verdicts.push_back(std::string(to_string(v)));
  return json{{"entry_id", report.entry_id},
              {"class_id", report.class_id},
              {"gt_components", report.gt_components},
              {"pred_components", report.pred_components},
              {"recall", report.recall},
              {"precision", report.precision},
              {"missed_component_count", report.missed_component_count},
              {"verdicts", std::move(verdicts)}};
}

}  // namespace segvote
