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


#include "segvote/analysis.hpp"

#include <algorithm>

#include "segvote/components.hpp"
#include "segvote/error.hpp"

namespace segvote {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kOverSegmentation:
      return "over_segmentation";
    case Verdict::kUnderSegmentation:
      return "under_segmentation";
    case Verdict::kRegionExclusion:
      return "region_exclusion";
    case Verdict::kIdeal:
      return "ideal";
  }
  return "?";
}

bool ErrorReport::has(Verdict v) const {
  return std::find(verdicts.begin(), verdicts.end(), v) != verdicts.end();
}

ErrorReport classify_errors(const LabelMask& pred, const LabelMask& gt, int class_id,
                            const ErrorThresholds& thresholds, std::string entry_id) {
  if (!pred.same_shape(gt)) {
    throw Error("prediction is " + std::to_string(pred.width()) + "x" +
                std::to_string(pred.height()) + " but ground truth is " +
                std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  const int k = std::max(pred.num_classes(), gt.num_classes());
  if (class_id < 0 || class_id >= k) {
    throw Error("class id " + std::to_string(class_id) + " is outside [0, " +
                std::to_string(k) + ")");
  }
  // Both sides scored in the wider label space so a class absent from one
  // mask's inferred K is still addressable.
  const LabelMask p = pred.with_num_classes(k);
  const LabelMask g = gt.with_num_classes(k);

  // Restrict the prediction to pixels the ground truth scores.
  std::vector<std::uint8_t> scored(p.labels().begin(), p.labels().end());
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (g[i] == kIgnoreLabel) scored[i] = kIgnoreLabel;
  }
  const LabelMask p_scored(p.width(), p.height(), std::move(scored), k);

  const auto target = static_cast<std::uint8_t>(class_id);
  std::int64_t gt_count = 0, pred_count = 0, hit = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool in_gt = g[i] == target;
    const bool in_pred = p_scored[i] == target;
    gt_count += in_gt;
    pred_count += in_pred;
    hit += in_gt && in_pred;
  }

  ErrorReport report;
  report.entry_id = std::move(entry_id);
  report.class_id = class_id;
  report.recall = gt_count > 0 ? static_cast<double>(hit) / gt_count : 1.0;
  report.precision = pred_count > 0 ? static_cast<double>(hit) / pred_count : 1.0;

  const ComponentSet gt_cc = connected_components(g, class_id);
  const ComponentSet pred_cc = connected_components(p_scored, class_id);
  report.gt_components = gt_cc.count();
  report.pred_components = pred_cc.count();
  for (const auto& comp : gt_cc.pixels) {
    const bool touched = std::any_of(comp.begin(), comp.end(),
                                     [&](std::size_t i) { return p_scored[i] == target; });
    if (!touched) ++report.missed_component_count;
  }

  const double ideal_floor = 1.0 - thresholds.epsilon;
  if (report.recall >= ideal_floor && report.precision >= ideal_floor) {
    report.verdicts = {Verdict::kIdeal};
    return report;
  }
  if (report.pred_components > report.gt_components && report.recall >= thresholds.recall_hi) {
    report.verdicts.push_back(Verdict::kOverSegmentation);
  }
  if (report.recall < thresholds.recall_lo) {
    report.verdicts.push_back(Verdict::kUnderSegmentation);
  }
  if (report.missed_component_count >= 1 &&
      report.missed_component_count < report.gt_components) {
    report.verdicts.push_back(Verdict::kRegionExclusion);
  }
  return report;
}

}  // namespace segvote
