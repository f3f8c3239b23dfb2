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

#include <string>
#include <string_view>
#include <vector>

#include "segvote/mask.hpp"

namespace segvote {

enum class Verdict { kOverSegmentation, kUnderSegmentation, kRegionExclusion, kIdeal };

std::string_view to_string(Verdict verdict);

struct ErrorThresholds {
  /// Over-segmentation requires at least this recall (the region is found, just fragmented).
  double recall_hi = 0.85;
  /// Recall below this is under-segmentation.
  double recall_lo = 0.8;
  /// Ideal requires recall and precision both >= 1 - epsilon.
  double epsilon = 0.02;
};

/// Per-class failure analysis of one prediction against its ground truth.
///
/// recall is the share of ground-truth class pixels that the prediction also
/// labels as the class; precision is the share of predicted class pixels that
/// are correct. Pixels ignored in the ground truth are excluded from both.
/// With nothing to find (or nothing predicted) the vacuous ratio is 1.
///
/// Verdicts:
///   over_segmentation  more predicted components than ground-truth ones, recall >= recall_hi
///   under_segmentation recall < recall_lo
///   region_exclusion   some ground-truth component is missed entirely while
///                      another one is at least partly covered
///   ideal              recall and precision >= 1 - epsilon; excludes the others
///
/// Wrong-class intrusions (e.g. a neighbouring object absorbed into the class)
/// surface only through precision.
struct ErrorReport {
  std::string entry_id;
  int class_id = 0;
  int gt_components = 0;
  int pred_components = 0;
  double recall = 1.0;
  double precision = 1.0;
  int missed_component_count = 0;
  std::vector<Verdict> verdicts;

  bool has(Verdict v) const;
};

ErrorReport classify_errors(const LabelMask& pred, const LabelMask& gt, int class_id,
                            const ErrorThresholds& thresholds = {},
                            std::string entry_id = {});

}  // namespace segvote
