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
#include <optional>
#include <span>
#include <vector>

#include "segvote/mask.hpp"

namespace segvote {

/// K x K pixel counts; at(g, p) is the number of pixels with ground truth g
/// predicted as p. Pixels where either side is ignore are never counted.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);
  ConfusionMatrix(int num_classes, std::vector<std::int64_t> counts);

  int num_classes() const { return num_classes_; }
  std::int64_t at(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::span<const std::int64_t> counts() const { return counts_; }

  std::int64_t total() const;
  /// Sum of the diagonal.
  std::int64_t correct() const;

  /// Adds one (pred, gt) pair. Throws on shape mismatch or a label >= K.
  void accumulate(const LabelMask& pred, const LabelMask& gt);
  /// Element-wise sum; throws on K mismatch.
  void merge(const ConfusionMatrix& other);

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int num_classes_;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix accumulate(ConfusionMatrix matrix, const LabelMask& pred, const LabelMask& gt);
ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b);

/// nullopt marks a class whose union is empty.
using ClassIou = std::optional<double>;

struct IouBreakdown {
  std::vector<ClassIou> per_class;
  std::optional<double> miou;
};

/// TP / (TP + FP + FN) per class.
std::vector<ClassIou> iou_per_class(const ConfusionMatrix& matrix);

/// Mean of the defined per-class IoUs, optionally restricted to class_filter.
/// Classes outside [0, K) in the filter are rejected.
std::optional<double> miou(const ConfusionMatrix& matrix,
                           std::span<const int> class_filter = {});

IouBreakdown iou_breakdown(const ConfusionMatrix& matrix,
                           std::span<const int> class_filter = {});

}  // namespace segvote
