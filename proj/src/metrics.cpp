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


#include "segvote/metrics.hpp"

#include <numeric>
#include <string>

#include "segvote/error.hpp"

namespace segvote {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {
  if (num_classes < 1 || num_classes > kMaxClasses) {
    throw Error("num_classes must be in [1, 255], got " + std::to_string(num_classes));
  }
}

ConfusionMatrix::ConfusionMatrix(int num_classes, std::vector<std::int64_t> counts)
    : ConfusionMatrix(num_classes) {
  if (counts.size() != counts_.size()) {
    throw Error("confusion matrix needs " + std::to_string(counts_.size()) + " counts, got " +
                std::to_string(counts.size()));
  }
  for (auto c : counts) {
    if (c < 0) throw Error("confusion matrix counts must be nonnegative");
  }
  counts_ = std::move(counts);
}

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::correct() const {
  std::int64_t sum = 0;
  for (int c = 0; c < num_classes_; ++c) sum += at(c, c);
  return sum;
}

void ConfusionMatrix::accumulate(const LabelMask& pred, const LabelMask& gt) {
  if (!pred.same_shape(gt)) {
    throw Error("prediction is " + std::to_string(pred.width()) + "x" +
                std::to_string(pred.height()) + " but ground truth is " +
                std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
  }
  const auto p = pred.labels();
  const auto g = gt.labels();
  // Validate before touching counts so a failed call leaves the matrix unchanged.
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((g[i] != kIgnoreLabel && g[i] >= num_classes_) ||
        (p[i] != kIgnoreLabel && p[i] >= num_classes_)) {
      throw Error("class id " +
                  std::to_string(g[i] != kIgnoreLabel && g[i] >= num_classes_ ? g[i] : p[i]) +
                  " at pixel " + std::to_string(i) + " is not below num_classes " +
                  std::to_string(num_classes_));
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == kIgnoreLabel || p[i] == kIgnoreLabel) continue;
    ++counts_[static_cast<std::size_t>(g[i]) * num_classes_ + p[i]];
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    throw Error("cannot merge confusion matrices with " + std::to_string(num_classes_) +
                " and " + std::to_string(other.num_classes_) + " classes");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

ConfusionMatrix accumulate(ConfusionMatrix matrix, const LabelMask& pred, const LabelMask& gt) {
  matrix.accumulate(pred, gt);
  return matrix;
}

ConfusionMatrix merge(const ConfusionMatrix& a, const ConfusionMatrix& b) {
  ConfusionMatrix out = a;
  out.merge(b);
  return out;
}

std::vector<ClassIou> iou_per_class(const ConfusionMatrix& matrix) {
  const int k = matrix.num_classes();
  std::vector<std::int64_t> row(k, 0), col(k, 0);
  for (int g = 0; g < k; ++g) {
    for (int p = 0; p < k; ++p) {
      row[g] += matrix.at(g, p);
      col[p] += matrix.at(g, p);
    }
  }
  std::vector<ClassIou> out(k);
  for (int c = 0; c < k; ++c) {
    const std::int64_t tp = matrix.at(c, c);
    const std::int64_t fn = row[c] - tp;
    const std::int64_t fp = col[c] - tp;
    const std::int64_t uni = tp + fp + fn;
    if (uni > 0) out[c] = static_cast<double>(tp) / static_cast<double>(uni);
  }
  return out;
}

namespace {

std::optional<double> mean_defined(const std::vector<ClassIou>& per_class,
                                   std::span<const int> class_filter) {
  const int k = static_cast<int>(per_class.size());
  double sum = 0.0;
  int n = 0;
  auto take = [&](int c) {
    if (per_class[c]) {
      sum += *per_class[c];
      ++n;
    }
  };
  if (class_filter.empty()) {
    for (int c = 0; c < k; ++c) take(c);
  } else {
    std::vector<bool> seen(k, false);
    for (int c : class_filter) {
      if (c < 0 || c >= k) {
        throw Error("class filter entry " + std::to_string(c) + " is outside [0, " +
                    std::to_string(k) + ")");
      }
      if (seen[c]) continue;
      seen[c] = true;
      take(c);
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

std::optional<double> miou(const ConfusionMatrix& matrix, std::span<const int> class_filter) {
  return mean_defined(iou_per_class(matrix), class_filter);
}

IouBreakdown iou_breakdown(const ConfusionMatrix& matrix, std::span<const int> class_filter) {
  IouBreakdown out;
  out.per_class = iou_per_class(matrix);
  out.miou = mean_defined(out.per_class, class_filter);
  return out;
}

}  // namespace segvote
