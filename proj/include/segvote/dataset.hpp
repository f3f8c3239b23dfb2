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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "segvote/mask.hpp"

namespace segvote {

/// One image with its ground truth and any named prediction masks. Prediction
/// keys are predictor names, or "name@family:level" for a noisy-cell set.
struct ManifestEntry {
  std::string id;
  std::filesystem::path image;
  std::filesystem::path gt_mask;
  std::map<std::string, std::filesystem::path> predictions;
};

struct DatasetManifest {
  std::string name;
  std::optional<int> num_classes;
  std::vector<ManifestEntry> entries;

  const ManifestEntry* find(const std::string& id) const;
};

struct ManifestOptions {
  /// Fail on references to files that do not exist.
  bool check_files = true;
};

/// Manifest JSON schema:
///
///   {
///     "name": "cityscapes-sidewalk",
///     "num_classes": 19,                  (optional)
///     "entries": [
///       {"id": "aachen_000001",
///        "image": "img/aachen_000001.png",
///        "gt_mask": "gt/aachen_000001.png",
///        "predictions": {"hamm": "pred/hamm/aachen_000001.png",
///                        "hamm@gaussian:low": "pred/hamm_g_low/aachen_000001.png"}}
///     ]
///   }
///
/// Relative paths resolve against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options = {});
DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir,
                               const ManifestOptions& options = {});

struct SplitResult {
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;
};

/// Seeded Fisher-Yates shuffle; the first round(test_fraction * n) shuffled ids
/// form the test set. Both lists are reported in manifest order.
SplitResult split(const DatasetManifest& manifest, double test_fraction = 0.2,
                  std::uint64_t seed = 0);

enum class AugmentKind { kNone, kHorizontalFlip, kRotate, kScale };

struct AugmentDescriptor {
  AugmentKind kind = AugmentKind::kNone;
  /// Clockwise quarter turns in degrees, for kRotate.
  int degrees = 0;
  /// For kScale.
  double factor = 1.0;

  std::string to_string() const;
  bool operator==(const AugmentDescriptor&) const = default;
};

struct Augmented {
  ImageBuffer image;
  LabelMask mask;
  AugmentDescriptor applied;
};

/// With probability `prob`, applies one transform to image and mask alike:
/// flip, rotation (90/180/270, equally likely) or scale (0.8 or 1.2, equally
/// likely), the three kinds equally likely. Rotations by 90 and 270 swap
/// width and height. Scaling is nearest-neighbour, then centre-cropped or
/// padded back to the original size (image pads with 0, mask with ignore).
Augmented augment(const ImageBuffer& image, const LabelMask& mask, double prob = 0.2,
                  std::uint64_t seed = 0);

/// Applies a specific transform; augment() draws one and calls this.
Augmented apply_transform(const ImageBuffer& image, const LabelMask& mask,
                          const AugmentDescriptor& transform);

}  // namespace segvote
