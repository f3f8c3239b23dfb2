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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "segvote/mask.hpp"
#include "segvote/noise.hpp"

namespace segvote {

enum class Structure { kIid, kDilate, kErode, kDropComponent };

std::string_view to_string(Structure s);
Structure parse_structure(std::string_view name);

/// Each non-ignore pixel keeps its label with probability 1 - flip_prob, else
/// takes a uniformly chosen different label. Requires 0 <= flip_prob < 1.
LabelMask corrupt_iid(const LabelMask& gt, double flip_prob, std::uint64_t seed);

/// Geometric corruption of one class.
///   dilate          grow target_class with a (2r+1)^2 square; magnitude = r >= 1
///   erode           shrink it with the same element; magnitude = r >= 1
///   drop_component  remove ceil(magnitude * n) of its n components, chosen by
///                   seed; magnitude in (0, 1]
/// Vacated pixels take the most frequent non-target label around them (ties to
/// the smaller id); class 0 when there is none, or 1 when the target is 0.
/// Ignore pixels are never changed and never affect the outcome.
LabelMask corrupt_structured(const LabelMask& gt, Structure mode, double magnitude,
                             int target_class, std::uint64_t seed);

/// Synthetic stand-in for a trained model: a seeded corruption of ground
/// truth whose error rate grows linearly with the noise sigma.
struct PredictorSpec {
  std::string name;
  double base_flip_prob = 0.0;
  /// Extra flip probability per unit sigma, indexed by NoiseFamily.
  std::array<double, 3> noise_sensitivity{0.0, 0.0, 0.0};
  Structure structure = Structure::kIid;
  /// Radius or component fraction for the structured modes.
  double magnitude = 1.0;
  int target_class = 1;
  std::uint64_t seed = 0;

  /// Throws on out-of-range probabilities, sensitivities or magnitude.
  void validate() const;
};

/// base + sensitivity[family] * sigma, clamped to [0, 0.5).
double effective_flip_prob(const PredictorSpec& spec, const std::optional<NoiseSpec>& noise);

/// Structured modes apply their geometric error first, then the iid flips at
/// the effective probability. stream_seed is mixed with spec.seed so callers
/// can give every image its own independent stream.
LabelMask predict(const PredictorSpec& spec, const LabelMask& gt,
                  const std::optional<NoiseSpec>& noise, std::uint64_t stream_seed = 0);

}  // namespace segvote
