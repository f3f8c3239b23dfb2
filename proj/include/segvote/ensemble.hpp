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

#include <span>
#include <string>
#include <vector>

#include "segvote/mask.hpp"

namespace segvote {

/// Ordered ensemble membership. Member order is the tie-break priority: on an
/// exact tie the earliest listed member whose label is tied wins.
class EnsembleConfig {
 public:
  /// Unit weights.
  explicit EnsembleConfig(std::vector<std::string> member_names);
  EnsembleConfig(std::vector<std::string> member_names, std::vector<double> weights);

  const std::vector<std::string>& member_names() const { return names_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return names_.size(); }
  double total_weight() const;

  bool operator==(const EnsembleConfig&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> weights_;
};

/// Per-pixel vote mass of the winner minus that of the strongest other label.
struct MarginRaster {
  int width = 0;
  int height = 0;
  std::vector<double> values;
};

/// Hard-label plurality vote. Ignore is an abstention; a pixel is ignore only
/// when every member abstains.
LabelMask majority_vote(std::span<const LabelMask> masks, const EnsembleConfig& config);

MarginRaster vote_margin(std::span<const LabelMask> masks, const EnsembleConfig& config);

}  // namespace segvote
