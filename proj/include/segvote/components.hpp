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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "segvote/mask.hpp"

namespace segvote {

/// 8-connected components of one class. Components are numbered 0..count-1
/// in row-major order of their first pixel.
struct ComponentSet {
  int width = 0;
  int height = 0;
  /// Component index per pixel, or -1 for pixels outside the class.
  std::vector<std::int32_t> labels;
  /// Row-major pixel indices of each component.
  std::vector<std::vector<std::size_t>> pixels;

  int count() const { return static_cast<int>(pixels.size()); }
};

ComponentSet connected_components(const LabelMask& mask, int class_id);

}  // namespace segvote
