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


#include "segvote/components.hpp"

#include <numeric>
#include <string>

#include "segvote/error.hpp"

namespace segvote {

namespace {

class DisjointSet {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::int32_t> parent_;
};

}  // namespace

ComponentSet connected_components(const LabelMask& mask, int class_id) {
  if (class_id < 0 || class_id >= mask.num_classes()) {
    throw Error("class id " + std::to_string(class_id) + " is outside [0, " +
                std::to_string(mask.num_classes()) + ")");
  }
  const int w = mask.width();
  const int h = mask.height();
  const auto target = static_cast<std::uint8_t>(class_id);
  ComponentSet out;
  out.width = w;
  out.height = h;
  out.labels.assign(mask.size(), -1);

  // Pass 1: provisional labels from the already-visited half of the
  // 8-neighbourhood (W, NW, N, NE), equivalences recorded in a disjoint set.
  DisjointSet sets;
  auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) != target) continue;
      std::int32_t current = -1;
      const int nbr[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
      for (const auto& d : nbr) {
        const int nx = x + d[0];
        const int ny = y + d[1];
        if (nx < 0 || ny < 0 || nx >= w) continue;
        const std::int32_t l = out.labels[idx(nx, ny)];
        if (l < 0) continue;
        if (current < 0) {
          current = l;
        } else {
          sets.unite(current, l);
        }
      }
      out.labels[idx(x, y)] = current < 0 ? sets.make() : current;
    }
  }

  // Pass 2: resolve and renumber roots in order of first appearance.
  std::vector<std::int32_t> renumber;
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (out.labels[i] < 0) continue;
    const std::int32_t root = sets.find(out.labels[i]);
    if (static_cast<std::size_t>(root) >= renumber.size()) renumber.resize(root + 1, -1);
    if (renumber[root] < 0) {
      renumber[root] = static_cast<std::int32_t>(out.pixels.size());
      out.pixels.emplace_back();
    }
    out.labels[i] = renumber[root];
    out.pixels[renumber[root]].push_back(i);
  }
  return out;
}

}  // namespace segvote
