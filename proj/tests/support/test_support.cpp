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


#include "test_support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace segvote::testing {

TempDir::TempDir() {
  static std::mt19937_64 rng(std::random_device{}());
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto p = std::filesystem::temp_directory_path() / ("segvote-test-" + std::to_string(rng()));
    if (std::filesystem::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("could not create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

LabelMask make_mask(int width, int height, const std::vector<int>& labels, int num_classes) {
  std::vector<std::uint8_t> v(labels.begin(), labels.end());
  return LabelMask(width, height, std::move(v), num_classes);
}

LabelMask random_mask(std::mt19937_64& rng, int width, int height, int num_classes,
                      double ignore_prob) {
  std::uniform_int_distribution<int> label(0, num_classes - 1);
  std::bernoulli_distribution ignore(ignore_prob);
  std::vector<std::uint8_t> v(static_cast<std::size_t>(width) * height);
  for (auto& x : v) x = ignore(rng) ? kIgnoreLabel : static_cast<std::uint8_t>(label(rng));
  return LabelMask(width, height, std::move(v), num_classes);
}

LabelMask paint(int width, int height, int num_classes, int background,
                const std::vector<Rect>& rects) {
  std::vector<std::uint8_t> v(static_cast<std::size_t>(width) * height,
                              static_cast<std::uint8_t>(background));
  for (const auto& r : rects) {
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        v[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(r.label);
      }
    }
  }
  return LabelMask(width, height, std::move(v), num_classes);
}

SceneDataset write_dataset(const std::filesystem::path& dir, int entries, int width, int height,
                           int num_classes, std::uint64_t seed,
                           const std::map<std::string, PredictionFn>& predictions) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "img");
  fs::create_directories(dir / "gt");
  for (const auto& [name, fn] : predictions) fs::create_directories(dir / "pred" / name);

  std::mt19937_64 rng(seed);
  SceneDataset out;
  std::string manifest = R"({"name": "scenes", "entries": [)";
  for (int i = 0; i < entries; ++i) {
    std::vector<Rect> rects;
    for (int r = 0; r < 4; ++r) {
      // Plain modulo keeps the scenes identical across standard libraries.
      auto xs = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(width)); };
      auto ys = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(height)); };
      const int x0 = xs(), y0 = ys();
      const int x1 = std::min(width, x0 + 1 + xs() / 2);
      const int y1 = std::min(height, y0 + 1 + ys() / 2);
      rects.push_back({x0, y0, x1, y1, 1 + r % (num_classes - 1)});
    }
    LabelMask gt = paint(width, height, num_classes, 0, rects);
    const std::string id = "scene" + std::to_string(i);
    save_mask(gt, dir / "gt" / (id + ".png"));
    save_image(ImageBuffer::filled(width, height, 1, 0.5), dir / "img" / (id + ".png"));
    if (i) manifest += ",";
    manifest += R"({"id": ")" + id + R"(", "image": "img/)" + id + R"(.png", "gt_mask": "gt/)" +
                id + R"(.png")";
    if (!predictions.empty()) {
      manifest += R"(, "predictions": {)";
      bool first = true;
      for (const auto& [name, fn] : predictions) {
        save_mask(fn(gt, i), dir / "pred" / name / (id + ".png"));
        manifest += (first ? "\"" : ", \"") + name + R"(": "pred/)" + name + "/" + id + R"(.png")";
        first = false;
      }
      manifest += "}";
    }
    manifest += "}";
    out.gts.push_back(std::move(gt));
  }
  manifest += "]}";
  out.manifest = dir / "manifest.json";
  write_file(out.manifest, manifest);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::vector<std::optional<double>> oracle_iou(const LabelMask& pred, const LabelMask& gt, int k) {
  std::vector<std::optional<double>> out(k);
  for (int c = 0; c < k; ++c) {
    std::set<std::size_t> p, g;
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (gt[i] == kIgnoreLabel || pred[i] == kIgnoreLabel) continue;
      if (pred[i] == c) p.insert(i);
      if (gt[i] == c) g.insert(i);
    }
    std::set<std::size_t> inter, uni;
    for (auto i : p) {
      if (g.count(i)) inter.insert(i);
      uni.insert(i);
    }
    uni.insert(g.begin(), g.end());
    if (!uni.empty()) out[c] = static_cast<double>(inter.size()) / static_cast<double>(uni.size());
  }
  return out;
}

std::optional<double> oracle_mean(const std::vector<std::optional<double>>& iou) {
  double sum = 0;
  int n = 0;
  for (const auto& v : iou) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::uint8_t oracle_vote(const std::vector<std::uint8_t>& votes, const std::vector<double>& weights) {
  std::map<int, double> mass;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    if (votes[i] != kIgnoreLabel) mass[votes[i]] += weights[i];
  }
  if (mass.empty()) return kIgnoreLabel;
  double best = 0;
  for (const auto& [label, m] : mass) best = std::max(best, m);
  for (auto v : votes) {
    if (v != kIgnoreLabel && mass[v] == best) return v;
  }
  return kIgnoreLabel;
}

std::vector<std::size_t> oracle_components(const LabelMask& mask, int class_id) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<bool> seen(mask.size(), false);
  std::vector<std::size_t> sizes;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t s = static_cast<std::size_t>(y) * w + x;
      if (seen[s] || mask[s] != class_id) continue;
      std::size_t n = 0;
      std::vector<std::pair<int, int>> stack{{x, y}};
      seen[s] = true;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        ++n;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (!seen[j] && mask[j] == class_id) {
              seen[j] = true;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }
      sizes.push_back(n);
    }
  }
  return sizes;
}

}  // namespace segvote::testing
