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


#include "segvote/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "segvote/components.hpp"
#include "segvote/error.hpp"
#include "segvote/random.hpp"

namespace segvote {

namespace {

constexpr std::uint64_t kFlipStream = hash_name("synth/iid/flip");
constexpr std::uint64_t kReplaceStream = hash_name("synth/iid/replace");
constexpr std::uint64_t kDropStream = hash_name("synth/drop_component");
constexpr std::uint64_t kPredictStream = hash_name("synth/predict");

std::uint8_t fallback_label(int target_class, int num_classes) {
  if (target_class != 0) return 0;
  if (num_classes < 2) {
    throw Error("cannot relabel class 0 in a single-class mask");
  }
  return 1;
}

// Most frequent label in `counts` (ties to the smaller id), or nullopt.
std::optional<std::uint8_t> mode_of(const std::vector<int>& counts) {
  int best = 0;
  std::optional<std::uint8_t> label;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    if (counts[l] > best) {
      best = counts[l];
      label = static_cast<std::uint8_t>(l);
    }
  }
  return label;
}

LabelMask dilate(const LabelMask& gt, int radius, std::uint8_t target) {
  const int w = gt.width();
  const int h = gt.height();
  std::vector<std::uint8_t> out(gt.labels().begin(), gt.labels().end());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto v = gt.at(x, y);
      if (v == target || v == kIgnoreLabel) continue;
      bool near = false;
      for (int dy = -radius; dy <= radius && !near; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= h) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int nx = x + dx;
          if (nx >= 0 && nx < w && gt.at(nx, ny) == target) {
            near = true;
            break;
          }
        }
      }
      if (near) out[static_cast<std::size_t>(y) * w + x] = target;
    }
  }
  return LabelMask(w, h, std::move(out), gt.num_classes());
}

LabelMask erode(const LabelMask& gt, int radius, std::uint8_t target) {
  const int w = gt.width();
  const int h = gt.height();
  const std::uint8_t fallback = fallback_label(target, gt.num_classes());
  std::vector<std::uint8_t> out(gt.labels().begin(), gt.labels().end());
  std::vector<int> counts(gt.num_classes());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (gt.at(x, y) != target) continue;
      // Out-of-image and ignore pixels neither erode nor vote.
      std::fill(counts.begin(), counts.end(), 0);
      bool removed = false;
      for (int dy = -radius; dy <= radius; ++dy) {
        const int ny = y + dy;
        if (ny < 0 || ny >= h) continue;
        for (int dx = -radius; dx <= radius; ++dx) {
          const int nx = x + dx;
          if (nx < 0 || nx >= w) continue;
          const auto v = gt.at(nx, ny);
          if (v == target || v == kIgnoreLabel) continue;
          removed = true;
          ++counts[v];
        }
      }
      if (removed) out[static_cast<std::size_t>(y) * w + x] = mode_of(counts).value_or(fallback);
    }
  }
  return LabelMask(w, h, std::move(out), gt.num_classes());
}

LabelMask drop_components(const LabelMask& gt, double fraction, std::uint8_t target,
                          std::uint64_t seed) {
  const int w = gt.width();
  const int h = gt.height();
  const ComponentSet cc = connected_components(gt, target);
  const int n = cc.count();
  if (n == 0) return gt;
  const std::uint8_t fallback = fallback_label(target, gt.num_classes());
  const int drop = std::min(
      n, static_cast<int>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));

  std::vector<std::pair<std::uint64_t, int>> order(n);
  const std::uint64_t key = derive_key(seed, kDropStream);
  for (int c = 0; c < n; ++c) order[c] = {SplitMix64::at(key, static_cast<std::uint64_t>(c)), c};
  std::sort(order.begin(), order.end());

  std::vector<std::uint8_t> out(gt.labels().begin(), gt.labels().end());
  std::vector<int> counts(gt.num_classes());
  for (int k = 0; k < drop; ++k) {
    const auto& comp = cc.pixels[order[k].second];
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i : comp) {
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const auto v = gt.at(nx, ny);
          if (v != target && v != kIgnoreLabel) ++counts[v];
        }
      }
    }
    const std::uint8_t fill = mode_of(counts).value_or(fallback);
    for (std::size_t i : comp) out[i] = fill;
  }
  return LabelMask(w, h, std::move(out), gt.num_classes());
}

}  // namespace

std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::kIid:
      return "iid";
    case Structure::kDilate:
      return "dilate";
    case Structure::kErode:
      return "erode";
    case Structure::kDropComponent:
      return "drop_component";
  }
  return "?";
}

Structure parse_structure(std::string_view name) {
  if (name == "iid") return Structure::kIid;
  if (name == "dilate") return Structure::kDilate;
  if (name == "erode") return Structure::kErode;
  if (name == "drop_component") return Structure::kDropComponent;
  throw Error("unknown corruption mode '" + std::string(name) +
              "' (expected iid, dilate, erode or drop_component)");
}

LabelMask corrupt_iid(const LabelMask& gt, double flip_prob, std::uint64_t seed) {
  if (!(flip_prob >= 0.0 && flip_prob < 1.0)) {
    throw Error("flip probability must be in [0, 1), got " + std::to_string(flip_prob));
  }
  const int k = gt.num_classes();
  if (flip_prob == 0.0 || k < 2) return gt;
  const std::uint64_t flip_key = derive_key(seed, kFlipStream);
  const std::uint64_t replace_key = derive_key(seed, kReplaceStream);
  std::vector<std::uint8_t> out(gt.labels().begin(), gt.labels().end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == kIgnoreLabel) continue;
    if (to_unit(SplitMix64::at(flip_key, i)) >= flip_prob) continue;
    SplitMix64 rng(SplitMix64::at(replace_key, i));
    const auto r = static_cast<std::uint8_t>(uniform_below(rng, static_cast<std::uint64_t>(k - 1)));
    out[i] = r < out[i] ? r : static_cast<std::uint8_t>(r + 1);
  }
  return LabelMask(gt.width(), gt.height(), std::move(out), k);
}

LabelMask corrupt_structured(const LabelMask& gt, Structure mode, double magnitude,
                             int target_class, std::uint64_t seed) {
  if (target_class < 0 || target_class >= gt.num_classes()) {
    throw Error("target class " + std::to_string(target_class) + " is outside [0, " +
                std::to_string(gt.num_classes()) + ")");
  }
  const auto target = static_cast<std::uint8_t>(target_class);
  switch (mode) {
    case Structure::kDilate:
    case Structure::kErode: {
      if (!(magnitude >= 1.0) || magnitude != std::floor(magnitude) || magnitude > 1e6) {
        throw Error("morphology radius must be an integer >= 1, got " + std::to_string(magnitude));
      }
      const int r = static_cast<int>(magnitude);
      return mode == Structure::kDilate ? dilate(gt, r, target) : erode(gt, r, target);
    }
    case Structure::kDropComponent:
      if (!(magnitude > 0.0 && magnitude <= 1.0)) {
        throw Error("drop_component fraction must be in (0, 1], got " + std::to_string(magnitude));
      }
      return drop_components(gt, magnitude, target, seed);
    case Structure::kIid:
      break;
  }
  throw Error("corrupt_structured needs dilate, erode or drop_component");
}

void PredictorSpec::validate() const {
  if (!(base_flip_prob >= 0.0 && base_flip_prob < 1.0)) {
    throw Error("predictor '" + name + "': base_flip_prob must be in [0, 1)");
  }
  for (double s : noise_sensitivity) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error("predictor '" + name + "': noise sensitivities must be nonnegative");
    }
  }
  switch (structure) {
    case Structure::kDilate:
    case Structure::kErode:
      if (!(magnitude >= 1.0) || magnitude != std::floor(magnitude)) {
        throw Error("predictor '" + name + "': radius must be an integer >= 1");
      }
      break;
    case Structure::kDropComponent:
      if (!(magnitude > 0.0 && magnitude <= 1.0)) {
        throw Error("predictor '" + name + "': drop fraction must be in (0, 1]");
      }
      break;
    case Structure::kIid:
      break;
  }
  if (structure != Structure::kIid && (target_class < 0 || target_class >= kMaxClasses)) {
    throw Error("predictor '" + name + "': bad target_class");
  }
}

double effective_flip_prob(const PredictorSpec& spec, const std::optional<NoiseSpec>& noise) {
  double p = spec.base_flip_prob;
  if (noise) p += spec.noise_sensitivity[static_cast<std::size_t>(noise->family)] * noise->sigma;
  return std::clamp(p, 0.0, std::nextafter(0.5, 0.0));
}

LabelMask predict(const PredictorSpec& spec, const LabelMask& gt,
                  const std::optional<NoiseSpec>& noise, std::uint64_t stream_seed) {
  spec.validate();
  const std::uint64_t seed = derive_key(derive_key(spec.seed, stream_seed), kPredictStream);
  const double p = effective_flip_prob(spec, noise);
  if (spec.structure == Structure::kIid) return corrupt_iid(gt, p, seed);
  const LabelMask shaped =
      corrupt_structured(gt, spec.structure, spec.magnitude, spec.target_class, seed);
  return corrupt_iid(shaped, p, derive_key(seed, kFlipStream));
}

}  // namespace segvote
