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


#include "segvote/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "segvote/error.hpp"

namespace segvote {

EnsembleConfig::EnsembleConfig(std::vector<std::string> member_names)
    : EnsembleConfig(member_names, std::vector<double>(member_names.size(), 1.0)) {}

EnsembleConfig::EnsembleConfig(std::vector<std::string> member_names, std::vector<double> weights)
    : names_(std::move(member_names)), weights_(std::move(weights)) {
  if (names_.size() < 2) {
    throw Error("an ensemble needs at least 2 members, got " + std::to_string(names_.size()));
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw Error("duplicate ensemble member '" + n + "'");
  }
  if (weights_.size() != names_.size()) {
    throw Error("ensemble has " + std::to_string(names_.size()) + " members but " +
                std::to_string(weights_.size()) + " weights");
  }
  for (double w : weights_) {
    if (!std::isfinite(w) || w <= 0.0) {
      throw Error("ensemble weights must be positive and finite");
    }
  }
}

double EnsembleConfig::total_weight() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

namespace {

void check_members(std::span<const LabelMask> masks, const EnsembleConfig& config) {
  if (masks.size() < 2) {
    throw Error("majority vote needs at least 2 masks, got " + std::to_string(masks.size()));
  }
  if (masks.size() != config.size()) {
    throw Error("got " + std::to_string(masks.size()) + " masks for " +
                std::to_string(config.size()) + " ensemble members");
  }
  for (std::size_t i = 1; i < masks.size(); ++i) {
    if (!masks[i].same_shape(masks[0])) {
      throw Error("mask of member '" + config.member_names()[i] +
                  "' differs in size from member '" + config.member_names()[0] + "'");
    }
    if (masks[i].num_classes() != masks[0].num_classes()) {
      throw Error("mask of member '" + config.member_names()[i] + "' has " +
                  std::to_string(masks[i].num_classes()) + " classes, expected " +
                  std::to_string(masks[0].num_classes()));
    }
  }
}

struct PixelVote {
  std::uint8_t label = kIgnoreLabel;
  double margin = 0.0;
};

// Masses closer than this fraction of the total weight count as tied, so the
// outcome depends only on weight ratios and not on rounding in the sums.
constexpr double kTieTolerance = 1e-9;

double mass_of(std::span<const LabelMask> masks, const std::vector<double>& weights,
               std::size_t pixel, std::uint8_t label) {
  double mass = 0.0;
  for (std::size_t j = 0; j < masks.size(); ++j) {
    if (masks[j][pixel] == label) mass += weights[j];
  }
  return mass;
}

// Members are few; O(M^2) per pixel avoids any per-pixel allocation.
PixelVote tally(std::span<const LabelMask> masks, const std::vector<double>& weights,
                std::size_t pixel, double tie_eps) {
  const std::size_t m = masks.size();
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto label = masks[i][pixel];
    if (label != kIgnoreLabel) best = std::max(best, mass_of(masks, weights, pixel, label));
  }
  PixelVote out;
  if (best == 0.0) return out;
  for (std::size_t i = 0; i < m; ++i) {
    const auto label = masks[i][pixel];
    if (label != kIgnoreLabel && mass_of(masks, weights, pixel, label) >= best - tie_eps) {
      out.label = label;
      break;
    }
  }
  double runner_up = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto label = masks[i][pixel];
    if (label == kIgnoreLabel || label == out.label) continue;
    runner_up = std::max(runner_up, mass_of(masks, weights, pixel, label));
  }
  out.margin = best - runner_up;
  if (out.margin <= tie_eps) out.margin = 0.0;
  return out;
}

}  // namespace

LabelMask majority_vote(std::span<const LabelMask> masks, const EnsembleConfig& config) {
  check_members(masks, config);
  const double tie_eps = kTieTolerance * config.total_weight();
  std::vector<std::uint8_t> out(masks[0].size());
  for (std::size_t px = 0; px < out.size(); ++px) {
    out[px] = tally(masks, config.weights(), px, tie_eps).label;
  }
  return LabelMask(masks[0].width(), masks[0].height(), std::move(out), masks[0].num_classes());
}

MarginRaster vote_margin(std::span<const LabelMask> masks, const EnsembleConfig& config) {
  check_members(masks, config);
  const double tie_eps = kTieTolerance * config.total_weight();
  MarginRaster out{masks[0].width(), masks[0].height(), std::vector<double>(masks[0].size())};
  for (std::size_t px = 0; px < out.values.size(); ++px) {
    out.values[px] = tally(masks, config.weights(), px, tie_eps).margin;
  }
  return out;
}

}  // namespace segvote
