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


#include "segvote/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segvote/error.hpp"

namespace segvote {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error("raster dimensions must be positive, got " + std::to_string(width) +
                "x" + std::to_string(height));
  }
}

}  // namespace

LabelMask::LabelMask(int width, int height, std::vector<std::uint8_t> labels,
                     int num_classes)
    : width_(width), height_(height), num_classes_(num_classes), labels_(std::move(labels)) {
  check_dims(width, height);
  if (num_classes < 1 || num_classes > kMaxClasses) {
    throw Error("num_classes must be in [1, 255], got " + std::to_string(num_classes));
  }
  if (labels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error("label count " + std::to_string(labels_.size()) + " does not match " +
                std::to_string(width) + "x" + std::to_string(height));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto v = labels_[i];
    if (v != kIgnoreLabel && v >= num_classes) {
      throw Error("label " + std::to_string(v) + " at pixel " + std::to_string(i) +
                  " is not below num_classes " + std::to_string(num_classes));
    }
  }
}

LabelMask LabelMask::filled(int width, int height, std::uint8_t label, int num_classes) {
  check_dims(width, height);
  return LabelMask(width, height,
                   std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, label),
                   num_classes);
}

LabelMask LabelMask::with_num_classes(int num_classes) const {
  return LabelMask(width_, height_, labels_, num_classes);
}

int infer_num_classes(std::span<const std::uint8_t> labels) {
  int top = -1;
  for (auto v : labels) {
    if (v != kIgnoreLabel) top = std::max(top, static_cast<int>(v));
  }
  return top < 0 ? 1 : top + 1;
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<double> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  check_dims(width, height);
  if (channels != 1 && channels != 3) {
    throw Error("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
  if (samples_.size() != pixel_count() * channels) {
    throw Error("sample count does not match image dimensions");
  }
  for (double s : samples_) {
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw Error("image sample outside [0, 1]: " + std::to_string(s));
    }
  }
}

ImageBuffer ImageBuffer::filled(int width, int height, int channels, double value) {
  check_dims(width, height);
  return ImageBuffer(width, height, channels,
                     std::vector<double>(static_cast<std::size_t>(width) * height * channels,
                                         value));
}

}  // namespace segvote
