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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace segvote {

/// Pixel value that marks "no label". Never voted, never scored.
inline constexpr std::uint8_t kIgnoreLabel = 255;
/// Largest usable class count: ids 0..254.
inline constexpr int kMaxClasses = 255;

/// Row-major raster of class ids in [0, num_classes) or kIgnoreLabel.
///
/// The constructor enforces the invariants; a LabelMask that exists is valid.
class LabelMask {
 public:
  LabelMask(int width, int height, std::vector<std::uint8_t> labels, int num_classes);

  static LabelMask filled(int width, int height, std::uint8_t label, int num_classes);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_classes() const { return num_classes_; }
  std::size_t size() const { return labels_.size(); }

  std::span<const std::uint8_t> labels() const { return labels_; }
  std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
  std::uint8_t at(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }

  /// Same pixels, different class count (revalidated).
  LabelMask with_num_classes(int num_classes) const;

  bool same_shape(const LabelMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const LabelMask&) const = default;

 private:
  int width_;
  int height_;
  int num_classes_;
  std::vector<std::uint8_t> labels_;
};

/// (largest non-ignore label) + 1, or 1 when every pixel is ignore.
int infer_num_classes(std::span<const std::uint8_t> labels);

/// Row-major, channel-interleaved intensities in [0, 1]; 1 or 3 channels.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, int channels, std::vector<double> samples);

  static ImageBuffer filled(int width, int height, int channels, double value);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  std::span<const double> samples() const { return samples_; }
  double sample(int x, int y, int c) const {
    return samples_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  bool operator==(const ImageBuffer&) const = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<double> samples_;
};

/// Reads an 8-bit single-channel PNG. num_classes, when given, overrides
/// inference and must cover every label present.
LabelMask load_mask(const std::filesystem::path& path,
                    std::optional<int> num_classes = std::nullopt);

void save_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Reads an 8/16-bit PNG (gray, RGB or palette) or a binary PGM/PPM (P5/P6).
/// Samples are divided by the format maximum.
ImageBuffer load_image(const std::filesystem::path& path);

/// Writes PNG when the extension is .png, otherwise binary PGM/PPM.
/// bit_depth is 8 or 16; samples are rounded to the nearest code.
void save_image(const ImageBuffer& image, const std::filesystem::path& path,
                int bit_depth = 8);

}  // namespace segvote
