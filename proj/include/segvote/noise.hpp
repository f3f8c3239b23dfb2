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
#include <optional>
#include <string>
#include <string_view>

#include "segvote/mask.hpp"

namespace segvote {

enum class NoiseFamily { kGaussian, kSaltPepper, kSpeckle };
enum class NoiseLevel { kLow, kMedium, kHigh };

inline constexpr NoiseFamily kAllFamilies[] = {NoiseFamily::kGaussian, NoiseFamily::kSaltPepper,
                                               NoiseFamily::kSpeckle};
inline constexpr NoiseLevel kAllLevels[] = {NoiseLevel::kLow, NoiseLevel::kMedium,
                                            NoiseLevel::kHigh};

/// Standard deviation of the low / medium / high severity: 0.01 / 0.05 / 0.1.
double resolve_level(NoiseLevel level);

std::string_view to_string(NoiseFamily family);
std::string_view to_string(NoiseLevel level);
/// Accepts "gaussian", "salt_pepper" (also "salt-and-pepper", "sp"), "speckle".
NoiseFamily parse_family(std::string_view name);
/// Accepts "low", "medium" (also "mid"), "high".
NoiseLevel parse_level(std::string_view name);

/// A fully resolved perturbation. For salt-and-pepper, sigma is the fraction
/// of pixel locations corrupted.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::kGaussian;
  std::optional<NoiseLevel> level;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  static NoiseSpec at_level(NoiseFamily family, NoiseLevel level, std::uint64_t seed);
  static NoiseSpec with_sigma(NoiseFamily family, double sigma, std::uint64_t seed);
};

/// clamp(s + n, 0, 1), n ~ N(0, sigma^2) per sample.
ImageBuffer gaussian_noise(const ImageBuffer& image, const NoiseSpec& spec);

/// Exactly round(sigma * W * H) pixel locations, chosen without replacement,
/// are set across all channels to 1.0 (salt) or 0.0 (pepper) with equal odds.
ImageBuffer salt_pepper_noise(const ImageBuffer& image, const NoiseSpec& spec);

/// clamp(s * (1 + n), 0, 1), n ~ N(0, sigma^2) per sample.
ImageBuffer speckle_noise(const ImageBuffer& image, const NoiseSpec& spec);

/// Dispatches on spec.family.
ImageBuffer apply_noise(const ImageBuffer& image, const NoiseSpec& spec);

}  // namespace segvote
