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


#include "segvote/noise.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "segvote/error.hpp"
#include "segvote/random.hpp"

namespace segvote {

namespace {

constexpr std::uint64_t kGaussianStream = hash_name("noise/gaussian");
constexpr std::uint64_t kSpeckleStream = hash_name("noise/speckle");
constexpr std::uint64_t kSaltPepperPickStream = hash_name("noise/salt_pepper/pick");
constexpr std::uint64_t kSaltPepperSaltStream = hash_name("noise/salt_pepper/salt");

void check_sigma(const NoiseSpec& spec) {
  if (!std::isfinite(spec.sigma) || spec.sigma < 0.0) {
    throw Error("noise sigma must be a nonnegative finite number");
  }
  if (spec.family == NoiseFamily::kSaltPepper && spec.sigma > 1.0) {
    throw Error("salt-and-pepper amount must be in [0, 1]");
  }
}

void check_family(const NoiseSpec& spec, NoiseFamily expected) {
  if (spec.family != expected) {
    throw Error("noise spec is " + std::string(to_string(spec.family)) + ", expected " +
                std::string(to_string(expected)));
  }
  check_sigma(spec);
}

}  // namespace

double resolve_level(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::kLow:
      return 0.01;
    case NoiseLevel::kMedium:
      return 0.05;
    case NoiseLevel::kHigh:
      return 0.1;
  }
  return 0.0;
}

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian:
      return "gaussian";
    case NoiseFamily::kSaltPepper:
      return "salt_pepper";
    case NoiseFamily::kSpeckle:
      return "speckle";
  }
  return "?";
}

std::string_view to_string(NoiseLevel level) {
  switch (level) {
    case NoiseLevel::kLow:
      return "low";
    case NoiseLevel::kMedium:
      return "medium";
    case NoiseLevel::kHigh:
      return "high";
  }
  return "?";
}

NoiseFamily parse_family(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "salt_pepper" || name == "salt-and-pepper" || name == "sp") {
    return NoiseFamily::kSaltPepper;
  }
  if (name == "speckle") return NoiseFamily::kSpeckle;
  throw Error("unknown noise family '" + std::string(name) +
              "' (expected gaussian, salt_pepper or speckle)");
}

NoiseLevel parse_level(std::string_view name) {
  if (name == "low") return NoiseLevel::kLow;
  if (name == "medium" || name == "mid") return NoiseLevel::kMedium;
  if (name == "high") return NoiseLevel::kHigh;
  throw Error("unknown noise level '" + std::string(name) + "' (expected low, medium or high)");
}

NoiseSpec NoiseSpec::at_level(NoiseFamily family, NoiseLevel level, std::uint64_t seed) {
  return NoiseSpec{family, level, resolve_level(level), seed};
}

NoiseSpec NoiseSpec::with_sigma(NoiseFamily family, double sigma, std::uint64_t seed) {
  NoiseSpec spec{family, std::nullopt, sigma, seed};
  check_sigma(spec);
  return spec;
}

ImageBuffer gaussian_noise(const ImageBuffer& image, const NoiseSpec& spec) {
  check_family(spec, NoiseFamily::kGaussian);
  if (spec.sigma == 0.0) return image;
  const std::uint64_t key = derive_key(spec.seed, kGaussianStream);
  const auto in = image.samples();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::clamp(in[i] + spec.sigma * standard_normal_at(key, i), 0.0, 1.0);
  }
  return ImageBuffer(image.width(), image.height(), image.channels(), std::move(out));
}

ImageBuffer speckle_noise(const ImageBuffer& image, const NoiseSpec& spec) {
  check_family(spec, NoiseFamily::kSpeckle);
  if (spec.sigma == 0.0) return image;
  const std::uint64_t key = derive_key(spec.seed, kSpeckleStream);
  const auto in = image.samples();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::clamp(in[i] * (1.0 + spec.sigma * standard_normal_at(key, i)), 0.0, 1.0);
  }
  return ImageBuffer(image.width(), image.height(), image.channels(), std::move(out));
}

ImageBuffer salt_pepper_noise(const ImageBuffer& image, const NoiseSpec& spec) {
  check_family(spec, NoiseFamily::kSaltPepper);
  const std::size_t n = image.pixel_count();
  const auto count = static_cast<std::size_t>(std::llround(spec.sigma * static_cast<double>(n)));
  if (count == 0) return image;

  // Each location gets an independent 64-bit priority; the `count` smallest
  // (ties broken by index) are corrupted. Equivalent to a uniform sample
  // without replacement and independent of traversal order.
  const std::uint64_t pick_key = derive_key(spec.seed, kSaltPepperPickStream);
  const std::uint64_t salt_key = derive_key(spec.seed, kSaltPepperSaltStream);
  std::vector<std::pair<std::uint64_t, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = {SplitMix64::at(pick_key, i), i};
  if (count < n) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count),
                     order.end());
  }

  std::vector<double> out(image.samples().begin(), image.samples().end());
  const int ch = image.channels();
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t px = order[k].second;
    const double value = (SplitMix64::at(salt_key, px) >> 63) != 0 ? 1.0 : 0.0;
    for (int c = 0; c < ch; ++c) out[px * ch + c] = value;
  }
  return ImageBuffer(image.width(), image.height(), ch, std::move(out));
}

ImageBuffer apply_noise(const ImageBuffer& image, const NoiseSpec& spec) {
  switch (spec.family) {
    case NoiseFamily::kGaussian:
      return gaussian_noise(image, spec);
    case NoiseFamily::kSaltPepper:
      return salt_pepper_noise(image, spec);
    case NoiseFamily::kSpeckle:
      return speckle_noise(image, spec);
  }
  throw Error("unknown noise family");
}

}  // namespace segvote
