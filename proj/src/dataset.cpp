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


#include "segvote/dataset.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "segvote/error.hpp"
#include "segvote/random.hpp"

namespace segvote {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSplitStream = hash_name("dataset/split");
constexpr std::uint64_t kAugmentStream = hash_name("dataset/augment");

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(where + ": missing required key '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) {
    throw Error(where + ": '" + key + "' must be a non-empty string");
  }
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void check_exists(const std::filesystem::path& p, const std::string& entry_id,
                  const std::string& what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) {
    throw Error("entry '" + entry_id + "': " + what + " '" + p.string() + "' does not exist");
  }
}

}  // namespace

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir,
                               const ManifestOptions& options) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("manifest must be a JSON object");

  DatasetManifest manifest;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw Error("manifest: 'name' must be a string");
    manifest.name = it->get<std::string>();
  }
  if (auto it = doc.find("num_classes"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() < 1 || it->get<int>() > kMaxClasses) {
      throw Error("manifest: 'num_classes' must be an integer in [1, 255]");
    }
    manifest.num_classes = it->get<int>();
  }
  const json& entries = require(doc, "entries", "manifest");
  if (!entries.is_array()) throw Error("manifest: 'entries' must be an array");

  std::set<std::string> ids;
  manifest.entries.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    const std::string where = "manifest entry #" + std::to_string(i);
    if (!e.is_object()) throw Error(where + " must be an object");
    ManifestEntry entry;
    entry.id = require_string(e, "id", where);
    if (!ids.insert(entry.id).second) {
      throw Error("manifest: duplicate entry id '" + entry.id + "'");
    }
    entry.image = resolve(base_dir, require_string(e, "image", where));
    entry.gt_mask = resolve(base_dir, require_string(e, "gt_mask", where));
    if (auto it = e.find("predictions"); it != e.end()) {
      if (!it->is_object()) throw Error(where + ": 'predictions' must be an object");
      for (const auto& [name, p] : it->items()) {
        if (!p.is_string()) {
          throw Error("entry '" + entry.id + "': prediction '" + name + "' must be a path string");
        }
        entry.predictions.emplace(name, resolve(base_dir, p.get<std::string>()));
      }
    }
    if (options.check_files) {
      check_exists(entry.image, entry.id, "image");
      check_exists(entry.gt_mask, entry.id, "gt_mask");
      for (const auto& [name, p] : entry.predictions) {
        check_exists(p, entry.id, "prediction '" + name + "'");
      }
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path, const ManifestOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), path.parent_path(), options);
}

SplitResult split(const DatasetManifest& manifest, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error("test fraction must be strictly between 0 and 1");
  }
  const std::size_t n = manifest.entries.size();
  if (n == 0) throw Error("cannot split an empty manifest");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(derive_key(seed, kSplitStream));
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[uniform_below(rng, i + 1)]);
  }
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

  std::vector<bool> in_test(n, false);
  for (std::size_t i = 0; i < n_test; ++i) in_test[order[i]] = true;
  SplitResult out;
  out.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? out.test_ids : out.train_ids).push_back(manifest.entries[i].id);
  }
  return out;
}

std::string AugmentDescriptor::to_string() const {
  switch (kind) {
    case AugmentKind::kNone:
      return "none";
    case AugmentKind::kHorizontalFlip:
      return "hflip";
    case AugmentKind::kRotate:
      return "rotate" + std::to_string(degrees);
    case AugmentKind::kScale: {
      std::ostringstream s;
      s << "scale" << factor;
      return s.str();
    }
  }
  return "?";
}

namespace {

// Destination geometry plus a map from destination pixel to source pixel
// index (nullopt = padding). Image and mask use the same map, which keeps
// them pixel-aligned.
struct PixelMap {
  int width = 0;
  int height = 0;
  std::vector<std::optional<std::size_t>> source;
};

PixelMap build_map(int w, int h, const AugmentDescriptor& t) {
  PixelMap m;
  auto src = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  switch (t.kind) {
    case AugmentKind::kNone:
    case AugmentKind::kHorizontalFlip:
      m.width = w;
      m.height = h;
      break;
    case AugmentKind::kRotate:
      if (t.degrees != 90 && t.degrees != 180 && t.degrees != 270) {
        throw Error("rotation must be 90, 180 or 270 degrees");
      }
      m.width = t.degrees == 180 ? w : h;
      m.height = t.degrees == 180 ? h : w;
      break;
    case AugmentKind::kScale:
      if (!(t.factor > 0.0)) throw Error("scale factor must be positive");
      m.width = w;
      m.height = h;
      break;
  }
  m.source.resize(static_cast<std::size_t>(m.width) * m.height);

  const long sw = std::max(1L, std::lround(w * t.factor));
  const long sh = std::max(1L, std::lround(h * t.factor));
  const long ox = (sw - w) / 2;
  const long oy = (sh - h) / 2;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      std::optional<std::size_t> s;
      switch (t.kind) {
        case AugmentKind::kNone:
          s = src(x, y);
          break;
        case AugmentKind::kHorizontalFlip:
          s = src(w - 1 - x, y);
          break;
        case AugmentKind::kRotate:
          // Clockwise: source (sx, sy) lands on (h-1-sy, sx) for 90 degrees.
          if (t.degrees == 90) {
            s = src(y, h - 1 - x);
          } else if (t.degrees == 180) {
            s = src(w - 1 - x, h - 1 - y);
          } else {
            s = src(w - 1 - y, x);
          }
          break;
        case AugmentKind::kScale: {
          const long xs = x + ox;
          const long ys = y + oy;
          if (xs < 0 || ys < 0 || xs >= sw || ys >= sh) break;
          const long sx = std::min<long>(w - 1, ((2 * xs + 1) * w) / (2 * sw));
          const long sy = std::min<long>(h - 1, ((2 * ys + 1) * h) / (2 * sh));
          s = src(static_cast<int>(sx), static_cast<int>(sy));
          break;
        }
      }
      m.source[static_cast<std::size_t>(y) * m.width + x] = s;
    }
  }
  return m;
}

}  // namespace

Augmented apply_transform(const ImageBuffer& image, const LabelMask& mask,
                          const AugmentDescriptor& transform) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error("image is " + std::to_string(image.width()) + "x" +
                std::to_string(image.height()) + " but mask is " + std::to_string(mask.width()) +
                "x" + std::to_string(mask.height()));
  }
  if (transform.kind == AugmentKind::kNone) return {image, mask, transform};
  const PixelMap m = build_map(mask.width(), mask.height(), transform);
  const int ch = image.channels();
  std::vector<double> samples(m.source.size() * ch, 0.0);
  std::vector<std::uint8_t> labels(m.source.size(), kIgnoreLabel);
  const auto in = image.samples();
  for (std::size_t i = 0; i < m.source.size(); ++i) {
    if (!m.source[i]) continue;
    const std::size_t s = *m.source[i];
    labels[i] = mask[s];
    for (int c = 0; c < ch; ++c) samples[i * ch + c] = in[s * ch + c];
  }
  return {ImageBuffer(m.width, m.height, ch, std::move(samples)),
          LabelMask(m.width, m.height, std::move(labels), mask.num_classes()), transform};
}

Augmented augment(const ImageBuffer& image, const LabelMask& mask, double prob,
                  std::uint64_t seed) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw Error("augmentation probability must be in [0, 1]");
  SplitMix64 rng(derive_key(seed, kAugmentStream));
  AugmentDescriptor t;
  if (to_unit(rng.next()) < prob) {
    switch (uniform_below(rng, 3)) {
      case 0:
        t.kind = AugmentKind::kHorizontalFlip;
        break;
      case 1:
        t.kind = AugmentKind::kRotate;
        t.degrees = 90 * static_cast<int>(1 + uniform_below(rng, 3));
        break;
      default:
        t.kind = AugmentKind::kScale;
        t.factor = uniform_below(rng, 2) == 0 ? 0.8 : 1.2;
        break;
    }
  }
  return apply_transform(image, mask, t);
}

}  // namespace segvote
