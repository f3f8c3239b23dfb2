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


#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "segvote/dataset.hpp"
#include "segvote/error.hpp"
#include "test_support.hpp"

namespace segvote {
namespace {

using testing::make_mask;
using testing::TempDir;
using testing::write_file;

std::string manifest_json(int n) {
  std::string s = R"({"name": "synthetic", "entries": [)";
  for (int i = 0; i < n; ++i) {
    if (i) s += ",";
    const std::string id = "img" + std::to_string(i);
    s += R"({"id": ")" + id + R"(", "image": "img/)" + id + R"(.png", "gt_mask": "gt/)" + id +
         R"(.png"})";
  }
  return s + "]}";
}

DatasetManifest unchecked(int n) {
  return parse_manifest(manifest_json(n), "/data", ManifestOptions{false});
}

TEST(Manifest, LoadsEntryAndResolvesRelativePaths) {
  TempDir dir;
  std::filesystem::create_directories(dir / "img");
  std::filesystem::create_directories(dir / "gt");
  std::filesystem::create_directories(dir / "pred");
  write_file(dir / "img/a.png", "x");
  write_file(dir / "gt/a.png", "x");
  write_file(dir / "pred/a.png", "x");
  write_file(dir / "m.json", R"({"name": "one", "num_classes": 3, "entries": [
    {"id": "a", "image": "img/a.png", "gt_mask": "gt/a.png",
     "predictions": {"hamm@gaussian:low": "pred/a.png"}}]})");
  const DatasetManifest m = load_manifest(dir / "m.json");
  EXPECT_EQ(m.name, "one");
  EXPECT_EQ(m.num_classes, 3);
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].gt_mask, dir / "gt/a.png");
  EXPECT_EQ(m.entries[0].predictions.at("hamm@gaussian:low"), dir / "pred/a.png");
  EXPECT_NE(m.find("a"), nullptr);
  EXPECT_EQ(m.find("b"), nullptr);
}

TEST(Manifest, DuplicateIdIsNamed) {
  const std::string text = R"({"entries": [
    {"id": "dup", "image": "a", "gt_mask": "b"},
    {"id": "dup", "image": "c", "gt_mask": "d"}]})";
  try {
    parse_manifest(text, "/", ManifestOptions{false});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'dup'"), std::string::npos);
  }
}

TEST(Manifest, DanglingPathIsReported) {
  TempDir dir;
  try {
    parse_manifest(R"({"entries": [{"id": "a", "image": "nope.png", "gt_mask": "gt.png"}]})",
                   dir.path());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nope.png"), std::string::npos);
  }
}

TEST(Manifest, RejectsMalformedDocuments) {
  const ManifestOptions off{false};
  EXPECT_THROW(parse_manifest("{", "/", off), Error);
  EXPECT_THROW(parse_manifest("[]", "/", off), Error);
  EXPECT_THROW(parse_manifest(R"({"entries": {}})", "/", off), Error);
  EXPECT_THROW(parse_manifest(R"({"entries": [{"id": "a", "image": "x"}]})", "/", off), Error);
  EXPECT_THROW(parse_manifest(R"({"num_classes": 0, "entries": []})", "/", off), Error);
}

TEST(Manifest, ReadsLargeManifests) {
  EXPECT_EQ(unchecked(2100).entries.size(), 2100u);
}

TEST(Split, SizesFollowTheFraction) {
  for (const auto& [n, train, test] : {std::tuple{2100, 1680u, 420u}, std::tuple{3000, 2400u, 600u},
                                       std::tuple{2000, 1600u, 400u}}) {
    const SplitResult s = split(unchecked(n), 0.2, 17);
    EXPECT_EQ(s.train_ids.size(), train);
    EXPECT_EQ(s.test_ids.size(), test);
  }
}

TEST(Split, PartitionsTheIdsDeterministically) {
  const DatasetManifest m = unchecked(500);
  const SplitResult a = split(m, 0.2, 5);
  const SplitResult b = split(m, 0.2, 5);
  EXPECT_EQ(a.train_ids, b.train_ids);
  EXPECT_EQ(a.test_ids, b.test_ids);
  EXPECT_NE(a.test_ids, split(m, 0.2, 6).test_ids);

  std::set<std::string> all(a.train_ids.begin(), a.train_ids.end());
  for (const auto& id : a.test_ids) EXPECT_TRUE(all.insert(id).second);
  EXPECT_EQ(all.size(), 500u);

  auto index = [](const std::string& id) { return std::stoi(id.substr(3)); };
  EXPECT_TRUE(std::is_sorted(a.test_ids.begin(), a.test_ids.end(),
                             [&](auto& x, auto& y) { return index(x) < index(y); }));
}

TEST(Split, RejectsDegenerateInput) {
  EXPECT_THROW(split(unchecked(0), 0.2, 0), Error);
  EXPECT_THROW(split(unchecked(10), 0.0, 0), Error);
  EXPECT_THROW(split(unchecked(10), 1.0, 0), Error);
}

ImageBuffer ramp(int w, int h) {
  std::vector<double> s(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i) / s.size();
  return ImageBuffer(w, h, 1, s);
}

bool same_samples(const ImageBuffer& a, const ImageBuffer& b) {
  return a.width() == b.width() && a.height() == b.height() &&
         std::equal(a.samples().begin(), a.samples().end(), b.samples().begin(), b.samples().end());
}

TEST(Augment, ZeroProbabilityLeavesInputAlone) {
  const ImageBuffer img = ramp(5, 4);
  const LabelMask mask = make_mask(5, 4, std::vector<int>(20, 1), 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Augmented a = augment(img, mask, 0.0, seed);
    EXPECT_EQ(a.applied.kind, AugmentKind::kNone);
    EXPECT_EQ(a.mask, mask);
    EXPECT_TRUE(same_samples(a.image, img));
  }
}

TEST(Augment, HorizontalFlipTwiceRestores) {
  std::mt19937_64 rng(61);
  const LabelMask mask = testing::random_mask(rng, 7, 5, 3, 0.1);
  const ImageBuffer img = ramp(7, 5);
  const AugmentDescriptor flip{AugmentKind::kHorizontalFlip, 0, 1.0};
  const Augmented once = apply_transform(img, mask, flip);
  EXPECT_EQ(once.mask.at(0, 0), mask.at(6, 0));
  const Augmented twice = apply_transform(once.image, once.mask, flip);
  EXPECT_EQ(twice.mask, mask);
  EXPECT_TRUE(same_samples(twice.image, img));
}

TEST(Augment, RotationIsClockwiseAndSwapsDimensions) {
  const LabelMask mask = make_mask(3, 2, {0, 1, 2, 3, 4, 5}, 6);
  const Augmented r = apply_transform(ramp(3, 2), mask, {AugmentKind::kRotate, 90, 1.0});
  EXPECT_EQ(r.mask, make_mask(2, 3, {3, 0, 4, 1, 5, 2}, 6));
  EXPECT_EQ(r.image.width(), 2);
  EXPECT_EQ(r.image.height(), 3);
  AugmentDescriptor quarter{AugmentKind::kRotate, 90, 1.0};
  LabelMask m = mask;
  ImageBuffer img = ramp(3, 2);
  for (int i = 0; i < 4; ++i) {
    Augmented step = apply_transform(img, m, quarter);
    m = step.mask;
    img = step.image;
  }
  EXPECT_EQ(m, mask);
}

TEST(Augment, FrequencyMatchesProbability) {
  const ImageBuffer img = ramp(4, 4);
  const LabelMask mask = make_mask(4, 4, std::vector<int>(16, 0), 2);
  const int n = 100000;
  int applied = 0;
  std::array<int, 4> kinds{};
  for (int i = 0; i < n; ++i) {
    const Augmented a = augment(img, mask, 0.2, static_cast<std::uint64_t>(i));
    applied += a.applied.kind != AugmentKind::kNone;
    ++kinds[static_cast<int>(a.applied.kind)];
  }
  EXPECT_NEAR(static_cast<double>(applied) / n, 0.2, 0.01);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(kinds[k] / static_cast<double>(applied), 1.0 / 3.0, 0.02);
}

TEST(Augment, NeverInventsLabels) {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 200; ++i) {
    const LabelMask mask = testing::random_mask(rng, 9, 6, 3, 0.1);
    const Augmented a = augment(ramp(9, 6), mask, 1.0, static_cast<std::uint64_t>(i));
    const std::set<std::uint8_t> before(mask.labels().begin(), mask.labels().end());
    for (std::uint8_t v : a.mask.labels()) {
      if (v != kIgnoreLabel) ASSERT_TRUE(before.count(v)) << a.applied.to_string();
    }
  }
}

TEST(Augment, ImageAndMaskStayAligned) {
  // The bright rectangle in the image is exactly the class-1 rectangle in the mask.
  const int w = 20, h = 12;
  std::vector<double> s(w * h, 0.0);
  for (int y = 3; y < 7; ++y) {
    for (int x = 5; x < 11; ++x) s[y * w + x] = 1.0;
  }
  const ImageBuffer img(w, h, 1, s);
  const LabelMask mask = testing::paint(w, h, 2, 0, {{5, 3, 11, 7, 1}});
  const std::vector<AugmentDescriptor> all = {
      {AugmentKind::kHorizontalFlip, 0, 1.0}, {AugmentKind::kRotate, 90, 1.0},
      {AugmentKind::kRotate, 180, 1.0},       {AugmentKind::kRotate, 270, 1.0},
      {AugmentKind::kScale, 0, 0.8},          {AugmentKind::kScale, 0, 1.2}};
  for (const auto& t : all) {
    const Augmented a = apply_transform(img, mask, t);
    ASSERT_EQ(a.image.width(), a.mask.width());
    ASSERT_EQ(a.image.height(), a.mask.height());
    for (std::size_t i = 0; i < a.mask.size(); ++i) {
      ASSERT_EQ(a.image.samples()[i] == 1.0, a.mask[i] == 1) << t.to_string() << " at " << i;
    }
  }
}

TEST(Augment, DescriptorsPrintCompactly) {
  EXPECT_EQ(AugmentDescriptor{}.to_string(), "none");
  EXPECT_EQ((AugmentDescriptor{AugmentKind::kHorizontalFlip, 0, 1.0}.to_string()), "hflip");
  EXPECT_EQ((AugmentDescriptor{AugmentKind::kRotate, 270, 1.0}.to_string()), "rotate270");
  EXPECT_EQ((AugmentDescriptor{AugmentKind::kScale, 0, 1.2}.to_string()), "scale1.2");
}

TEST(Augment, RejectsBadInput) {
  const LabelMask mask = make_mask(2, 2, {0, 0, 0, 0}, 2);
  EXPECT_THROW(augment(ramp(3, 2), mask, 0.5, 0), Error);
  EXPECT_THROW(augment(ramp(2, 2), mask, 1.5, 0), Error);
  EXPECT_THROW(apply_transform(ramp(2, 2), mask, {AugmentKind::kRotate, 45, 1.0}), Error);
}

}  // namespace
}  // namespace segvote
