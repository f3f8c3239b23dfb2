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

#include "segvote/ensemble.hpp"
#include "segvote/error.hpp"
#include "test_support.hpp"

namespace segvote {
namespace {

using testing::make_mask;

std::vector<LabelMask> pixel_votes(std::vector<int> votes, int k) {
  std::vector<LabelMask> out;
  for (int v : votes) out.push_back(make_mask(1, 1, {v}, k));
  return out;
}

const EnsembleConfig kAbc({"A", "B", "C"});

TEST(EnsembleConfig, Validation) {
  EXPECT_THROW(EnsembleConfig({"A"}), Error);
  EXPECT_THROW(EnsembleConfig({"A", "A"}), Error);
  EXPECT_THROW(EnsembleConfig({"A", "B"}, {1.0}), Error);
  EXPECT_THROW(EnsembleConfig({"A", "B"}, {1.0, 0.0}), Error);
  EXPECT_THROW(EnsembleConfig({"A", "B"}, {1.0, -2.0}), Error);
  EXPECT_EQ(EnsembleConfig({"A", "B"}).weights(), (std::vector<double>{1.0, 1.0}));
}

TEST(MajorityVote, UnanimousMasksAreReproduced) {
  std::mt19937_64 rng(1);
  const LabelMask m = testing::random_mask(rng, 7, 5, 4, 0.1);
  const std::vector<LabelMask> masks{m, m, m};
  EXPECT_EQ(majority_vote(masks, kAbc), m);
}

TEST(MajorityVote, TwoAgainstOne) {
  EXPECT_EQ(majority_vote(pixel_votes({1, 1, 2}, 3), kAbc)[0], 1);
}

TEST(MajorityVote, ThreeWayTieGoesToFirstMember) {
  EXPECT_EQ(majority_vote(pixel_votes({0, 1, 2}, 3), kAbc)[0], 0);
  EXPECT_EQ(majority_vote(pixel_votes({2, 1, 0}, 3), kAbc)[0], 2);
}

TEST(MajorityVote, IgnoreAbstains) {
  EXPECT_EQ(majority_vote(pixel_votes({255, 1, 2}, 3), kAbc)[0], 1);
  EXPECT_EQ(majority_vote(pixel_votes({255, 255, 2}, 3), kAbc)[0], 2);
  EXPECT_EQ(majority_vote(pixel_votes({255, 255, 255}, 3), kAbc)[0], kIgnoreLabel);
}

TEST(MajorityVote, WeightsShiftTheOutcome) {
  const EnsembleConfig heavy_c({"A", "B", "C"}, {1.0, 1.0, 2.5});
  EXPECT_EQ(majority_vote(pixel_votes({1, 1, 2}, 3), heavy_c)[0], 2);
  const EnsembleConfig tied_c({"A", "B", "C"}, {1.0, 1.0, 2.0});
  EXPECT_EQ(majority_vote(pixel_votes({1, 1, 2}, 3), tied_c)[0], 1);
}

TEST(MajorityVote, RejectsBadInputs) {
  const std::vector<LabelMask> one{make_mask(1, 1, {0}, 2)};
  EXPECT_THROW(majority_vote(one, EnsembleConfig({"A", "B"})), Error);
  const std::vector<LabelMask> sizes{make_mask(1, 1, {0}, 2), make_mask(2, 1, {0, 0}, 2)};
  EXPECT_THROW(majority_vote(sizes, EnsembleConfig({"A", "B"})), Error);
  const std::vector<LabelMask> ks{make_mask(1, 1, {0}, 2), make_mask(1, 1, {0}, 3)};
  EXPECT_THROW(majority_vote(ks, EnsembleConfig({"A", "B"})), Error);
  const std::vector<LabelMask> count{make_mask(1, 1, {0}, 2), make_mask(1, 1, {0}, 2)};
  EXPECT_THROW(majority_vote(count, kAbc), Error);
}

TEST(VoteMargin, TallyArithmetic) {
  EXPECT_EQ(vote_margin(pixel_votes({2, 2, 2}, 3), kAbc).values[0], 3.0);
  EXPECT_EQ(vote_margin(pixel_votes({1, 1, 2}, 3), kAbc).values[0], 1.0);
  EXPECT_EQ(vote_margin(pixel_votes({0, 1, 2}, 3), kAbc).values[0], 0.0);
  EXPECT_EQ(vote_margin(pixel_votes({255, 255, 255}, 3), kAbc).values[0], 0.0);
}

TEST(VoteMargin, NonnegativeAndTotalWhenUnanimous) {
  std::mt19937_64 rng(3);
  const EnsembleConfig cfg({"A", "B", "C", "D"}, {0.5, 1.25, 2.0, 0.75});
  for (int t = 0; t < 50; ++t) {
    std::vector<LabelMask> masks;
    for (int i = 0; i < 4; ++i) masks.push_back(testing::random_mask(rng, 6, 6, 3, 0.1));
    const MarginRaster mr = vote_margin(masks, cfg);
    for (double v : mr.values) ASSERT_GE(v, 0.0);
  }
  const LabelMask one = make_mask(1, 1, {1}, 2);
  const std::vector<LabelMask> same{one, one, one, one};
  EXPECT_DOUBLE_EQ(vote_margin(same, cfg).values[0], 4.5);
}

TEST(MajorityVote, WeightScalingDoesNotChangeOutput) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> weight(0.1, 3.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> w(4);
    for (auto& x : w) x = weight(rng);
    // Occasionally force exact ties through equal weights.
    if (t % 3 == 0) w = {1.0, 1.0, 1.0, 1.0};
    const double s = scale(rng);
    std::vector<double> ws(w);
    for (auto& x : ws) x *= s;
    std::vector<LabelMask> masks;
    for (int i = 0; i < 4; ++i) masks.push_back(testing::random_mask(rng, 8, 8, 3, 0.1));
    ASSERT_EQ(majority_vote(masks, EnsembleConfig({"a", "b", "c", "d"}, w)),
              majority_vote(masks, EnsembleConfig({"a", "b", "c", "d"}, ws)));
  }
}

TEST(MajorityVote, AgreementWinsRegardlessOfWeights) {
  const EnsembleConfig cfg({"A", "B", "C"}, {0.2, 5.0, 1.0});
  EXPECT_EQ(majority_vote(pixel_votes({3, 3, 3}, 4), cfg)[0], 3);
}

TEST(MajorityVote, Deterministic) {
  std::mt19937_64 rng(5);
  std::vector<LabelMask> masks;
  for (int i = 0; i < 3; ++i) masks.push_back(testing::random_mask(rng, 32, 32, 5, 0.05));
  EXPECT_EQ(majority_vote(masks, kAbc), majority_vote(masks, kAbc));
}

}  // namespace
}  // namespace segvote
