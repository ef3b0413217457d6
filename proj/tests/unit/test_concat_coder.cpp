// Copyright 2026 The fbmcode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fbmcode/concat_coder.hpp"

using namespace fbmcode;

namespace {

BaseQuantizer nearest_base(std::vector<SampledPath> entries, std::optional<std::vector<double>> weights = {}) {
  Codebook cb(std::move(entries), std::move(weights));
  auto shared = std::make_shared<const Codebook>(cb);
  return BaseQuantizer{std::move(cb), [shared](const SampledPath& block) {
                         return nearest(*shared, block, Norm::sup()).index;
                       }};
}

std::vector<double> uniform(std::size_t k) { return std::vector<double>(k, 1.0 / static_cast<double>(k)); }

// A base whose codebook holds the blocks of `w` itself, each perturbed by up to
// `d` in sup norm: every block error is at most d, which is the worst case the
// error propagation has to absorb.
BaseQuantizer perturbed_base(const SampledPath& w, double d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> noise(-d, d);
  std::vector<SampledPath> entries;
  for (int i = 0; i < w.horizon(); ++i) {
    const SampledPath block = shift_increment(w, i);
    std::vector<double> v(block.values().begin(), block.values().end());
    for (double& x : v) x += noise(rng);
    entries.emplace_back(w.hurst(), 1, w.n_per_unit(), std::move(v));
  }
  auto next = std::make_shared<std::size_t>(0);
  const std::size_t count = entries.size();
  return BaseQuantizer{Codebook(std::move(entries)), [next, count](const SampledPath&) {
                         return (*next)++ % count;
                       }};
}

// Straightforward evaluation of the concatenation recursion on the grid.
std::vector<double> oracle_reconstruction(const SampledPath& w, const BaseQuantizer& base, const ConcatParams& params) {
  const int n = w.horizon();
  const std::size_t npu = static_cast<std::size_t>(w.n_per_unit());
  std::vector<double> grid;
  for (int k = 0; k < params.M; ++k) grid.push_back(-params.d + 2.0 * k * params.d / (params.M - 1));
  std::vector<double> out(static_cast<std::size_t>(n) * npu + 1);
  double start = 0.0;
  std::vector<double> prev;
  for (int i = 0; i < n; ++i) {
    const std::size_t base_index = nearest(base.codebook, shift_increment(w, i), Norm::sup()).index;
    const auto entry = base.codebook.entry(base_index).values();
    if (i > 0) {
      const double left = start + prev.back();
      double best_xi = grid[0];
      for (double xi : grid) {
        if (std::abs(w[i * npu] - (left + xi)) < std::abs(w[i * npu] - (left + best_xi))) best_xi = xi;
      }
      start = left + best_xi;
    }
    for (std::size_t j = 0; j <= npu; ++j) out[i * npu + j] = start + entry[j];
    prev.assign(entry.begin(), entry.end());
  }
  return out;
}

std::vector<SampledPath> fbm_blocks(std::size_t count, std::uint64_t seed, int npu, double hurst = 0.5) {
  const FbmSampler sampler(hurst, 1, npu);
  std::vector<SampledPath> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(sampler.sample(RngSpec{seed, k}));
  return out;
}

}  // namespace

TEST(OffsetGrid, Examples) {
  EXPECT_EQ(offset_grid(3, 1.0), (std::vector<double>{-1.0, 0.0, 1.0}));
  EXPECT_EQ(offset_grid(2, 0.5), (std::vector<double>{-0.5, 0.5}));
  for (int M : {2, 3, 5, 8, 17}) {
    const auto g = offset_grid(M, 0.7);
    EXPECT_EQ(g.size(), static_cast<std::size_t>(M));
    EXPECT_NEAR(g.back() - g.front(), 1.4, 1e-15);
  }
  EXPECT_THROW(offset_grid(1, 1.0), std::invalid_argument);
  EXPECT_THROW(offset_grid(3, 0.0), std::invalid_argument);
}

TEST(SelectOffset, Examples) {
  const std::vector<double> g{-1.0, 0.0, 1.0};
  EXPECT_EQ(select_offset(0.4, 0.0, g).xi, 0.0);
  const auto tie = select_offset(0.5, 0.0, g);
  EXPECT_EQ(tie.xi, 0.0);
  EXPECT_EQ(tie.index, 1);
  EXPECT_EQ(select_offset(2.25, 2.25, g).xi, 0.0);
  EXPECT_EQ(select_offset(-7.0, 0.0, g).index, 0);
  EXPECT_THROW(select_offset(0.0, 0.0, std::vector<double>{}), std::invalid_argument);
}

TEST(OffsetsForRate, FloorOfExponential) {
  EXPECT_EQ(offsets_for_rate_increment(1.1), 3);
  EXPECT_EQ(offsets_for_rate_increment(std::log(8.0) + 1e-9), 8);
  EXPECT_EQ(offsets_for_rate_increment(std::log(8.0) - 1e-9), 7);
  EXPECT_THROW(offsets_for_rate_increment(0.5), std::invalid_argument);
}

TEST(EncodeConcat, SingleBlockIsBaseOutput) {
  const auto entries = fbm_blocks(20, 1, 16);
  const BaseQuantizer base = nearest_base(entries, uniform(20));
  const SampledPath w = sample_fbm(0.5, 1, 16, RngSpec{2, 0});
  const ConcatCodeword cw = encode_concat(w, base, {3, 1.0});
  ASSERT_EQ(cw.blocks(), 1u);
  EXPECT_TRUE(cw.offset_indices.empty());
  const SampledPath decoded = decode_concat(cw, base);
  EXPECT_EQ(decoded.kind(), PathKind::step);
  EXPECT_EQ(decoded.with_kind(PathKind::sampled), entries[cw.block_indices[0]]);
}

TEST(EncodeConcat, PerfectBaseAndGridOffsetsGiveZeroError) {
  const int npu = 8;
  const auto entries = fbm_blocks(6, 3, npu);
  const BaseQuantizer base = nearest_base(entries);
  const ConcatParams params{5, 0.4};
  const auto grid = offset_grid(params.M, params.d);

  const std::vector<std::size_t> picks{2, 0, 5, 5, 1};
  const std::vector<int> offsets{4, 0, 2, 1};
  std::vector<double> v(picks.size() * npu + 1);
  double level = 0.0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    if (i > 0) level += entries[picks[i - 1]].values().back() + grid[offsets[i - 1]];
    for (int j = 0; j <= npu; ++j) v[i * npu + j] = level + entries[picks[i]][j];
  }
  const SampledPath w(0.5, static_cast<int>(picks.size()), npu, std::move(v));
  const ConcatCodeword cw = encode_concat(w, base, params);
  EXPECT_EQ(cw.block_indices, picks);
  EXPECT_EQ(cw.offset_indices, offsets);
  EXPECT_LE(sup_distance(w, decode_concat(cw, base).with_kind(PathKind::sampled)), 1e-12);
}

TEST(EncodeConcat, WorstCaseBaseRespectsPropagationBound) {
  std::mt19937_64 rng(7);
  const ConcatParams params{3, 0.3};
  const FbmSampler sampler(0.5, 8, 16);
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const SampledPath w = sampler.sample(RngSpec{8, t});
    const BaseQuantizer base = perturbed_base(w, params.d, rng);
    const ConcatCodeword cw = encode_concat(w, base, params);
    for (double e : block_errors(w, cw, base)) ASSERT_LE(e, params.d);
    const double err = sup_distance(w, decode_concat(cw, base).with_kind(PathKind::sampled));
    ASSERT_LE(err, 0.45 + 1e-12) << "trial " << t;
  }
}

TEST(EncodeConcat, MatchesIndependentRecursion) {
  const auto entries = fbm_blocks(40, 9, 16, 0.3);
  const BaseQuantizer base = nearest_base(entries);
  const FbmSampler sampler(0.3, 5, 16);
  for (std::uint64_t t = 0; t < 100; ++t) {
    const ConcatParams params{2 + static_cast<int>(t % 7), 0.25 + 0.05 * static_cast<double>(t % 5)};
    const SampledPath w = sampler.sample(RngSpec{10, t});
    const SampledPath decoded = decode_concat(encode_concat(w, base, params), base);
    const auto want = oracle_reconstruction(w, base, params);
    ASSERT_EQ(decoded.values().size(), want.size());
    for (std::size_t k = 0; k < want.size(); ++k) ASSERT_NEAR(decoded[k], want[k], 1e-12);
  }
}

TEST(EncodeConcat, DeterministicAndJsonRoundTrip) {
  const BaseQuantizer base = nearest_base(fbm_blocks(10, 11, 8));
  const SampledPath w = sample_fbm(0.5, 6, 8, RngSpec{12, 0});
  const ConcatCodeword a = encode_concat(w, base, {4, 0.5});
  EXPECT_EQ(a, encode_concat(w, base, {4, 0.5}));
  EXPECT_EQ(ConcatCodeword::from_json(a.to_json()), a);
}

TEST(EncodeConcat, RejectsBadInputs) {
  const BaseQuantizer base = nearest_base(fbm_blocks(4, 13, 8));
  EXPECT_THROW(encode_concat(sample_fbm(0.5, 2, 16, RngSpec{1, 1}), base, {3, 1.0}), std::invalid_argument);
  EXPECT_THROW(encode_concat(sample_fbm(0.5, 2, 8, RngSpec{1, 1}), base, {1, 1.0}), std::invalid_argument);
  ConcatCodeword cw{{0, 1}, {5}, {3, 1.0}};
  EXPECT_THROW(decode_concat(cw, base), std::out_of_range);
  cw.offset_indices.clear();
  EXPECT_THROW(decode_concat(cw, base), std::invalid_argument);
}

TEST(ConcatCodeLength, Examples) {
  const BaseQuantizer base = nearest_base(fbm_blocks(5, 14, 8), uniform(5));
  EXPECT_NEAR(concat_code_length(ConcatCodeword{{3}, {}, {3, 1.0}}, base).nats, std::log(5.0), 1e-14);
  const ConcatCodeword cw{{0, 4, 2, 2}, {0, 2, 1}, {3, 1.0}};
  EXPECT_NEAR(concat_code_length(cw, base).nats, 3 * std::log(3.0) + 4 * std::log(5.0), 1e-13);
  const BaseQuantizer unweighted = nearest_base(fbm_blocks(5, 14, 8));
  EXPECT_THROW(concat_code_length(cw, unweighted), std::invalid_argument);
}

TEST(ConcatCodeLength, ErgodicAverageApproachesEntropyPlusOffsets) {
  RandomBaseConfig config;
  config.hurst = 0.5;
  config.n_per_unit = 16;
  config.pool_size = 16;
  config.radius = 0.5;
  config.training_blocks = 20'000;
  const BaseQuantizer base = make_random_base(config, RngSpec{5, 0});
  const double target = entropy(base.codebook.weights()) + std::log(3.0);
  const int n = 200;
  const FbmSampler sampler(0.5, n, 16);
  double total = 0.0;
  const int paths = 20;
  for (int t = 0; t < paths; ++t) {
    const SampledPath w = sampler.sample(RngSpec{15, static_cast<std::uint64_t>(t)});
    total += concat_code_length(encode_concat(w, base, {3, 0.5}), base).nats / n;
  }
  EXPECT_NEAR(total / paths, target, 0.02 * target);
}

TEST(RescaleScheme, SingleBlockMatchesBase) {
  const auto entries = fbm_blocks(30, 16, 32);
  const BaseQuantizer base = nearest_base(entries, uniform(30));
  const SampledPath w = sample_fbm(0.5, 1, 32, RngSpec{17, 0});
  const RescaledCode code = rescale_scheme(w, 1, base, {3, 1.0});
  const std::size_t j = nearest(base.codebook, w, Norm::sup()).index;
  EXPECT_EQ(code.reconstruction.with_kind(PathKind::sampled), entries[j]);
  EXPECT_NEAR(code.code_length.nats, std::log(30.0), 1e-14);
}

TEST(RescaleScheme, ErrorScalesByBlockCount) {
  for (double hurst : {0.3, 0.5, 0.7}) {
    const BaseQuantizer base = nearest_base(fbm_blocks(50, 18, 8, hurst), uniform(50));
    for (int n : {2, 4, 8}) {
      const SampledPath w = sample_fbm(hurst, 1, 8 * n, RngSpec{19, static_cast<std::uint64_t>(n)});
      const RescaledCode code = rescale_scheme(w, n, base, {3, 1.0});
      const double err = sup_distance(w, code.reconstruction.with_kind(PathKind::sampled));
      const double expected = std::pow(n, -hurst) * code.error_on_horizon;
      EXPECT_NEAR(err, expected, 1e-14 * std::max(1.0, expected));
    }
  }
}

TEST(RescaleScheme, HalvedBoundAtFourBlocks) {
  RandomBaseConfig config;
  config.hurst = 0.5;
  config.n_per_unit = 16;
  config.pool_size = 256;
  config.radius = 1.0;
  config.training_blocks = 512;
  const BaseQuantizer base = make_random_base(config, RngSpec{20, 0});
  const ConcatParams params{3, 1.0};
  int qualified = 0;
  for (std::uint64_t t = 0; t < 300; ++t) {
    const SampledPath w = sample_fbm(0.5, 1, 64, RngSpec{21, t});
    const RescaledCode code = rescale_scheme(w, 4, base, params);
    if (!code.within_budget) continue;
    ++qualified;
    EXPECT_LE(sup_distance(w, code.reconstruction.with_kind(PathKind::sampled)),
              params.error_bound() / 2.0 * (1.0 + 1e-12));
  }
  EXPECT_GT(qualified, 200);
}

TEST(Typical, MembershipAndBound) {
  EXPECT_TRUE(typical_membership(1.0 + std::log(3.0), 1.0, 3, 0.0));
  EXPECT_FALSE(typical_membership(1.0 + std::log(3.0) + 1e-9, 1.0, 3, 0.0));
  EXPECT_DOUBLE_EQ(typical_codebook_bound(10, 1.0, 3, 0.1), 10 * (1.0 + std::log(3.0) + 0.1));
}

TEST(Typical, MostLongPathsAreMembers) {
  RandomBaseConfig config;
  config.hurst = 0.5;
  config.n_per_unit = 16;
  config.pool_size = 16;
  config.radius = 0.5;
  config.training_blocks = 20'000;
  const BaseQuantizer base = make_random_base(config, RngSpec{5, 0});
  const double h = entropy(base.codebook.weights());
  const int n = 100;
  const FbmSampler sampler(0.5, n, 16);
  int members = 0;
  const int paths = 1000;
  for (int t = 0; t < paths; ++t) {
    const SampledPath w = sampler.sample(RngSpec{22, static_cast<std::uint64_t>(t)});
    const double per_unit = concat_code_length(encode_concat(w, base, {3, 0.5}), base).nats / n;
    members += typical_membership(per_unit, h, 3, 0.2);
  }
  EXPECT_GE(members, 950);
}

TEST(RandomBase, WeightsFormADistributionAndEncodeIsInRange) {
  RandomBaseConfig config;
  config.hurst = 0.7;
  config.n_per_unit = 8;
  config.pool_size = 32;
  config.training_blocks = 200;
  const BaseQuantizer base = make_random_base(config, RngSpec{23, 0});
  EXPECT_NO_THROW(require_probability_vector(base.codebook.weights()));
  for (double w : base.codebook.weights()) EXPECT_GT(w, 0.0);
  const SampledPath block = sample_fbm(0.7, 1, 8, RngSpec{24, 0});
  EXPECT_LT(base.encode(block), 32u);
  config.radius = 0.0;
  EXPECT_THROW(make_random_base(config, RngSpec{23, 0}), std::invalid_argument);
}
