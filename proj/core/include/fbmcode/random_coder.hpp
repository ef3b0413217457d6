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

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fbmcode/codebook.hpp"
#include "fbmcode/grid_paths.hpp"
#include "fbmcode/rng.hpp"

namespace fbmcode {

/// i.i.d. FBM paths on [0,1], all drawn from one RngSpec. Path k (0-based)
/// is drawn from stream `rng.child(k)`, so a pool is a prefix of one fixed
/// infinite sequence and growing the pool never changes earlier members.
class RandomPool {
 public:
  static RandomPool build(double hurst, int n_per_unit, std::size_t size, const RngSpec& rng);

  std::size_t size() const { return paths_.size(); }
  const std::vector<SampledPath>& paths() const { return paths_; }
  const SampledPath& path(std::size_t k) const { return paths_.at(k); }
  const RngSpec& rng() const { return rng_; }
  double hurst() const { return hurst_; }
  int n_per_unit() const { return n_per_unit_; }

 private:
  RandomPool(double hurst, int n_per_unit, RngSpec rng, std::vector<SampledPath> paths);

  double hurst_;
  int n_per_unit_;
  RngSpec rng_;
  std::vector<SampledPath> paths_;
};

/// Outcome of first-hit coding. `hit_index` is 1-based; none means the
/// pool was exhausted (the infinite-T case).
struct RandomCode {
  std::optional<std::size_t> hit_index;
  double radius = 0.0;
  std::optional<CodeLength> code_length;
  double distortion = 0.0;  ///< sup distance to the hit entry; 0 on a miss

  bool hit() const { return hit_index.has_value(); }
};

/// p_n = 6 / (pi^2 n^2), n >= 1.
double zeta_weight(std::size_t n);

/// -log p_n = 2 log n + log(pi^2/6).
CodeLength zeta_code_length(std::size_t n);

/// Scans the pool in order and returns the first entry within `radius` in sup norm.
RandomCode first_hit(const RandomPool& pool, const SampledPath& x, double radius);

/// First hit over a freshly streamed pool: candidates are drawn one at a time
/// from `engine` until a hit or `cap` draws.
RandomCode first_hit_streamed(const FbmSampler& sampler, Engine& engine, const SampledPath& x,
                              double radius, std::size_t cap);

/// First hit at radius r^{-H}.
RandomCode encode_at_rate(const RandomPool& pool, const SampledPath& x, double rate, double hurst);

struct SmallBallEstimate {
  double estimate = 0.0;
  double lower = 0.0;  ///< 95% Wilson interval
  double upper = 0.0;
  std::size_t hits = 0;
  std::size_t trials = 0;
};

/// Monte Carlo estimate of P(||x - X~|| <= eps | x) in sup norm over `mc`
/// fresh FBM samples on the grid of x.
SmallBallEstimate smallball_conditional(const SampledPath& x, double eps, std::size_t mc,
                                        const RngSpec& rng);

/// Same estimate with a caller-provided sampler (saves the embedding setup).
SmallBallEstimate smallball_conditional(const FbmSampler& sampler, const SampledPath& x,
                                        double eps, std::size_t mc, const RngSpec& rng);

/// Reconstruction used when the pool has no hit: the nearest pool entry.
NearestResult fallback_on_miss(const RandomPool& pool, const SampledPath& x, const Norm& norm);

}  // namespace fbmcode
