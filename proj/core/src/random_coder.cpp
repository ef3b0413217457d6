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

#include "fbmcode/random_coder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fbmcode {

namespace {

// Exact sup distance if it is <= radius, otherwise some value > radius.
double sup_within(const SampledPath& a, const SampledPath& b, double radius) {
  const auto u = a.values();
  const auto v = b.values();
  double best = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = std::abs(u[k] - v[k]);
    if (d > best) {
      best = d;
      if (best > radius) return best;
    }
  }
  return best;
}

RandomCode make_hit(std::size_t index, double radius, double distortion) {
  return RandomCode{index, radius, zeta_code_length(index), distortion};
}

void require_radius(double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
}

}  // namespace

RandomPool::RandomPool(double hurst, int n_per_unit, RngSpec rng, std::vector<SampledPath> paths)
    : hurst_(hurst), n_per_unit_(n_per_unit), rng_(rng), paths_(std::move(paths)) {}

RandomPool RandomPool::build(double hurst, int n_per_unit, std::size_t size, const RngSpec& rng) {
  if (size == 0) throw std::invalid_argument("RandomPool: size must be positive");
  const FbmSampler sampler(hurst, 1, n_per_unit);
  std::vector<SampledPath> paths;
  paths.reserve(size);
  for (std::size_t k = 0; k < size; ++k) paths.push_back(sampler.sample(rng.child(k)));
  return RandomPool(hurst, n_per_unit, rng, std::move(paths));
}

double zeta_weight(std::size_t n) {
  if (n < 1) throw std::invalid_argument("zeta_weight: n must be >= 1");
  const double nn = static_cast<double>(n);
  return 6.0 / (std::numbers::pi * std::numbers::pi * nn * nn);
}

CodeLength zeta_code_length(std::size_t n) {
  if (n < 1) throw std::invalid_argument("zeta_code_length: n must be >= 1");
  return {2.0 * std::log(static_cast<double>(n)) +
          std::log(std::numbers::pi * std::numbers::pi / 6.0)};
}

RandomCode first_hit(const RandomPool& pool, const SampledPath& x, double radius) {
  require_radius(radius);
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const auto& candidate = pool.path(k);
    require_same_grid(candidate, x);
    const double d = sup_within(candidate, x, radius);
    if (d <= radius) return make_hit(k + 1, radius, d);
  }
  return RandomCode{std::nullopt, radius, std::nullopt, 0.0};
}

RandomCode first_hit_streamed(const FbmSampler& sampler, Engine& engine, const SampledPath& x,
                              double radius, std::size_t cap) {
  require_radius(radius);
  for (std::size_t k = 0; k < cap; ++k) {
    const SampledPath candidate = sampler.sample(engine);
    require_same_grid(candidate, x);
    const double d = sup_within(candidate, x, radius);
    if (d <= radius) return make_hit(k + 1, radius, d);
  }
  return RandomCode{std::nullopt, radius, std::nullopt, 0.0};
}

RandomCode encode_at_rate(const RandomPool& pool, const SampledPath& x, double rate, double hurst) {
  if (!(rate > 0.0)) throw std::invalid_argument("encode_at_rate: rate must be positive");
  return first_hit(pool, x, std::pow(rate, -hurst));
}

SmallBallEstimate smallball_conditional(const FbmSampler& sampler, const SampledPath& x,
                                        double eps, std::size_t mc, const RngSpec& rng) {
  if (mc < 100) throw std::invalid_argument("smallball_conditional: mc must be >= 100");
  require_radius(eps);
  Engine engine = make_engine(rng);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < mc; ++i) {
    const SampledPath y = sampler.sample(engine);
    require_same_grid(y, x);
    if (sup_within(y, x, eps) <= eps) ++hits;
  }
  const double n = static_cast<double>(mc);
  const double phat = static_cast<double>(hits) / n;
  const double z = 1.959963984540054;
  const double denom = 1.0 + z * z / n;
  const double centre = (phat + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
  const double lower = hits == 0 ? 0.0 : std::max(0.0, centre - half);
  const double upper = hits == mc ? 1.0 : std::min(1.0, centre + half);
  return SmallBallEstimate{phat, lower, upper, hits, mc};
}

SmallBallEstimate smallball_conditional(const SampledPath& x, double eps, std::size_t mc,
                                        const RngSpec& rng) {
  const FbmSampler sampler(x.hurst(), x.horizon(), x.n_per_unit());
  return smallball_conditional(sampler, x, eps, mc, rng);
}

NearestResult fallback_on_miss(const RandomPool& pool, const SampledPath& x, const Norm& norm) {
  return nearest(std::span<const SampledPath>(pool.paths()), x, norm);
}

}  // namespace fbmcode
