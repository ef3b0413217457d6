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

#include "fbmcode/increment_coder.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fbmcode {

double increment_weight_constant() {
  return std::log(std::numbers::pi * std::numbers::pi / 3.0 - 1.0);
}

double increment_weight(std::int64_t k) {
  const double m = static_cast<double>(k < 0 ? -k : k) + 1.0;
  return std::exp(-increment_weight_constant()) / (m * m);
}

IncrementCode encode_sums(std::span<const double> sums, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("encode_sums: eps must be positive");
  const double step = 2.0 * eps;
  const double c = increment_weight_constant();

  IncrementCode code;
  code.eps = eps;
  code.offsets.reserve(sums.size());
  // The reconstruction stays on the lattice, so track it as an integer level.
  std::int64_t level = 0;
  double nats = 0.0;
  for (double s : sums) {
    // Nearest lattice point to s; at an exact midpoint the smaller one wins.
    const auto target = static_cast<std::int64_t>(std::ceil(s / step - 0.5));
    const std::int64_t k = target - level;
    code.offsets.push_back(k);
    level = target;
    nats += 2.0 * std::log(static_cast<double>(k < 0 ? -k : k) + 1.0) + c;
  }
  code.code_length = {nats};
  return code;
}

std::vector<double> decode_sums(const IncrementCode& code) {
  std::vector<double> out;
  out.reserve(code.offsets.size());
  std::int64_t level = 0;
  for (std::int64_t k : code.offsets) {
    level += k;
    out.push_back(2.0 * code.eps * static_cast<double>(level));
  }
  return out;
}

Decomposition decompose(const SampledPath& w) {
  const auto npu = static_cast<std::size_t>(w.n_per_unit());
  const std::size_t total = w.intervals();
  std::vector<double> local(total + 1);
  std::vector<double> levels(total + 1);
  for (std::size_t k = 0; k <= total; ++k) {
    const double base = w[(k / npu) * npu];
    levels[k] = base;
    local[k] = w[k] - base;
  }
  return {SampledPath(w.hurst(), w.horizon(), w.n_per_unit(), std::move(local), w.kind()),
          SampledPath(w.hurst(), w.horizon(), w.n_per_unit(), std::move(levels), PathKind::step)};
}

LpCode encode_lp(const SampledPath& w, const Codebook& block_cb, double eps, double p) {
  if (!(eps > 0.0)) throw std::invalid_argument("encode_lp: eps must be positive");
  if (block_cb.horizon() != 1 || block_cb.n_per_unit() != w.n_per_unit()) {
    throw std::invalid_argument("encode_lp: block codebook grid does not match path grid");
  }
  const Norm norm = Norm::lp(p);
  const int n = w.horizon();
  const auto npu = static_cast<std::size_t>(w.n_per_unit());
  const Decomposition parts = decompose(w);

  std::vector<double> sums(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) sums[i - 1] = w[static_cast<std::size_t>(i) * npu];
  IncrementCode level_code = encode_sums(sums, eps);
  const std::vector<double> level_hat = decode_sums(level_code);

  LpCode out{w, {0.0}, 0.0, 0.0, 0.0, {}, std::move(level_code)};
  std::vector<double> local_hat(w.intervals() + 1, 0.0);
  std::vector<double> levels_hat(w.intervals() + 1, 0.0);
  double nats = out.levels.code_length.nats;
  for (int i = 0; i < n; ++i) {
    const SampledPath block = shift_increment(parts.local, i);
    const NearestResult hit = nearest(block_cb, block, norm);
    out.block_indices.push_back(hit.index);
    nats += block_cb.code_length(hit.index).nats;
    const auto entry = block_cb.entry(hit.index).values();
    const double level = i == 0 ? 0.0 : level_hat[static_cast<std::size_t>(i) - 1];
    for (std::size_t j = 0; j < npu; ++j) {
      local_hat[i * npu + j] = entry[j];
      levels_hat[i * npu + j] = level;
    }
  }
  levels_hat.back() = level_hat.back();

  std::vector<double> recon(local_hat.size());
  for (std::size_t k = 0; k < recon.size(); ++k) recon[k] = local_hat[k] + levels_hat[k];

  const SampledPath x1_hat(w.hurst(), n, w.n_per_unit(), std::move(local_hat), PathKind::step);
  const SampledPath x2_hat(w.hurst(), n, w.n_per_unit(), std::move(levels_hat), PathKind::step);
  out.reconstruction = SampledPath(w.hurst(), n, w.n_per_unit(), std::move(recon), PathKind::step);
  out.code_length = {nats};
  out.distortion = lp_distance(w, out.reconstruction, p);
  out.block_distortion = lp_distance(parts.local, x1_hat, p);
  out.level_distortion = lp_distance(parts.levels, x2_hat, p);
  return out;
}

}  // namespace fbmcode
