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

#include "fbmcode/concat_coder.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace fbmcode {

void ConcatParams::validate() const {
  if (M < 2) throw std::invalid_argument("ConcatParams: M must be >= 2, got " + std::to_string(M));
  if (!(d > 0.0)) throw std::invalid_argument("ConcatParams: d must be positive");
}

double ConcatParams::error_bound() const {
  return static_cast<double>(M) / static_cast<double>(M - 1) * d;
}

nlohmann::json ConcatCodeword::to_json() const {
  return nlohmann::json{{"block_indices", block_indices},
                        {"offset_indices", offset_indices},
                        {"params", {{"M", params.M}, {"d", params.d}}}};
}

ConcatCodeword ConcatCodeword::from_json(const nlohmann::json& j) {
  ConcatCodeword cw;
  cw.block_indices = j.at("block_indices").get<std::vector<std::size_t>>();
  cw.offset_indices = j.at("offset_indices").get<std::vector<int>>();
  cw.params.M = j.at("params").at("M").get<int>();
  cw.params.d = j.at("params").at("d").get<double>();
  cw.params.validate();
  return cw;
}

std::vector<double> offset_grid(int M, double d) {
  ConcatParams{M, d}.validate();
  std::vector<double> grid(static_cast<std::size_t>(M));
  for (int k = 0; k < M; ++k) grid[k] = -d + 2.0 * k * d / (M - 1);
  return grid;
}

OffsetChoice select_offset(double target, double current, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("select_offset: empty grid");
  OffsetChoice best{0, grid[0]};
  double best_gap = std::abs(target - (current + grid[0]));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double gap = std::abs(target - (current + grid[k]));
    if (gap < best_gap) {
      best = {static_cast<int>(k), grid[k]};
      best_gap = gap;
    }
  }
  return best;
}

int offsets_for_rate_increment(double rate_increment) {
  const double m = std::floor(std::exp(rate_increment));
  if (!(m >= 2.0)) throw std::invalid_argument("rate increment must be >= log 2");
  if (m > 1e9) throw std::invalid_argument("rate increment too large");
  return static_cast<int>(m);
}

namespace {

void require_block_grid(const SampledPath& w, const BaseQuantizer& base) {
  const auto& cb = base.codebook;
  if (cb.horizon() != 1 || cb.n_per_unit() != w.n_per_unit()) {
    throw std::invalid_argument("concat: base codebook grid [0,1]@" +
                                std::to_string(cb.n_per_unit()) + " does not match path grid @" +
                                std::to_string(w.n_per_unit()));
  }
}

}  // namespace

ConcatCodeword encode_concat(const SampledPath& w, const BaseQuantizer& base,
                             const ConcatParams& params) {
  params.validate();
  require_block_grid(w, base);
  const int n = w.horizon();
  const auto npu = static_cast<std::size_t>(w.n_per_unit());
  const auto grid = offset_grid(params.M, params.d);

  ConcatCodeword cw;
  cw.params = params;
  cw.block_indices.reserve(n);
  cw.offset_indices.reserve(n > 0 ? n - 1 : 0);

  double level = 0.0;  // hat w at the start of the current block
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      const std::size_t prev = cw.block_indices.back();
      const double left_limit = level + base.codebook.entry(prev).values().back();
      const auto choice = select_offset(w[static_cast<std::size_t>(i) * npu], left_limit, grid);
      cw.offset_indices.push_back(choice.index);
      level = left_limit + choice.xi;
    }
    const std::size_t index = base.encode(shift_increment(w, i));
    if (index >= base.codebook.size()) throw std::logic_error("base quantizer returned a bad index");
    cw.block_indices.push_back(index);
  }
  return cw;
}

SampledPath decode_concat(const ConcatCodeword& cw, const BaseQuantizer& base) {
  cw.params.validate();
  const std::size_t n = cw.blocks();
  if (n == 0) throw std::invalid_argument("decode_concat: empty codeword");
  if (cw.offset_indices.size() + 1 != n) {
    throw std::invalid_argument("decode_concat: expected n-1 offset indices");
  }
  const auto grid = offset_grid(cw.params.M, cw.params.d);
  const auto& cb = base.codebook;
  const auto npu = static_cast<std::size_t>(cb.n_per_unit());

  std::vector<double> values(n * npu + 1);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto entry = cb.entry(cw.block_indices.at(i)).values();
    if (i > 0) {
      const int k = cw.offset_indices[i - 1];
      if (k < 0 || k >= cw.params.M) throw std::out_of_range("decode_concat: offset index out of range");
      level += cb.entry(cw.block_indices[i - 1]).values().back() + grid[k];
    }
    for (std::size_t j = 0; j < npu; ++j) values[i * npu + j] = level + entry[j];
    if (i + 1 == n) values[n * npu] = level + entry[npu];
  }
  return SampledPath(cb.hurst(), static_cast<int>(n), cb.n_per_unit(), std::move(values),
                     PathKind::step);
}

std::vector<double> block_errors(const SampledPath& w, const ConcatCodeword& cw,
                                 const BaseQuantizer& base) {
  require_block_grid(w, base);
  if (static_cast<std::size_t>(w.horizon()) != cw.blocks()) {
    throw std::invalid_argument("block_errors: horizon does not match codeword length");
  }
  std::vector<double> errors(cw.blocks());
  for (std::size_t i = 0; i < cw.blocks(); ++i) {
    errors[i] = sup_distance(shift_increment(w, static_cast<int>(i)),
                             base.codebook.entry(cw.block_indices[i]).with_kind(w.kind()));
  }
  return errors;
}

CodeLength concat_code_length(const ConcatCodeword& cw, const BaseQuantizer& base) {
  cw.params.validate();
  if (!base.codebook.has_weights()) {
    throw std::invalid_argument("concat_code_length: base codebook has no weights");
  }
  double nats = static_cast<double>(cw.offset_indices.size()) * std::log(static_cast<double>(cw.params.M));
  for (std::size_t index : cw.block_indices) nats += base.codebook.code_length(index).nats;
  return {nats};
}

RescaledCode rescale_scheme(const SampledPath& w, int n, const BaseQuantizer& base,
                            const ConcatParams& params) {
  if (w.horizon() != 1) throw std::invalid_argument("rescale_scheme: source must live on [0,1]");
  const SampledPath scaled = scale_alpha(w, n);
  ConcatCodeword cw = encode_concat(scaled, base, params);
  const SampledPath decoded = decode_concat(cw, base);
  const double error = sup_distance(scaled, decoded.with_kind(scaled.kind()));
  bool within = true;
  for (double e : block_errors(scaled, cw, base)) within = within && e <= params.d;
  const CodeLength length = concat_code_length(cw, base);
  return RescaledCode{scale_alpha_inv(decoded, n), length, std::move(cw), error, within};
}

bool typical_membership(double code_length_per_unit, double base_entropy, int M, double eps) {
  return code_length_per_unit <= base_entropy + std::log(static_cast<double>(M)) + eps;
}

double typical_codebook_bound(int n, double base_entropy, int M, double eps) {
  return n * (base_entropy + std::log(static_cast<double>(M)) + eps);
}

BaseQuantizer make_random_base(const RandomBaseConfig& config, const RngSpec& rng) {
  if (!(config.radius > 0.0)) throw std::invalid_argument("make_random_base: radius must be positive");
  if (!(config.smoothing > 0.0)) throw std::invalid_argument("make_random_base: smoothing must be positive");
  auto pool = std::make_shared<const RandomPool>(
      RandomPool::build(config.hurst, config.n_per_unit, config.pool_size, rng.child(0)));
  const double radius = config.radius;

  auto encode = [pool, radius](const SampledPath& block) -> std::size_t {
    const RandomCode code = first_hit(*pool, block, radius);
    if (code.hit()) return *code.hit_index - 1;
    return fallback_on_miss(*pool, block, Norm::sup()).index;
  };

  std::vector<double> counts(config.pool_size, config.smoothing);
  const FbmSampler sampler(config.hurst, 1, config.n_per_unit);
  const RngSpec training = rng.child(1);
  for (std::size_t b = 0; b < config.training_blocks; ++b) {
    counts[encode(sampler.sample(training.child(b)))] += 1.0;
  }
  double total = 0.0;
  for (double c : counts) total += c;
  for (double& c : counts) c /= total;

  return BaseQuantizer{Codebook(pool->paths(), std::move(counts)), std::move(encode)};
}

}  // namespace fbmcode
