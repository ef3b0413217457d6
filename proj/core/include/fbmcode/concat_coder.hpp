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
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbmcode/codebook.hpp"
#include "fbmcode/grid_paths.hpp"
#include "fbmcode/random_coder.hpp"

namespace fbmcode {

/// Offset-grid size M >= 2 and per-block error budget d > 0.
struct ConcatParams {
  int M = 3;
  double d = 1.0;

  void validate() const;
  /// M/(M-1) d, the sup-error guarantee on [0,n].
  double error_bound() const;

  friend bool operator==(const ConcatParams&, const ConcatParams&) = default;
};

/// Unit-interval quantizer used for every block.
///
/// `encode` must return a valid index into `codebook`. The codebook weights,
/// when present, are taken to be the law of the encoder output and are used
/// for code-length accounting.
struct BaseQuantizer {
  Codebook codebook;
  std::function<std::size_t(const SampledPath&)> encode;
};

struct ConcatCodeword {
  std::vector<std::size_t> block_indices;  ///< length n
  std::vector<int> offset_indices;         ///< length n-1, each in [0, M)
  ConcatParams params;

  std::size_t blocks() const { return block_indices.size(); }

  nlohmann::json to_json() const;
  static ConcatCodeword from_json(const nlohmann::json& j);

  friend bool operator==(const ConcatCodeword&, const ConcatCodeword&) = default;
};

/// The M offsets -d + 2kd/(M-1), k = 0..M-1, ascending.
std::vector<double> offset_grid(int M, double d);

struct OffsetChoice {
  int index = 0;
  double xi = 0.0;
};

/// Smallest grid value minimizing |target - (current + xi)|.
OffsetChoice select_offset(double target, double current, std::span<const double> grid);

/// M = floor(e^{dr}); requires dr >= log 2 so that M >= 2.
int offsets_for_rate_increment(double rate_increment);

ConcatCodeword encode_concat(const SampledPath& w, const BaseQuantizer& base,
                             const ConcatParams& params);

/// Step reconstruction on [0,n]. On block i the grid values are
/// offset_i + entry_i[j]; the final grid point carries the left limit of
/// the last block, whose value is the last grid value of its entry.
SampledPath decode_concat(const ConcatCodeword& cw, const BaseQuantizer& base);

/// Per-block sup errors ||w^{(i)} - entry_i||; a value above params.d flags
/// a block where the base quantizer missed its budget.
std::vector<double> block_errors(const SampledPath& w, const ConcatCodeword& cw,
                                 const BaseQuantizer& base);

/// (n-1) log M + sum_i -log p_{block_i}.
CodeLength concat_code_length(const ConcatCodeword& cw, const BaseQuantizer& base);

struct RescaledCode {
  SampledPath reconstruction;  ///< step path on [0,1]
  CodeLength code_length;
  ConcatCodeword codeword;
  double error_on_horizon = 0.0;  ///< sup error of the concat code on [0,n]
  bool within_budget = true;      ///< every block error <= d
};

/// alpha_n^{-1} o concat o alpha_n applied to w on [0,1]. w.n_per_unit() must
/// equal n times the base codebook's n_per_unit.
RescaledCode rescale_scheme(const SampledPath& w, int n, const BaseQuantizer& base,
                            const ConcatParams& params);

/// code_length_per_unit <= H + log M + eps (boundary inclusive).
bool typical_membership(double code_length_per_unit, double base_entropy, int M, double eps);

/// Log-cardinality budget n (H + log M + eps) of the typical codebook.
double typical_codebook_bound(int n, double base_entropy, int M, double eps);

struct RandomBaseConfig {
  double hurst = 0.5;
  int n_per_unit = 64;
  std::size_t pool_size = 256;
  double radius = 1.0;
  std::size_t training_blocks = 4096;
  double smoothing = 0.5;  ///< pseudo-count added to every entry
};

/// Random-coding base quantizer: first hit within `radius` over an FBM pool,
/// nearest entry on a miss. Weights are the output frequencies over
/// `training_blocks` independent FBM blocks plus `smoothing` pseudo-counts.
BaseQuantizer make_random_base(const RandomBaseConfig& config, const RngSpec& rng);

}  // namespace fbmcode
