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

#include <cstdint>
#include <span>
#include <vector>

#include "fbmcode/codebook.hpp"
#include "fbmcode/grid_paths.hpp"

namespace fbmcode {

/// Partial sums rounded step by step onto the lattice 2 eps Z.
///
/// offsets[i] = k_i with xi_i = 2 eps k_i; the reconstruction is
/// s^_n = sum_{i<=n} xi_i and satisfies |s_n - s^_n| <= eps for all n.
struct IncrementCode {
  std::vector<std::int64_t> offsets;
  double eps = 0.0;
  CodeLength code_length;
};

/// c = log(sum_{k in Z} (|k|+1)^{-2}) = log(pi^2/3 - 1).
double increment_weight_constant();

/// p_k = e^{-c} / (|k|+1)^2.
double increment_weight(std::int64_t k);

IncrementCode encode_sums(std::span<const double> sums, double eps);
std::vector<double> decode_sums(const IncrementCode& code);

/// X1_t = X_t - X_floor(t) (block-local part), X2_t = X_floor(t) (step part).
struct Decomposition {
  SampledPath local;
  SampledPath levels;
};

Decomposition decompose(const SampledPath& w);

struct LpCode {
  SampledPath reconstruction;
  CodeLength code_length;
  double distortion = 0.0;        ///< d_{n,p}(w, reconstruction)
  double block_distortion = 0.0;  ///< d_{n,p}(X1, X1^)
  double level_distortion = 0.0;  ///< d_{n,p}(X2, X2^), always <= eps
  std::vector<std::size_t> block_indices;
  IncrementCode levels;
};

/// Codes X1 blockwise against `block_cb` (nearest in L^p) and the integer
/// levels X_1..X_n with `encode_sums` at accuracy eps.
LpCode encode_lp(const SampledPath& w, const Codebook& block_cb, double eps, double p);

}  // namespace fbmcode
