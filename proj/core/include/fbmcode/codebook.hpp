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
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fbmcode/grid_paths.hpp"

namespace fbmcode {

/// Realized code length in nats.
struct CodeLength {
  double nats = 0.0;
};

/// Immutable list of reconstruction paths on one shared grid, optionally with
/// probability weights.
class Codebook {
 public:
  explicit Codebook(std::vector<SampledPath> entries,
                    std::optional<std::vector<double>> weights = std::nullopt);

  std::size_t size() const { return entries_.size(); }
  const SampledPath& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<SampledPath>& entries() const { return entries_; }

  bool has_weights() const { return weights_.has_value(); }
  std::span<const double> weights() const;

  /// -log weight of entry i, or log(size) for an unweighted codebook.
  CodeLength code_length(std::size_t i) const;

  int horizon() const { return entries_.front().horizon(); }
  int n_per_unit() const { return entries_.front().n_per_unit(); }
  double hurst() const { return entries_.front().hurst(); }

  nlohmann::json to_json() const;
  static Codebook from_json(const nlohmann::json& j);

 private:
  std::vector<SampledPath> entries_;
  std::optional<std::vector<double>> weights_;
};

/// Throws std::invalid_argument unless weights are positive-or-zero and sum to 1 within 1e-9.
void require_probability_vector(std::span<const double> weights);

struct NearestResult {
  std::size_t index = 0;
  double distortion = 0.0;
};

/// Brute-force nearest entry; ties go to the smallest index.
NearestResult nearest(const Codebook& cb, const SampledPath& x, const Norm& norm);

/// Same scan over a plain list of paths.
NearestResult nearest(std::span<const SampledPath> entries, const SampledPath& x, const Norm& norm);

/// Shannon entropy in nats; zero weights contribute nothing.
double entropy(std::span<const double> weights);

/// -log p_index. Throws std::invalid_argument for a zero-weight index.
CodeLength code_length(std::span<const double> weights, std::size_t index);

/// E_Q[-log P]; infinite if Q charges an entry where P vanishes.
double cross_entropy(std::span<const double> q, std::span<const double> p);

}  // namespace fbmcode
