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

#include "fbmcode/codebook.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace fbmcode {

namespace {

const char* kind_name(PathKind kind) { return kind == PathKind::step ? "step" : "sampled"; }

PathKind kind_from_name(const std::string& name) {
  if (name == "step") return PathKind::step;
  if (name == "sampled") return PathKind::sampled;
  throw std::invalid_argument("unknown path kind '" + name + "'");
}

// Sup distance with early exit once the running max reaches `bound`.
double sup_distance_bounded(std::span<const double> a, std::span<const double> b, double bound) {
  double best = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    if (d > best) {
      best = d;
      if (best >= bound) return best;
    }
  }
  return best;
}

}  // namespace

void require_probability_vector(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("weights must be nonempty");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("weights must sum to 1, got " + std::to_string(total));
  }
}

Codebook::Codebook(std::vector<SampledPath> entries, std::optional<std::vector<double>> weights)
    : entries_(std::move(entries)), weights_(std::move(weights)) {
  if (entries_.empty()) throw std::invalid_argument("Codebook: entries must be nonempty");
  for (const auto& e : entries_) require_same_grid(entries_.front(), e);
  if (weights_) {
    if (weights_->size() != entries_.size()) {
      throw std::invalid_argument("Codebook: weight count does not match entry count");
    }
    require_probability_vector(*weights_);
    for (double w : *weights_) {
      if (!(w > 0.0)) throw std::invalid_argument("Codebook: weights must be positive");
    }
  }
}

std::span<const double> Codebook::weights() const {
  if (!weights_) return {};
  return *weights_;
}

CodeLength Codebook::code_length(std::size_t i) const {
  if (i >= entries_.size()) throw std::out_of_range("Codebook::code_length: index out of range");
  if (!weights_) return {std::log(static_cast<double>(entries_.size()))};
  return fbmcode::code_length(*weights_, i);
}

nlohmann::json Codebook::to_json() const {
  nlohmann::json j;
  const auto& first = entries_.front();
  j["hurst"] = first.hurst();
  j["horizon"] = first.horizon();
  j["n_per_unit"] = first.n_per_unit();
  j["kind"] = kind_name(first.kind());
  auto& rows = j["entries"] = nlohmann::json::array();
  for (const auto& e : entries_) rows.push_back(std::vector<double>(e.values().begin(), e.values().end()));
  j["weights"] = weights_ ? nlohmann::json(*weights_) : nlohmann::json(nullptr);
  return j;
}

Codebook Codebook::from_json(const nlohmann::json& j) {
  const double hurst = j.at("hurst").get<double>();
  const int horizon = j.at("horizon").get<int>();
  const int npu = j.at("n_per_unit").get<int>();
  const PathKind kind = kind_from_name(j.at("kind").get<std::string>());
  std::vector<SampledPath> entries;
  for (const auto& row : j.at("entries")) {
    entries.emplace_back(hurst, horizon, npu, row.get<std::vector<double>>(), kind);
  }
  std::optional<std::vector<double>> weights;
  if (j.contains("weights") && !j.at("weights").is_null()) {
    weights = j.at("weights").get<std::vector<double>>();
  }
  return Codebook(std::move(entries), std::move(weights));
}

NearestResult nearest(std::span<const SampledPath> entries, const SampledPath& x, const Norm& norm) {
  if (entries.empty()) throw std::invalid_argument("nearest: empty codebook");
  NearestResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    require_same_grid(entries[i], x);
    const double d = norm.kind == Norm::Kind::sup
                         ? sup_distance_bounded(entries[i].values(), x.values(), best.distortion)
                         : norm.distance(entries[i], x);
    if (d < best.distortion) best = {i, d};
  }
  return best;
}

NearestResult nearest(const Codebook& cb, const SampledPath& x, const Norm& norm) {
  return nearest(std::span<const SampledPath>(cb.entries()), x, norm);
}

double entropy(std::span<const double> weights) {
  require_probability_vector(weights);
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return h;
}

CodeLength code_length(std::span<const double> weights, std::size_t index) {
  if (index >= weights.size()) throw std::out_of_range("code_length: index out of range");
  const double w = weights[index];
  if (!(w > 0.0)) {
    throw std::invalid_argument("code_length: index " + std::to_string(index) + " has zero weight");
  }
  return {-std::log(w)};
}

double cross_entropy(std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw std::invalid_argument("cross_entropy: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] <= 0.0) return std::numeric_limits<double>::infinity();
    acc -= q[i] * std::log(p[i]);
  }
  return acc;
}

}  // namespace fbmcode
