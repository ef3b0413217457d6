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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fbmcode/rng.hpp"

namespace fbmcode {

/// How grid values are to be read between grid points.
enum class PathKind {
  sampled,  ///< samples of a continuous function
  step,     ///< right-continuous piecewise constant; last value is the left limit at the end
};

/// A real function on [0, horizon] sampled at t_k = k / n_per_unit.
class SampledPath {
 public:
  SampledPath(double hurst, int horizon, int n_per_unit, std::vector<double> values,
              PathKind kind = PathKind::sampled);

  double hurst() const { return hurst_; }
  int horizon() const { return horizon_; }
  int n_per_unit() const { return n_per_unit_; }
  PathKind kind() const { return kind_; }

  /// Number of grid intervals, horizon * n_per_unit.
  std::size_t intervals() const { return values_.size() - 1; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  double time(std::size_t k) const { return static_cast<double>(k) / n_per_unit_; }

  bool same_grid(const SampledPath& other) const {
    return horizon_ == other.horizon_ && n_per_unit_ == other.n_per_unit_;
  }

  SampledPath with_kind(PathKind kind) const;

  friend bool operator==(const SampledPath&, const SampledPath&) = default;

 private:
  double hurst_;
  int horizon_;
  int n_per_unit_;
  std::vector<double> values_;
  PathKind kind_;
};

/// Throws std::invalid_argument unless both paths live on the same grid.
void require_same_grid(const SampledPath& f, const SampledPath& g);

/// Throws std::domain_error unless 0 < hurst < 1.
void require_hurst(double hurst);

/// FBM covariance kernel K(t,s) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double t, double s, double hurst);

/// Exact-in-distribution FBM sampler on a fixed uniform grid.
///
/// Fractional Gaussian noise increments are drawn by circulant embedding
/// (Davies-Harte). If any embedding eigenvalue is below -1e-9 the sampler
/// falls back to a Cholesky factor of the exact increment covariance, which
/// is only allowed up to 8192 increments. The setup is done once in the
/// constructor; `sample` is const and safe to call from several threads.
class FbmSampler {
 public:
  FbmSampler(double hurst, int horizon, int n_per_unit);
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;
  FbmSampler& operator=(FbmSampler&&) noexcept;

  SampledPath sample(Engine& engine) const;
  SampledPath sample(const RngSpec& spec) const;

  double hurst() const { return hurst_; }
  int horizon() const { return horizon_; }
  int n_per_unit() const { return n_per_unit_; }
  bool uses_circulant() const;

  static constexpr std::size_t kCholeskyCap = 8192;

 private:
  struct Impl;
  double hurst_;
  int horizon_;
  int n_per_unit_;
  std::unique_ptr<Impl> impl_;
};

SampledPath sample_fbm(double hurst, int horizon, int n_per_unit, const RngSpec& spec);

/// alpha_n: f on [0,1] -> n^H f(./n) on [0,n].
///
/// Uses grid-point selection only: the target grid has n_per_unit / n points
/// per unit, so source and target grid points coincide one-to-one.
SampledPath scale_alpha(const SampledPath& f, int n);

/// Inverse of `scale_alpha`: g on [0,n] -> n^{-H} g(n .) on [0,1].
SampledPath scale_alpha_inv(const SampledPath& g, int n);

/// w^{(n)}_t = w_{t+n} - w_n for t in [0,1].
SampledPath shift_increment(const SampledPath& w, int n);

/// Grid maximum of |f - g|.
double sup_distance(const SampledPath& f, const SampledPath& g);

/// (mean over the left grid points of |f - g|^p)^{1/p}; the time-normalized
/// L^p distance on [0, horizon], exact for step functions.
double lp_distance(const SampledPath& f, const SampledPath& g, double p);

/// Distortion measure used by codebooks and coders.
struct Norm {
  enum class Kind { sup, lp };
  Kind kind = Kind::sup;
  double p = 2.0;

  static Norm sup() { return {Kind::sup, 0.0}; }
  static Norm lp(double p);

  double distance(const SampledPath& f, const SampledPath& g) const;
  std::string name() const;

  friend bool operator==(const Norm&, const Norm&) = default;
};

}  // namespace fbmcode
